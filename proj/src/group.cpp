#include "cyl/group.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "cyl/errors.hpp"

namespace cyl {

using nlohmann::json;

int GroupSpec::total_rank() const {
    int r = 0;
    for (const FactorSpec& f : factors) r += f.rank();
    return r;
}

int GroupSpec::ambient_dim() const {
    int d = 0;
    for (const FactorSpec& f : factors) d += f.dimension;
    return d;
}

namespace {

Cplx entry_from_json(const json& e, const std::string& path) {
    if (e.is_number()) return Cplx(e.get<double>(), 0.0);
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return Cplx(e[0].get<double>(), e[1].get<double>());
    throw ConfigError("config: entry at " + path + " must be a number or [re, im]");
}

FactorKind kind_from_string(const std::string& s, const std::string& path) {
    if (s == "real-special-linear") return FactorKind::RealSpecialLinear;
    if (s == "complex-special-linear-2") return FactorKind::ComplexSpecialLinear2;
    throw ConfigError("config: unknown factor kind '" + s + "' at " + path);
}

}  // namespace

GroupSpec parse_group_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: JSON parse failure: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    if (!doc.contains("factors") || !doc["factors"].is_array() || doc["factors"].empty())
        throw ConfigError("config: missing or empty 'factors' array");
    GroupSpec spec;
    if (doc.contains("tolerance")) {
        if (!doc["tolerance"].is_number() || doc["tolerance"].get<double>() <= 0)
            throw ConfigError("config: 'tolerance' must be a positive number");
        spec.tolerance = doc["tolerance"].get<double>();
    }
    int fi = 0;
    for (const json& jf : doc["factors"]) {
        std::string path = "factors[" + std::to_string(fi) + "]";
        if (!jf.is_object() || !jf.contains("kind"))
            throw ConfigError("config: " + path + " must be an object with 'kind'");
        FactorSpec f;
        f.kind = kind_from_string(jf["kind"].get<std::string>(), path + ".kind");
        f.dimension = jf.value("dimension", 2);
        f.projectivized = jf.value("projectivized", false);
        if (f.kind == FactorKind::ComplexSpecialLinear2 && f.dimension != 2)
            throw ConfigError("config: " + path + ": complex factors must have dimension 2");
        if (f.dimension < 2)
            throw ConfigError("config: " + path + ": dimension must be >= 2");
        spec.factors.push_back(f);
        ++fi;
    }
    if (spec.total_rank() < 1) throw ConfigError("config: total rank must be >= 1");

    if (!doc.contains("generators") || !doc["generators"].is_array())
        throw ConfigError("config: missing 'generators' array");
    int gi = 0;
    for (const json& jg : doc["generators"]) {
        std::string gpath = "generators[" + std::to_string(gi) + "]";
        if (!jg.is_array() || jg.size() != spec.factors.size())
            throw ConfigError("config: " + gpath + " must list one matrix per factor");
        MatrixTuple tup;
        for (size_t k = 0; k < spec.factors.size(); ++k) {
            const FactorSpec& f = spec.factors[k];
            int d = f.dimension;
            std::string mpath = gpath + "[" + std::to_string(k) + "]";
            const json& jm = jg[k];
            if (!jm.is_array() || static_cast<int>(jm.size()) != d * d)
                throw ConfigError("config: " + mpath + " must be a row-major array of " +
                                  std::to_string(d * d) + " entries");
            Mat m(d);
            for (int idx = 0; idx < d * d; ++idx) {
                Cplx z = entry_from_json(jm[idx], mpath + "[" + std::to_string(idx) + "]");
                if (f.kind == FactorKind::RealSpecialLinear && std::abs(z.imag()) > spec.tolerance)
                    throw ConfigError("config: " + mpath + ": real factor entry has imaginary part");
                m(idx / d, idx % d) = z;
            }
            Cplx det = determinant(m);
            if (std::abs(det - 1.0) > spec.tolerance) {
                std::ostringstream os;
                os << "config: " << mpath << ": determinant " << det.real();
                if (std::abs(det.imag()) > 0) os << (det.imag() < 0 ? "-" : "+") << std::abs(det.imag()) << "i";
                os << " is not 1 within tolerance " << spec.tolerance;
                throw ConfigError(os.str());
            }
            tup.push_back(std::move(m));
        }
        spec.generators.push_back(std::move(tup));
        ++gi;
    }
    if (spec.generator_count() < 2) throw ConfigError("config: need at least 2 generators");
    if (doc.contains("metadata")) {
        for (auto& [k, v] : doc["metadata"].items())
            spec.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
    }
    return spec;
}

std::string serialize_group_config(const GroupSpec& spec) {
    json doc;
    doc["tolerance"] = spec.tolerance;
    doc["factors"] = json::array();
    for (const FactorSpec& f : spec.factors) {
        doc["factors"].push_back(
            {{"kind", f.kind == FactorKind::RealSpecialLinear ? "real-special-linear"
                                                              : "complex-special-linear-2"},
             {"dimension", f.dimension},
             {"projectivized", f.projectivized}});
    }
    doc["generators"] = json::array();
    for (const MatrixTuple& tup : spec.generators) {
        json jg = json::array();
        for (size_t k = 0; k < tup.size(); ++k) {
            json jm = json::array();
            int d = tup[k].dim();
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    Cplx z = tup[k](i, j);
                    if (spec.factors[k].kind == FactorKind::RealSpecialLinear)
                        jm.push_back(z.real());
                    else
                        jm.push_back(json::array({z.real(), z.imag()}));
                }
            jg.push_back(jm);
        }
        doc["generators"].push_back(jg);
    }
    if (!spec.metadata.empty()) {
        doc["metadata"] = json::object();
        for (const auto& [k, v] : spec.metadata) doc["metadata"][k] = v;
    }
    return doc.dump(2);
}

Word reduce_word(const std::vector<Letter>& raw) {
    Word w;
    w.letters.reserve(raw.size());
    for (Letter l : raw) {
        if (!w.letters.empty() && w.letters.back() == inverse_letter(l))
            w.letters.pop_back();
        else
            w.letters.push_back(l);
    }
    return w;
}

Word inverse_word(const Word& w) {
    Word r;
    r.letters.reserve(w.letters.size());
    for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it)
        r.letters.push_back(inverse_letter(*it));
    return r;
}

Word concat(const Word& u, const Word& v) {
    std::vector<Letter> raw = u.letters;
    raw.insert(raw.end(), v.letters.begin(), v.letters.end());
    return reduce_word(raw);
}

MatrixTuple identity_tuple(const GroupSpec& spec) {
    MatrixTuple t;
    for (const FactorSpec& f : spec.factors) t.push_back(Mat::identity(f.dimension));
    return t;
}

MatrixTuple tuple_multiply(const MatrixTuple& a, const MatrixTuple& b) {
    MatrixTuple r;
    r.reserve(a.size());
    for (size_t k = 0; k < a.size(); ++k) r.push_back(a[k] * b[k]);
    return r;
}

MatrixTuple tuple_inverse(const MatrixTuple& a) {
    MatrixTuple r;
    r.reserve(a.size());
    for (const Mat& m : a) r.push_back(inverse(m));
    return r;
}

namespace {

// principal d-th root near 1; input is a determinant drifted slightly off 1
Cplx det_root(Cplx det, int d) {
    double mod = std::pow(std::abs(det), 1.0 / d);
    double arg = std::arg(det) / d;
    return std::polar(mod, arg);
}

}  // namespace

MatrixTuple evaluate_word(const GroupSpec& spec, const Word& w) {
    constexpr double kOverflowGuard = 1e100;
    // Determinant drift is suppressed at the source: each generator is
    // renormalized once, at generator scale, where ad - bc is computed
    // without cancellation. Correcting the accumulated product instead
    // would divide by a determinant whose roundoff is eps * S^d.
    int k2 = 2 * spec.generator_count();
    std::vector<MatrixTuple> table(static_cast<size_t>(k2));
    for (int gen = 0; gen < spec.generator_count(); ++gen) {
        MatrixTuple fwd = spec.generators[gen];
        for (Mat& m : fwd) {
            Cplx root = det_root(determinant(m), m.dim());
            for (int i = 0; i < m.dim(); ++i)
                for (int j = 0; j < m.dim(); ++j) m(i, j) /= root;
        }
        table[2 * gen + 1] = tuple_inverse(fwd);
        table[2 * gen] = std::move(fwd);
    }
    MatrixTuple acc = identity_tuple(spec);
    for (Letter l : w.letters) {
        if (l < 0 || l >= k2)
            throw ConfigError("evaluate_word: letter references generator " + std::to_string(l >> 1));
        for (size_t k = 0; k < acc.size(); ++k) {
            acc[k] = acc[k] * table[l][k];
            if (acc[k].max_abs() > kOverflowGuard)
                throw NumericError(
                    "evaluate_word: entries exceed representable magnitude; use shorter words");
        }
    }
    return acc;
}

bool tuples_equal(const GroupSpec& spec, const MatrixTuple& a, const MatrixTuple& b, double tol) {
    for (size_t k = 0; k < a.size(); ++k) {
        int d = a[k].dim();
        double direct = 0, flipped = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                direct = std::max(direct, std::abs(a[k](i, j) - b[k](i, j)));
                flipped = std::max(flipped, std::abs(a[k](i, j) + b[k](i, j)));
            }
        bool ok = direct <= tol || (spec.factors[k].projectivized && flipped <= tol);
        if (!ok) return false;
    }
    return true;
}

std::string word_to_text(const Word& w) {
    std::ostringstream os;
    bool first = true;
    for (Letter l : w.letters) {
        if (!first) os << ' ';
        first = false;
        int gen = l >> 1;
        if (gen < 26)
            os << static_cast<char>('a' + gen);
        else
            os << 'g' << gen;
        if (l & 1) os << '\'';
    }
    return os.str();
}

Word word_from_text(const std::string& text, int generator_count) {
    std::vector<Letter> raw;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        bool inv = false;
        if (!tok.empty() && tok.back() == '\'') {
            inv = true;
            tok.pop_back();
        }
        int gen = -1;
        if (tok.size() == 1 && tok[0] >= 'a' && tok[0] <= 'z')
            gen = tok[0] - 'a';
        else if (tok.size() > 1 && tok[0] == 'g')
            gen = std::stoi(tok.substr(1));
        if (gen < 0 || gen >= generator_count)
            throw ConfigError("word: token '" + tok + "' is not a generator (have " +
                              std::to_string(generator_count) + ")");
        raw.push_back(static_cast<Letter>(2 * gen + (inv ? 1 : 0)));
    }
    return reduce_word(raw);
}

}  // namespace cyl
