#include "cyl/invariants.hpp"

#include <algorithm>
#include <cmath>

#include "cyl/errors.hpp"

namespace cyl {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

double reduce_mod(double x, double range) {
    double r = std::fmod(x, range);
    if (r < 0) r += range;
    if (r >= range) r -= range;
    return r;
}

// det = 1 forces the logs to sum to zero. The top entries carry relative
// accuracy; the smallest is the one polluted at large condition numbers, so
// it is the one recomputed from the constraint.
void project_zero_sum(std::vector<double>& logs) {
    if (logs.empty()) return;
    double head = 0;
    for (size_t i = 0; i + 1 < logs.size(); ++i) head += logs[i];
    logs.back() = -head;
}

// Top eigenvalue of an SL2 matrix through the trace quadratic with the
// sqrt branch aligned to the trace. det is pinned to 1: the determinant of
// a large-entry product is pure cancellation noise (eps * S^2), while the
// config layer has already validated det = 1 on the generators.
Cplx top_eigenvalue_sl2(const Mat& m) {
    if (!m.finite()) throw NumericError("eigenvalue: non-finite entries");
    Cplx tr = m(0, 0) + m(1, 1);
    Cplx s = std::sqrt(tr * tr - 4.0);
    if ((std::conj(tr) * s).real() < 0.0) s = -s;
    Cplx l1 = (tr + s) / 2.0;
    if (std::abs(l1) < 1.0) l1 = std::abs(l1) > 0 ? 1.0 / l1 : Cplx(1.0);
    return l1;
}
}  // namespace

std::vector<double> CartanPoint::flat() const {
    std::vector<double> v;
    for (const auto& f : per_factor) v.insert(v.end(), f.begin(), f.end());
    return v;
}

std::vector<double> CartanPoint::independent() const {
    std::vector<double> v;
    for (const auto& f : per_factor)
        for (size_t i = 0; i + 1 < f.size(); ++i) v.push_back(f[i]);
    return v;
}

double CartanPoint::norm() const {
    double s = 0;
    for (const auto& f : per_factor)
        for (double x : f) s += x * x;
    return std::sqrt(s);
}

CartanPoint cartan_from_flat(const GroupSpec& spec, const std::vector<double>& flat) {
    CartanPoint p;
    size_t pos = 0;
    for (const FactorSpec& f : spec.factors) {
        if (pos + f.dimension > flat.size())
            throw ConfigError("cartan_from_flat: coordinate count mismatch");
        p.per_factor.emplace_back(flat.begin() + pos, flat.begin() + pos + f.dimension);
        pos += f.dimension;
    }
    if (pos != flat.size()) throw ConfigError("cartan_from_flat: coordinate count mismatch");
    return p;
}

bool cartan_valid(const GroupSpec& spec, const CartanPoint& p, double tol) {
    if (p.per_factor.size() != spec.factors.size()) return false;
    for (size_t k = 0; k < p.per_factor.size(); ++k) {
        const auto& f = p.per_factor[k];
        if (static_cast<int>(f.size()) != spec.factors[k].dimension) return false;
        double sum = 0;
        for (size_t i = 0; i < f.size(); ++i) {
            sum += f[i];
            if (i + 1 < f.size() && f[i] < f[i + 1] - tol) return false;
        }
        if (std::abs(sum) > tol * std::max(1.0, std::abs(f[0]))) return false;
    }
    return true;
}

double holonomy_factor_distance(const HolonomyFactor& a, const HolonomyFactor& b) {
    if (a.kind != b.kind) return std::numeric_limits<double>::infinity();
    if (a.kind == HolonomyFactor::Kind::Trivial) return 0.0;
    if (a.kind == HolonomyFactor::Kind::Signs)
        return a.signs == b.signs ? 0.0 : std::numeric_limits<double>::infinity();
    double d = std::abs(reduce_mod(a.angle - b.angle, a.range));
    return std::min(d, a.range - d);
}

bool holonomies_equal(const Holonomy& a, const Holonomy& b, double tol) {
    if (a.factors.size() != b.factors.size()) return false;
    for (size_t k = 0; k < a.factors.size(); ++k)
        if (!(holonomy_factor_distance(a.factors[k], b.factors[k]) <= tol)) return false;
    return true;
}

CartanPoint cartan(const GroupSpec& spec, const MatrixTuple& g) {
    CartanPoint p;
    for (size_t k = 0; k < g.size(); ++k) {
        if (!g[k].finite()) throw NumericError("cartan: non-finite entries");
        std::vector<double> sv = singular_values(g[k]);
        std::vector<double> logs(sv.size());
        for (size_t i = 0; i < sv.size(); ++i) {
            if (sv[i] <= 0) throw NumericError("cartan: zero singular value");
            logs[i] = std::log(sv[i]);
        }
        project_zero_sum(logs);
        p.per_factor.push_back(std::move(logs));
    }
    return p;
}

CartanPoint jordan(const GroupSpec& spec, const MatrixTuple& g) {
    CartanPoint p;
    for (size_t k = 0; k < g.size(); ++k) {
        std::vector<double> logs;
        if (g[k].dim() == 2) {
            double t = std::log(std::abs(top_eigenvalue_sl2(g[k])));
            logs = {t, -t};
        } else {
            std::vector<Cplx> ev = eigenvalues(g[k]);
            logs.resize(ev.size());
            for (size_t i = 0; i < ev.size(); ++i) {
                double m = std::abs(ev[i]);
                if (m <= 0) throw NumericError("jordan: zero eigenvalue modulus");
                logs[i] = std::log(m);
            }
            std::sort(logs.begin(), logs.end(), std::greater<>());
            project_zero_sum(logs);
        }
        p.per_factor.push_back(std::move(logs));
    }
    return p;
}

bool is_loxodromic(const GroupSpec& spec, const MatrixTuple& g, double margin) {
    if (margin <= 0) throw ConfigError("is_loxodromic: margin must be positive");
    CartanPoint lam = jordan(spec, g);
    for (const auto& f : lam.per_factor)
        for (size_t i = 0; i + 1 < f.size(); ++i)
            if (f[i] - f[i + 1] <= margin) return false;
    return true;
}

Holonomy holonomy(const GroupSpec& spec, const MatrixTuple& g, double margin) {
    if (!is_loxodromic(spec, g, margin))
        throw DataError("holonomy: element is not loxodromic at margin");
    Holonomy h;
    for (size_t k = 0; k < g.size(); ++k) {
        const FactorSpec& fs = spec.factors[k];
        HolonomyFactor hf;
        if (fs.kind == FactorKind::ComplexSpecialLinear2) {
            hf.kind = HolonomyFactor::Kind::Angle;
            hf.range = fs.projectivized ? kPi : kTwoPi;
            // l1/l2 = l1^2 under det 1
            Cplx l1 = top_eigenvalue_sl2(g[k]);
            hf.angle = reduce_mod(std::arg(l1) * 2.0, hf.range);
        } else {
            std::vector<Cplx> ev = eigenvalues(g[k]);  // descending modulus
            double scale = std::abs(ev[0]);
            for (const Cplx& z : ev)
                if (std::abs(z.imag()) > 1e-8 * scale)
                    throw DataError("holonomy: real factor with non-real spectrum is unsupported");
            std::vector<int> signs(ev.size());
            bool all_positive = true;
            for (size_t i = 0; i < ev.size(); ++i) {
                signs[i] = ev[i].real() >= 0 ? 1 : -1;
                if (signs[i] < 0) all_positive = false;
            }
            // projectivized even-d factors: g ~ -g flips every sign
            if (fs.projectivized && fs.dimension % 2 == 0 && signs[0] < 0) {
                for (int& s : signs) s = -s;
                all_positive = true;
                for (int s : signs)
                    if (s < 0) all_positive = false;
            }
            if (all_positive) {
                hf.kind = HolonomyFactor::Kind::Trivial;
            } else {
                hf.kind = HolonomyFactor::Kind::Signs;
                hf.signs = std::move(signs);
            }
        }
        h.factors.push_back(std::move(hf));
    }
    return h;
}

CartanPoint opposition(const GroupSpec& spec, const CartanPoint& v) {
    CartanPoint r;
    for (const auto& f : v.per_factor) {
        std::vector<double> g(f.size());
        for (size_t i = 0; i < f.size(); ++i) g[i] = -f[f.size() - 1 - i];
        r.per_factor.push_back(std::move(g));
    }
    return r;
}

Flag eigenflags(const GroupSpec& spec, const MatrixTuple& g, double margin) {
    if (!is_loxodromic(spec, g, margin))
        throw DataError("eigenflags: element is not loxodromic at margin");
    Flag flag;
    for (size_t k = 0; k < g.size(); ++k) {
        std::vector<Cplx> ev = eigenvalues(g[k]);
        FlagFactor ff;
        ff.attracting = eigenvector(g[k], ev.front());
        ff.repelling = eigenvector(g[k], ev.back());
        // transversality
        Cplx dot = 0;
        for (size_t i = 0; i < ff.attracting.size(); ++i)
            dot += std::conj(ff.attracting[i]) * ff.repelling[i];
        if (1.0 - std::abs(dot) < spec.tolerance)
            throw NumericError("eigenflags: attracting and repelling flags are not transverse");
        flag.factors.push_back(std::move(ff));
    }
    return flag;
}

namespace {

void require_sl2(const GroupSpec& spec) {
    for (const FactorSpec& f : spec.factors)
        if (f.dimension != 2)
            throw ConfigError("decomposition requires every factor to be SL2");
}

NamnFactor split_am(const GroupSpec& spec, size_t k, Cplx p) {
    // p = e^t e^{i phi}: diagonal (p, 1/p)
    NamnFactor nf;
    nf.t = std::log(std::abs(p));
    double phi = std::arg(p);
    if (spec.factors[k].kind == FactorKind::RealSpecialLinear) {
        // m = +-identity only
        nf.phi = p.real() >= 0 ? 0.0 : kPi;
    } else {
        nf.phi = phi;
    }
    return nf;
}

}  // namespace

std::vector<NamnFactor> decompose_namn(const GroupSpec& spec, const MatrixTuple& g) {
    require_sl2(spec);
    std::vector<NamnFactor> parts;
    for (size_t k = 0; k < g.size(); ++k) {
        const Mat& m = g[k];
        Cplx p = m(0, 0);
        if (std::abs(p) < spec.tolerance)
            throw NumericError("decompose_namn: pivot below tolerance (outside the open cell)");
        NamnFactor nf = split_am(spec, k, p);
        nf.x = m(1, 0) / p;
        nf.y = m(0, 1) * p;
        parts.push_back(nf);
    }
    return parts;
}

std::vector<NamnFactor> decompose_nnam(const GroupSpec& spec, const MatrixTuple& g) {
    require_sl2(spec);
    std::vector<NamnFactor> parts;
    for (size_t k = 0; k < g.size(); ++k) {
        const Mat& m = g[k];
        Cplx q = m(1, 1);
        if (std::abs(q) < spec.tolerance)
            throw NumericError("decompose_nnam: pivot below tolerance (outside the open cell)");
        Cplx p = 1.0 / q;
        NamnFactor nf = split_am(spec, k, p);
        nf.y = m(0, 1) / q;       // N coordinate
        nf.x = m(1, 0) * q;       // N+ coordinate
        parts.push_back(nf);
    }
    return parts;
}

MatrixTuple recompose_namn(const GroupSpec& spec, const std::vector<NamnFactor>& parts) {
    require_sl2(spec);
    MatrixTuple g;
    for (size_t k = 0; k < parts.size(); ++k) {
        const NamnFactor& nf = parts[k];
        Cplx p = std::polar(std::exp(nf.t), nf.phi);
        Mat m(2);
        // h n diag(p, 1/p) with h = [[1,0],[x,1]], n = [[1,y],[0,1]]
        m(0, 0) = p;
        m(0, 1) = nf.y / p;
        m(1, 0) = nf.x * p;
        m(1, 1) = (nf.x * nf.y + 1.0) / p;
        g.push_back(std::move(m));
    }
    return g;
}

}  // namespace cyl
