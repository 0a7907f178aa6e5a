#include "cyl/equidist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "cyl/errors.hpp"
#include "cyl/stats.hpp"

namespace cyl {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

CensusBuild build_census(const GroupSpec& spec, int max_length, const LinearForm& psi,
                         const std::vector<NamedNorm>& norms, int shards, int threads,
                         double loxodromy_margin) {
    if (max_length < 1) throw ConfigError("build_census: max length must be >= 1");
    if (shards < 1) shards = 1;
    if (threads < 1) threads = 1;

    struct ShardOut {
        std::vector<CensusRecord> records;
        long excluded = 0;
    };
    std::vector<ShardOut> outs(shards);

    auto work = [&](int shard) {
        ShardOut& out = outs[shard];
        enumerate_classes(spec.generator_count(), max_length, /*primitive_only=*/true,
                          [&](const CyclicWord& c) {
                              Word w;
                              w.letters = c.letters;
                              MatrixTuple g = evaluate_word(spec, w);
                              if (!is_loxodromic(spec, g, loxodromy_margin)) {
                                  ++out.excluded;
                                  return;
                              }
                              CensusRecord rec;
                              rec.word = c;
                              rec.length = c.size();
                              rec.lambda = jordan(spec, g);
                              rec.ell_psi = psi(rec.lambda);
                              if (rec.ell_psi <= 0)
                                  throw DataError("build_census: nonpositive psi-circumference; "
                                                  "psi is not positive on the limit cone");
                              std::vector<double> flat = rec.lambda.flat();
                              for (const NamedNorm& nn : norms)
                                  rec.n_values.push_back(nn.norm.value(flat));
                              rec.hol = holonomy(spec, g, loxodromy_margin);
                              out.records.push_back(std::move(rec));
                          },
                          shard, shards);
    };

    if (threads == 1 || shards == 1) {
        for (int s = 0; s < shards; ++s) work(s);
    } else {
        std::vector<std::thread> pool;
        std::atomic_int next{0};
        int nworkers = std::min(threads, shards);
        for (int t = 0; t < nworkers; ++t)
            pool.emplace_back([&] {
                for (int s = next.fetch_add(1); s < shards; s = next.fetch_add(1)) work(s);
            });
        for (std::thread& th : pool) th.join();
    }

    CensusBuild build;
    for (const NamedNorm& nn : norms) build.norm_names.push_back(nn.name);
    size_t total = 0;
    for (const ShardOut& o : outs) {
        total += o.records.size();
        build.excluded_nonloxodromic += o.excluded;
    }
    build.records.reserve(total);
    for (ShardOut& o : outs)
        for (CensusRecord& r : o.records) build.records.push_back(std::move(r));
    std::sort(build.records.begin(), build.records.end(),
              [](const CensusRecord& a, const CensusRecord& b) { return a.word < b.word; });
    return build;
}

CountSeries count_series(const std::vector<double>& values, const std::string& ordering,
                         const std::vector<double>& grid) {
    if (grid.empty()) throw DataError("count_series: empty grid");
    if (values.empty()) throw DataError("count_series: no values");
    CountSeries s;
    s.ordering = ordering;
    s.grid = grid;
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    for (double t : grid) {
        long c = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
        s.counts.push_back(c);
    }
    // fit delta in the form N(T) = e^{dT}/(dT): least squares of
    // log N against dT - log(dT). The objective can have spurious
    // stationary points, so scan a log grid for the global minimum and
    // refine by golden section.
    std::vector<double> xs, ls;
    for (size_t i = 0; i < grid.size(); ++i)
        if (s.counts[i] > 0) {
            xs.push_back(grid[i]);
            ls.push_back(std::log(static_cast<double>(s.counts[i])));
        }
    if (xs.size() < 2) throw DataError("count_series: grid has no populated cells");
    auto objective = [&](double d) {
        double ss = 0;
        for (size_t i = 0; i < xs.size(); ++i) {
            double r = ls[i] - (d * xs[i] - std::log(d * xs[i]));
            ss += r * r;
        }
        return ss;
    };
    double best_d = 1.0, best = objective(1.0);
    for (double d = 1e-3; d <= 50.0; d *= 1.02) {
        double v = objective(d);
        if (v < best) {
            best = v;
            best_d = d;
        }
    }
    double a = best_d / 1.03, b = best_d * 1.03;
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = objective(x1), f2 = objective(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        }
    }
    s.delta_fit = (a + b) / 2;
    double ss = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        double r = ls[i] - (s.delta_fit * xs[i] - std::log(s.delta_fit * xs[i]));
        ss += r * r;
    }
    s.fit_residual = std::sqrt(ss / xs.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        s.ratios.push_back(s.counts[i] * s.delta_fit * t * std::exp(-s.delta_fit * t));
    }
    return s;
}

UniformityReport holonomy_uniformity(const std::vector<CensusRecord>& records, double threshold,
                                     const std::vector<int>& factor_indices, long min_samples) {
    if (factor_indices.empty() || factor_indices.size() > 2)
        throw ConfigError("holonomy_uniformity: select 1 or 2 angle factors");
    std::vector<std::vector<double>> pts;
    for (const CensusRecord& r : records) {
        if (r.ell_psi > threshold) continue;
        std::vector<double> p;
        for (int fi : factor_indices) {
            if (fi < 0 || fi >= static_cast<int>(r.hol.factors.size()))
                throw ConfigError("holonomy_uniformity: factor index out of range");
            const HolonomyFactor& hf = r.hol.factors[fi];
            if (hf.kind != HolonomyFactor::Kind::Angle)
                throw DataError("holonomy_uniformity: selected factor is sign-typed; "
                                "use window counts with sign classes instead");
            p.push_back(hf.angle / hf.range);
        }
        pts.push_back(std::move(p));
    }
    if (static_cast<long>(pts.size()) < min_samples)
        throw InsufficientDataError("holonomy_uniformity: too few records below threshold",
                                    static_cast<long>(pts.size()));
    UniformityReport rep;
    rep.sample_count = static_cast<long>(pts.size());
    for (size_t d = 0; d < factor_indices.size(); ++d) {
        std::vector<double> coord;
        coord.reserve(pts.size());
        for (const auto& p : pts) coord.push_back(p[d]);
        rep.ks_per_dim.push_back(ks_uniform(std::move(coord)));
        rep.ks_max = std::max(rep.ks_max, rep.ks_per_dim.back());
    }
    rep.discrepancy = torus_discrepancy(pts);
    return rep;
}

WindowCount window_count(const std::vector<CensusRecord>& records, double threshold,
                         const std::vector<std::pair<int, AngleWindow>>& windows,
                         double fitted_delta) {
    WindowCount wc;
    double fraction = 1.0;
    for (const auto& [fi, win] : windows) {
        if (records.empty()) break;
        const HolonomyFactor& hf = records.front().hol.factors.at(fi);
        if (hf.kind != HolonomyFactor::Kind::Angle)
            throw DataError("window_count: selected factor is sign-typed");
        if (!(0.0 < win.lo && win.lo < win.hi && win.hi < hf.range))
            throw DataError("window_count: window bounds must satisfy 0 < lo < hi < range");
        fraction *= (win.hi - win.lo) / hf.range;
    }
    for (const CensusRecord& r : records) {
        if (r.ell_psi > threshold) continue;
        bool in = true;
        for (const auto& [fi, win] : windows) {
            double a = r.hol.factors.at(fi).angle;
            if (!(a > win.lo && a < win.hi)) {
                in = false;
                break;
            }
        }
        if (in) ++wc.observed;
    }
    double dt = fitted_delta * threshold;
    wc.predicted = fraction * std::exp(dt) / dt;
    return wc;
}

std::string census_to_csv(const GroupSpec& spec, const CensusBuild& build) {
    std::ostringstream os;
    os << "word,length";
    int r = spec.total_rank();
    for (int i = 0; i < r; ++i) os << ",lambda_" << i;
    os << ",ell_psi";
    for (const std::string& n : build.norm_names) os << ',' << n;
    for (size_t k = 0; k < spec.factors.size(); ++k) os << ",hol_" << k;
    os << '\n';
    for (const CensusRecord& rec : build.records) {
        Word w;
        w.letters = rec.word.letters;
        os << word_to_text(w) << ',' << rec.length;
        for (double v : rec.lambda.independent()) os << ',' << fmt17(v);
        os << ',' << fmt17(rec.ell_psi);
        for (double v : rec.n_values) os << ',' << fmt17(v);
        for (const HolonomyFactor& hf : rec.hol.factors) {
            os << ',';
            switch (hf.kind) {
                case HolonomyFactor::Kind::Angle:
                    os << fmt17(hf.angle);
                    break;
                case HolonomyFactor::Kind::Trivial:
                    os << "trivial";
                    break;
                case HolonomyFactor::Kind::Signs:
                    for (int s : hf.signs) os << (s > 0 ? '+' : '-');
                    break;
            }
        }
        os << '\n';
    }
    return os.str();
}

CensusBuild census_from_csv(const GroupSpec& spec, const std::string& csv) {
    std::istringstream is(csv);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("census csv: empty file");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(cell);
    }
    int r = spec.total_rank();
    size_t nfac = spec.factors.size();
    size_t fixed = 2 + r + 1;
    if (header.size() < fixed + nfac) throw ConfigError("census csv: too few columns for this group");
    size_t nnorms = header.size() - fixed - nfac;
    CensusBuild build;
    for (size_t i = 0; i < nnorms; ++i) build.norm_names.push_back(header[fixed + i]);

    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() != header.size()) throw ConfigError("census csv: ragged row");
        CensusRecord rec;
        Word w = word_from_text(cells[0], spec.generator_count());
        rec.word.letters = w.letters;
        rec.length = std::stoi(cells[1]);
        std::vector<double> flat;
        size_t ci = 2;
        for (const FactorSpec& f : spec.factors) {
            double sum = 0;
            for (int i = 0; i + 1 < f.dimension; ++i) {
                double v = std::stod(cells[ci++]);
                flat.push_back(v);
                sum += v;
            }
            flat.push_back(-sum);
        }
        rec.lambda = cartan_from_flat(spec, flat);
        rec.ell_psi = std::stod(cells[ci++]);
        for (size_t i = 0; i < nnorms; ++i) rec.n_values.push_back(std::stod(cells[ci++]));
        for (size_t k = 0; k < nfac; ++k) {
            const std::string& h = cells[ci++];
            HolonomyFactor hf;
            if (h == "trivial") {
                hf.kind = HolonomyFactor::Kind::Trivial;
            } else if (!h.empty() && (h[0] == '+' || h[0] == '-')) {
                hf.kind = HolonomyFactor::Kind::Signs;
                for (char c : h) hf.signs.push_back(c == '+' ? 1 : -1);
            } else {
                hf.kind = HolonomyFactor::Kind::Angle;
                hf.angle = std::stod(h);
                hf.range = spec.factors[k].projectivized ? kTwoPi / 2 : kTwoPi;
            }
            rec.hol.factors.push_back(std::move(hf));
        }
        build.records.push_back(std::move(rec));
    }
    return build;
}

}  // namespace cyl
