#include "cyl/closing.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cyl/errors.hpp"
#include "cyl/rng.hpp"
#include "cyl/stats.hpp"

namespace cyl {

namespace {
constexpr double kPi = 3.14159265358979323846;

double angle_dist(double a, double b, double range) {
    double d = std::fmod(std::abs(a - b), range);
    return std::min(d, range - d);
}

// aggregate coordinate norms across factors
double coords_norm(const std::vector<Cplx>& v) {
    double s = 0;
    for (const Cplx& z : v) s += std::norm(z);
    return std::sqrt(s);
}

void require_sl2(const GroupSpec& spec) {
    for (const FactorSpec& f : spec.factors)
        if (f.dimension != 2)
            throw ConfigError("closing module requires every factor to be SL2");
}

}  // namespace

MatrixTuple diagonalizer(const GroupSpec& spec, const MatrixTuple& g, double margin) {
    Flag fl = eigenflags(spec, g, margin);
    MatrixTuple out;
    for (const FlagFactor& ff : fl.factors) {
        int d = static_cast<int>(ff.attracting.size());
        if (d != 2) throw ConfigError("diagonalizer: factors must be SL2");
        Mat m(2);
        m(0, 0) = ff.attracting[0];
        m(1, 0) = ff.attracting[1];
        m(0, 1) = ff.repelling[0];
        m(1, 1) = ff.repelling[1];
        Cplx det = determinant(m);
        if (std::abs(det) < 1e-14) throw NumericError("diagonalizer: parallel eigenvectors");
        Cplx root = std::sqrt(det);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) m(i, j) /= root;
        out.push_back(std::move(m));
    }
    return out;
}

bool flow_box_membership(const GroupSpec& spec, const FlowBoxSpec& box, const MatrixTuple& g) {
    require_sl2(spec);
    double eps = box.epsilon;
    MatrixTuple x = tuple_multiply(tuple_inverse(box.base), g);
    std::vector<Cplx> hplus, nminus;
    double anorm2 = 0, mdist = 0;
    try {
        std::vector<NamnFactor> cell = decompose_namn(spec, x);    // x = h n a m
        std::vector<NamnFactor> swapped = decompose_nnam(spec, x); // x = n h a m
        for (size_t k = 0; k < cell.size(); ++k) {
            hplus.push_back(cell[k].x);
            nminus.push_back(swapped[k].y);
            anorm2 += 2.0 * cell[k].t * cell[k].t;  // a-block (t, -t)
            double range = spec.factors[k].projectivized ? kPi : 2 * kPi;
            if (spec.factors[k].kind == FactorKind::RealSpecialLinear) {
                if (angle_dist(cell[k].phi, 0.0, 2 * kPi) > 1e-9 &&
                    !(spec.factors[k].projectivized))
                    return false;  // m = -I is not in M_eps
                if (spec.factors[k].projectivized && angle_dist(cell[k].phi, 0.0, kPi) > 1e-9)
                    return false;
            } else {
                mdist = std::max(mdist, angle_dist(cell[k].phi, 0.0, range));
            }
        }
    } catch (const NumericError&) {
        return false;  // outside the open cell
    }
    return coords_norm(hplus) < eps && coords_norm(nminus) < eps && std::sqrt(anorm2) < eps &&
           mdist < eps;
}

namespace {

// sample one box point: coordinates (h, n2, w, m-angles) uniform in their
// epsilon balls; the cell element is solved per factor from (h, n2)
MatrixTuple sample_box_point(const GroupSpec& spec, const FlowBoxSpec& box, Rng& rng) {
    size_t nf = spec.factors.size();
    // h and n2 coordinate vectors: ball of radius eps across all factors
    auto ball_vec = [&](bool complex_coords) {
        std::vector<Cplx> v(nf);
        double r2;
        do {
            r2 = 0;
            for (size_t k = 0; k < nf; ++k) {
                bool cplx = complex_coords && spec.factors[k].kind == FactorKind::ComplexSpecialLinear2;
                v[k] = cplx ? Cplx(rng.uniform(-1, 1), rng.uniform(-1, 1))
                            : Cplx(rng.uniform(-1, 1), 0.0);
                r2 += std::norm(v[k]);
            }
        } while (r2 >= 1.0);
        for (Cplx& z : v) z *= box.epsilon;
        return v;
    };
    std::vector<Cplx> h = ball_vec(true), n2 = ball_vec(true);
    // a-coordinate: ball in the rank-nf flat (t_1, .., t_nf)
    std::vector<double> t(nf);
    double r2;
    do {
        r2 = 0;
        for (size_t k = 0; k < nf; ++k) {
            t[k] = rng.uniform(-1, 1);
            r2 += 2 * t[k] * t[k];  // block (t, -t) has norm sqrt(2)|t|
        }
    } while (r2 >= 1.0);
    std::vector<double> phi(nf, 0.0);
    double m2;
    do {
        m2 = 0;
        for (size_t k = 0; k < nf; ++k) {
            if (spec.factors[k].kind == FactorKind::ComplexSpecialLinear2) {
                phi[k] = rng.uniform(-1, 1);
                m2 += phi[k] * phi[k];
            }
        }
    } while (m2 >= 1.0);

    MatrixTuple out;
    for (size_t k = 0; k < nf; ++k) {
        Cplx x = h[k];
        Cplx z = n2[k];
        Cplx denom = 1.0 - z * x;
        if (std::abs(denom) < 1e-12) denom = 1e-12;
        Cplx y = z / denom;  // cell element h * n(y) has N-part z in the swapped order
        Cplx p = std::polar(std::exp(box.epsilon * t[k]), box.epsilon * phi[k]);
        Mat m(2);
        m(0, 0) = p;
        m(0, 1) = y / p;
        m(1, 0) = x * p;
        m(1, 1) = (x * y + 1.0) / p;
        out.push_back(std::move(m));
    }
    return tuple_multiply(box.base, out);
}

}  // namespace

ClosingRun closing_experiment(const GroupSpec& spec, const MatrixTuple& gamma,
                              const FlowBoxSpec& box, int trials, std::uint64_t seed) {
    require_sl2(spec);
    if (box.epsilon <= 0 || box.epsilon > FlowBoxSpec::kEpsilonCeiling)
        throw ConfigError("closing_experiment: epsilon must lie in (0, 0.05]");
    if (!is_loxodromic(spec, gamma, 1e-9))
        throw DataError("closing_experiment: gamma is not loxodromic");

    ClosingRun run;
    run.epsilon = box.epsilon;

    // premise: the flags of gamma sit inside the box's flag neighborhoods
    // (box forward flags g0 N+_eps e+, backward g0 N_eps e-)
    {
        MatrixTuple gd = diagonalizer(spec, gamma);
        MatrixTuple rel = tuple_multiply(tuple_inverse(box.base), gd);
        for (const Mat& m : rel) {
            // attracting column (1, x*): |x*| <= eps slack; repelling (y*, 1)
            if (std::abs(m(0, 0)) < 1e-12 || std::abs(m(1, 1)) < 1e-12) {
                run.applicable = false;
                break;
            }
            Cplx xs = m(1, 0) / m(0, 0), ys = m(0, 1) / m(1, 1);
            if (std::abs(xs) > 2 * box.epsilon || std::abs(ys) > 2 * box.epsilon) {
                run.applicable = false;
                break;
            }
        }
    }
    if (!run.applicable) return run;

    Rng root(seed);
    for (int trial = 0; trial < trials; ++trial) {
        Rng rng = root.split(trial);
        MatrixTuple g1 = sample_box_point(spec, box, rng);
        MatrixTuple g2 = sample_box_point(spec, box, rng);
        MatrixTuple x = tuple_multiply(tuple_inverse(g1), tuple_multiply(gamma, g2));

        // project to AM; residual = off-cell parts
        std::vector<NamnFactor> parts;
        try {
            parts = decompose_namn(spec, x);
        } catch (const NumericError&) {
            ++run.skipped;
            continue;
        }
        double resid = 0;
        for (const NamnFactor& p : parts) resid = std::max(resid, std::max(std::abs(p.x), std::abs(p.y)));
        if (resid > 0.5) {  // AM projection meaningless this far from the cell diagonal
            ++run.skipped;
            continue;
        }
        MatrixTuple am;
        double T = 1e300;
        std::vector<double> tilde_t(parts.size()), tilde_phi(parts.size());
        for (size_t k = 0; k < parts.size(); ++k) {
            Cplx p = std::polar(std::exp(parts[k].t), parts[k].phi);
            Mat m(2);
            m(0, 0) = p;
            m(1, 1) = 1.0 / p;
            am.push_back(std::move(m));
            tilde_t[k] = parts[k].t;
            tilde_phi[k] = parts[k].phi;
            T = std::min(T, 2.0 * parts[k].t);  // alpha(log a~) per SL2 factor
        }
        MatrixTuple ghat = tuple_multiply(g1, tuple_multiply(am, tuple_inverse(g2)));

        ClosingReport rep;
        rep.T = T;
        try {
            CartanPoint lam = jordan(spec, ghat);
            Holonomy hol = holonomy(spec, ghat, 1e-12);
            double da2 = 0, dm = 0;
            for (size_t k = 0; k < parts.size(); ++k) {
                double dt = lam.per_factor[k][0] - tilde_t[k];
                da2 += 2.0 * dt * dt;
                const HolonomyFactor& hf = hol.factors[k];
                if (hf.kind == HolonomyFactor::Kind::Angle) {
                    // hf.angle is arg(l1/l2) = doubled rotation angle
                    dm = std::max(dm, angle_dist(hf.angle, 2.0 * tilde_phi[k], hf.range) / 2.0);
                } else if (hf.kind == HolonomyFactor::Kind::Signs ||
                           hf.kind == HolonomyFactor::Kind::Trivial) {
                    bool tilde_neg = angle_dist(tilde_phi[k], kPi, 2 * kPi) < kPi / 2;
                    bool hat_neg = hf.kind == HolonomyFactor::Kind::Signs;
                    if (tilde_neg != hat_neg) dm = std::numeric_limits<double>::infinity();
                }
            }
            rep.dist_a = std::sqrt(da2);
            rep.dist_m = dm;
            MatrixTuple gd = diagonalizer(spec, ghat, 1e-12);
            MatrixTuple rel = tuple_multiply(tuple_inverse(box.base), gd);
            std::vector<Cplx> hc, nc;
            for (const Mat& m : rel) {
                if (std::abs(m(0, 0)) < 1e-14 || std::abs(m(1, 1)) < 1e-14)
                    throw NumericError("displacement: cell pivot vanished");
                hc.push_back(m(1, 0) / m(0, 0));
                nc.push_back(m(0, 1) / m(1, 1));
            }
            rep.box_displacement = std::max(coords_norm(hc), coords_norm(nc));
        } catch (const std::runtime_error&) {
            ++run.skipped;
            continue;
        }
        run.reports.push_back(rep);
    }
    return run;
}

ClosingFits fit_closing(std::vector<ClosingRun>& runs) {
    ClosingFits fits;
    std::vector<double> eps, med;
    for (const ClosingRun& r : runs) {
        if (!r.applicable || r.reports.empty()) continue;
        std::vector<double> da;
        for (const ClosingReport& rep : r.reports) da.push_back(rep.dist_a);
        eps.push_back(r.epsilon);
        med.push_back(median(da));
    }
    if (eps.size() >= 2) {
        LinFit f = origin_fit(eps, med);
        fits.slope = f.slope;
        fits.r2 = f.r2;
    } else if (eps.size() == 1) {
        fits.slope = med[0] / eps[0];
        fits.r2 = 1.0;
    }
    // displacement vs e^{-T}: bucket reports by rounded T across all runs,
    // medians per bucket, Spearman against e^{-T}
    std::map<long, std::vector<double>> buckets;
    for (const ClosingRun& r : runs)
        for (const ClosingReport& rep : r.reports)
            buckets[std::lround(rep.T * 4.0)].push_back(rep.box_displacement);
    std::vector<double> expT, disp;
    for (auto& [key, v] : buckets) {
        if (v.size() < 5) continue;
        expT.push_back(std::exp(-key / 4.0));
        disp.push_back(median(v));
    }
    if (expT.size() >= 3) fits.spearman = spearman(expT, disp);
    fits.fitted_c = 3.0 * fits.slope;
    for (ClosingRun& r : runs)
        for (ClosingReport& rep : r.reports)
            rep.success = rep.dist_a <= fits.fitted_c * r.epsilon &&
                          rep.dist_m <= fits.fitted_c * r.epsilon;
    return fits;
}

}  // namespace cyl
