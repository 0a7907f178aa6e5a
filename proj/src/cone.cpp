#include "cyl/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "cyl/errors.hpp"
#include "cyl/rng.hpp"
#include "cyl/stats.hpp"

namespace cyl {

using nlohmann::json;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

std::vector<double> scaled(std::vector<double> a, double s) {
    for (double& x : a) x *= s;
    return a;
}

void axpy(std::vector<double>& y, double a, const std::vector<double>& x) {
    for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// nonnegative least squares min ||A z - b||, z >= 0 (Lawson-Hanson active set);
// columns of A are the candidate rays. Returns the residual norm.
double nnls_residual(const std::vector<std::vector<double>>& cols, const std::vector<double>& b) {
    size_t m = b.size(), n = cols.size();
    std::vector<double> z(n, 0.0);
    std::vector<bool> active(n, false);
    std::vector<double> resid = b;
    for (int outer = 0; outer < 3 * static_cast<int>(n) + 30; ++outer) {
        // gradient w = A^T resid
        int best = -1;
        double bestw = 1e-12 * norm2(b);
        for (size_t j = 0; j < n; ++j) {
            if (active[j]) continue;
            double w = dot(cols[j], resid);
            if (w > bestw) {
                bestw = w;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) break;
        active[best] = true;
        // solve the active-set least squares with nonnegativity backtracking
        for (int inner = 0; inner < 50; ++inner) {
            std::vector<int> act;
            for (size_t j = 0; j < n; ++j)
                if (active[j]) act.push_back(static_cast<int>(j));
            size_t k = act.size();
            // normal equations on the active set (k is small: <= ambient dim+1)
            std::vector<std::vector<double>> g(k, std::vector<double>(k));
            std::vector<double> rhs(k);
            for (size_t i = 0; i < k; ++i) {
                rhs[i] = dot(cols[act[i]], b);
                for (size_t j = 0; j < k; ++j) g[i][j] = dot(cols[act[i]], cols[act[j]]);
            }
            // solve g * zz = rhs (Gaussian elimination with ridge fallback)
            for (size_t i = 0; i < k; ++i) g[i][i] += 1e-12;
            std::vector<double> zz = rhs;
            for (size_t col = 0; col < k; ++col) {
                size_t piv = col;
                for (size_t r = col + 1; r < k; ++r)
                    if (std::abs(g[r][col]) > std::abs(g[piv][col])) piv = r;
                std::swap(g[piv], g[col]);
                std::swap(zz[piv], zz[col]);
                for (size_t r = col + 1; r < k; ++r) {
                    double f = g[r][col] / g[col][col];
                    for (size_t c2 = col; c2 < k; ++c2) g[r][c2] -= f * g[col][c2];
                    zz[r] -= f * zz[col];
                }
            }
            for (int r = static_cast<int>(k) - 1; r >= 0; --r) {
                for (size_t c2 = r + 1; c2 < k; ++c2) zz[r] -= g[r][c2] * zz[c2];
                zz[r] /= g[r][r];
            }
            bool all_pos = true;
            for (double v : zz)
                if (v <= 0) all_pos = false;
            if (all_pos) {
                std::fill(z.begin(), z.end(), 0.0);
                for (size_t i = 0; i < k; ++i) z[act[i]] = zz[i];
                break;
            }
            // backtrack: move toward zz until a coordinate hits zero, drop it
            double alpha = 1.0;
            int drop = -1;
            for (size_t i = 0; i < k; ++i) {
                if (zz[i] <= 0) {
                    double zi = z[act[i]];
                    double a = zi / (zi - zz[i] + 1e-300);
                    if (a < alpha) {
                        alpha = a;
                        drop = act[i];
                    }
                }
            }
            for (size_t i = 0; i < k; ++i) z[act[i]] += alpha * (zz[i] - z[act[i]]);
            if (drop >= 0) {
                active[drop] = false;
                z[drop] = 0.0;
            }
        }
        resid = b;
        for (size_t j = 0; j < n; ++j)
            if (z[j] != 0.0) axpy(resid, -z[j], cols[j]);
    }
    return norm2(resid);
}

}  // namespace

double LinearForm::operator()(const std::vector<double>& flat) const {
    if (flat.size() != coefficients.size())
        throw ConfigError("LinearForm: coordinate count mismatch");
    return dot(coefficients, flat);
}

LinearForm simple_root_form(const GroupSpec& spec, int factor, int index) {
    if (factor < 0 || factor >= static_cast<int>(spec.factors.size()))
        throw ConfigError("simple_root_form: factor index out of range");
    if (index < 0 || index + 1 >= spec.factors[factor].dimension)
        throw ConfigError("simple_root_form: root index out of range");
    LinearForm f;
    f.coefficients.assign(spec.ambient_dim(), 0.0);
    int off = 0;
    for (int k = 0; k < factor; ++k) off += spec.factors[k].dimension;
    f.coefficients[off + index] = 1.0;
    f.coefficients[off + index + 1] = -1.0;
    return f;
}

NormLike lp_norm(double p, int dim) {
    if (p < 1.0) throw ConfigError("lp_norm: need p >= 1");
    NormLike n;
    n.kind = "lp";
    n.value = [p](const std::vector<double>& x) {
        double s = 0;
        for (double v : x) s += std::pow(std::abs(v), p);
        return std::pow(s, 1.0 / p);
    };
    n.gradient = [p, value = n.value](const std::vector<double>& x) {
        double nv = value(x);
        std::vector<double> g(x.size(), 0.0);
        if (nv <= 0) return g;
        for (size_t i = 0; i < x.size(); ++i) {
            double a = std::abs(x[i]);
            g[i] = a > 0 ? std::pow(nv, 1.0 - p) * std::pow(a, p - 1.0) * (x[i] > 0 ? 1 : -1) : 0.0;
        }
        return g;
    };
    n.hessian = [p, value = n.value](const std::vector<double>& x) {
        size_t d = x.size();
        double nv = value(x);
        std::vector<std::vector<double>> h(d, std::vector<double>(d, 0.0));
        if (nv <= 0) return h;
        std::vector<double> u(d);
        for (size_t i = 0; i < d; ++i) {
            double a = std::abs(x[i]);
            u[i] = a > 0 ? std::pow(a, p - 1.0) * (x[i] > 0 ? 1 : -1) : 0.0;
        }
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) {
                h[i][j] = (1.0 - p) * std::pow(nv, 1.0 - 2.0 * p) * u[i] * u[j];
                if (i == j) {
                    double a = std::abs(x[i]);
                    if (a > 0) h[i][j] += (p - 1.0) * std::pow(nv, 1.0 - p) * std::pow(a, p - 2.0);
                }
            }
        return h;
    };
    return n;
}

NormLike weighted_euclidean_norm(std::vector<double> weights) {
    for (double w : weights)
        if (w <= 0) throw ConfigError("weighted_euclidean_norm: weights must be positive");
    NormLike n;
    n.kind = "weighted-euclidean";
    n.value = [weights](const std::vector<double>& x) {
        double s = 0;
        for (size_t i = 0; i < x.size(); ++i) s += weights[i] * x[i] * x[i];
        return std::sqrt(s);
    };
    n.gradient = [weights, value = n.value](const std::vector<double>& x) {
        double nv = value(x);
        std::vector<double> g(x.size(), 0.0);
        if (nv <= 0) return g;
        for (size_t i = 0; i < x.size(); ++i) g[i] = weights[i] * x[i] / nv;
        return g;
    };
    n.hessian = [weights, value = n.value](const std::vector<double>& x) {
        size_t d = x.size();
        double nv = value(x);
        std::vector<std::vector<double>> h(d, std::vector<double>(d, 0.0));
        if (nv <= 0) return h;
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < d; ++j) {
                h[i][j] = -(weights[i] * x[i]) * (weights[j] * x[j]) / (nv * nv * nv);
                if (i == j) h[i][j] += weights[i] / nv;
            }
        return h;
    };
    return n;
}

NormLike linear_restriction_norm(LinearForm form) {
    NormLike n;
    n.kind = "linear";
    size_t d = form.coefficients.size();
    n.value = [form](const std::vector<double>& x) { return form(x); };
    n.gradient = [form](const std::vector<double>&) { return form.coefficients; };
    n.hessian = [d](const std::vector<double>&) {
        return std::vector<std::vector<double>>(d, std::vector<double>(d, 0.0));
    };
    return n;
}

NormLike custom_norm(std::function<double(const std::vector<double>&)> value, int dim) {
    NormLike n;
    n.kind = "custom";
    n.value = value;
    const double h = 1e-5;
    n.gradient = [value, h](const std::vector<double>& x) {
        std::vector<double> g(x.size());
        std::vector<double> xp = x, xm = x;
        for (size_t i = 0; i < x.size(); ++i) {
            xp[i] = x[i] + h;
            xm[i] = x[i] - h;
            g[i] = (value(xp) - value(xm)) / (2 * h);
            xp[i] = x[i];
            xm[i] = x[i];
        }
        return g;
    };
    n.hessian = [value, h](const std::vector<double>& x) {
        size_t d = x.size();
        std::vector<std::vector<double>> he(d, std::vector<double>(d));
        double f0 = value(x);
        std::vector<double> y = x;
        for (size_t i = 0; i < d; ++i)
            for (size_t j = i; j < d; ++j) {
                if (i == j) {
                    y[i] = x[i] + h;
                    double fp = value(y);
                    y[i] = x[i] - h;
                    double fm = value(y);
                    y[i] = x[i];
                    he[i][i] = (fp - 2 * f0 + fm) / (h * h);
                } else {
                    y[i] = x[i] + h; y[j] = x[j] + h; double fpp = value(y);
                    y[j] = x[j] - h; double fpm = value(y);
                    y[i] = x[i] - h; double fmm = value(y);
                    y[j] = x[j] + h; double fmp = value(y);
                    y[i] = x[i]; y[j] = x[j];
                    he[i][j] = he[j][i] = (fpp - fpm - fmp + fmm) / (4 * h * h);
                }
            }
        // symmetrize against roundoff
        for (size_t i = 0; i < d; ++i)
            for (size_t j = 0; j < i; ++j) {
                double s = (he[i][j] + he[j][i]) / 2;
                he[i][j] = he[j][i] = s;
            }
        return he;
    };
    (void)dim;
    return n;
}

QuadraticFormI quadratic_form_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("quadratic form: JSON parse failure: ") + e.what());
    }
    QuadraticFormI q;
    if (doc.contains("basis")) q.basis_convention = doc["basis"].get<std::string>();
    if (!doc.contains("matrix") || !doc["matrix"].is_array())
        throw ConfigError("quadratic form: missing 'matrix'");
    for (const json& row : doc["matrix"]) {
        std::vector<double> r;
        for (const json& v : row) r.push_back(v.get<double>());
        q.matrix.push_back(std::move(r));
    }
    size_t n = q.matrix.size();
    for (const auto& row : q.matrix)
        if (row.size() != n) throw ConfigError("quadratic form: matrix must be square");
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < i; ++j)
            if (std::abs(q.matrix[i][j] - q.matrix[j][i]) > 1e-9)
                throw ConfigError("quadratic form: matrix must be symmetric");
    std::vector<double> ev = sym_eigenvalues(q.matrix);
    if (!ev.empty() && ev.front() < -1e-9)
        throw ConfigError("quadratic form: matrix must be positive semidefinite");
    return q;
}

ConeHull cone_hull(const GroupSpec& spec, const std::vector<CartanPoint>& samples) {
    std::vector<std::vector<double>> dirs;
    for (const CartanPoint& p : samples) {
        std::vector<double> f = p.flat();
        double n = norm2(f);
        if (n > 1e-14) dirs.push_back(scaled(std::move(f), 1.0 / n));
    }
    if (dirs.size() < 2) throw DataError("cone_hull: need >= 2 nonzero samples");

    ConeHull hull;
    hull.sample_count = static_cast<long>(samples.size());

    // orthonormal basis of the sample span (Gram-Schmidt over the samples)
    std::vector<std::vector<double>> basis;
    for (const auto& d : dirs) {
        std::vector<double> v = d;
        for (const auto& b : basis) axpy(v, -dot(v, b), b);
        double n = norm2(v);
        if (n > 1e-8) basis.push_back(scaled(std::move(v), 1.0 / n));
        if (basis.size() >= dirs.front().size()) break;
    }
    hull.span_dim = static_cast<int>(basis.size());
    hull.span_basis = basis;

    if (hull.span_dim == 1) {
        hull.rays.push_back(dirs.front());
        hull.angle_range = {0.0, 0.0};
        return hull;
    }
    if (hull.span_dim == 2) {
        // angles in the plane spanned by basis[0], basis[1]
        double lo = 1e300, hi = -1e300;
        std::vector<double> vlo, vhi;
        double a0 = 0;
        bool first = true;
        for (const auto& d : dirs) {
            double x = dot(d, basis[0]), y = dot(d, basis[1]);
            double ang = std::atan2(y, x);
            if (first) {
                a0 = ang;
                first = false;
            }
            // unwrap against the first sample; chamber cones are < pi wide
            double rel = ang - a0;
            while (rel > 3.14159265358979323846) rel -= 2 * 3.14159265358979323846;
            while (rel < -3.14159265358979323846) rel += 2 * 3.14159265358979323846;
            if (rel < lo) {
                lo = rel;
                vlo = d;
            }
            if (rel > hi) {
                hi = rel;
                vhi = d;
            }
        }
        hull.angle_range = {a0 + lo, a0 + hi};
        hull.rays.push_back(vlo);
        if (hi > lo + 1e-12) hull.rays.push_back(vhi);
        return hull;
    }

    // general rank: deduplicate directions, keep candidates that random
    // supporting functionals select, then verify extremality by NNLS
    std::vector<std::vector<double>> uniq;
    for (const auto& d : dirs) {
        bool dup = false;
        for (const auto& u : uniq)
            if (dot(d, u) > 1.0 - 1e-10) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(d);
    }
    std::vector<size_t> candidates;
    Rng rng(12345);
    size_t trials = 64 * basis.size() * basis.size();
    std::vector<bool> chosen(uniq.size(), false);
    for (size_t t = 0; t < trials; ++t) {
        std::vector<double> w(dirs.front().size(), 0.0);
        for (const auto& b : basis) axpy(w, rng.normal(), b);
        size_t best = 0;
        double bv = -1e300;
        for (size_t i = 0; i < uniq.size(); ++i) {
            double v = dot(uniq[i], w);
            if (v > bv) {
                bv = v;
                best = i;
            }
        }
        if (!chosen[best]) {
            chosen[best] = true;
            candidates.push_back(best);
        }
    }
    for (size_t idx : candidates) {
        std::vector<std::vector<double>> others;
        for (size_t j = 0; j < uniq.size(); ++j)
            if (j != idx && dot(uniq[j], uniq[idx]) < 1.0 - 1e-10) others.push_back(uniq[j]);
        if (others.empty() || nnls_residual(others, uniq[idx]) > 1e-7)
            hull.rays.push_back(uniq[idx]);
    }
    std::sort(hull.rays.begin(), hull.rays.end());
    return hull;
}

bool cone_contains(const ConeHull& hull, const std::vector<double>& direction, double angular_tol) {
    std::vector<double> d = direction;
    double n = norm2(d);
    if (n <= 0) return false;
    d = scaled(std::move(d), 1.0 / n);
    if (hull.angle_range && hull.span_dim == 2) {
        double x = dot(d, hull.span_basis[0]), y = dot(d, hull.span_basis[1]);
        double planar = std::sqrt(x * x + y * y);
        if (planar < 1.0 - angular_tol) return false;  // out of plane
        double ang = std::atan2(y, x);
        auto [lo, hi] = *hull.angle_range;
        while (ang > hi + 3.14159265358979323846) ang -= 2 * 3.14159265358979323846;
        while (ang < lo - 3.14159265358979323846) ang += 2 * 3.14159265358979323846;
        return ang >= lo - angular_tol && ang <= hi + angular_tol;
    }
    return nnls_residual(hull.rays, d) <= angular_tol;
}

double growth_indicator(const std::vector<CartanPoint>& samples,
                        const std::vector<double>& direction, double aperture,
                        long min_samples) {
    if (aperture <= 0) throw ConfigError("growth_indicator: aperture must be positive");
    std::vector<double> dir = direction;
    double dn = norm2(dir);
    if (dn <= 0) throw ConfigError("growth_indicator: zero direction");
    dir = scaled(std::move(dir), 1.0 / dn);
    std::vector<double> in_cone;
    double cos_ap = std::cos(aperture);
    for (const CartanPoint& p : samples) {
        std::vector<double> f = p.flat();
        double n = norm2(f);
        if (n <= 1e-14) continue;
        if (dot(f, dir) / n >= cos_ap) in_cone.push_back(n);
    }
    if (static_cast<long>(in_cone.size()) < min_samples)
        throw InsufficientDataError("growth_indicator: too few samples in cone",
                                    static_cast<long>(in_cone.size()));
    std::sort(in_cone.begin(), in_cone.end());
    double tmax = in_cone.back(), tmin = in_cone.front();
    double lo = (tmax + tmin) / 2;
    std::vector<double> xs, ys;
    size_t start = std::lower_bound(in_cone.begin(), in_cone.end(), lo) - in_cone.begin();
    for (size_t i = start; i < in_cone.size(); ++i) {
        xs.push_back(in_cone[i]);
        ys.push_back(std::log(static_cast<double>(i + 1)));
    }
    if (xs.size() < 2)
        throw InsufficientDataError("growth_indicator: degenerate top half",
                                    static_cast<long>(xs.size()));
    return linear_fit(xs, ys).slope;
}

ExponentEstimate critical_exponent(const std::vector<double>& values, double window_lo,
                                   double window_hi, long min_samples) {
    if (static_cast<long>(values.size()) < min_samples)
        throw InsufficientDataError("critical_exponent: too few values",
                                    static_cast<long>(values.size()));
    for (double v : values)
        if (v <= 0) throw ConfigError("critical_exponent: values must be positive");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    if (window_lo >= window_hi || window_hi <= sorted.front() || window_lo >= sorted.back())
        throw DataError("critical_exponent: window outside data range");
    std::vector<double> xs, ys;
    size_t i0 = std::lower_bound(sorted.begin(), sorted.end(), window_lo) - sorted.begin();
    size_t i1 = std::upper_bound(sorted.begin(), sorted.end(), window_hi) - sorted.begin();
    for (size_t i = i0; i < i1; ++i) {
        xs.push_back(sorted[i]);
        ys.push_back(std::log(static_cast<double>(i + 1)));
    }
    if (xs.size() < 8) throw DataError("critical_exponent: window too sparse");
    LinFit fit = linear_fit(xs, ys);
    ExponentEstimate e;
    e.value = fit.slope;
    e.window_lo = window_lo;
    e.window_hi = window_hi;
    e.residual = fit.rms_residual;
    if (!std::isfinite(e.value)) throw NumericError("critical_exponent: non-finite estimate");
    return e;
}

namespace {

// densest growth direction per unit `scale` (psi or N) over the hull rays,
// golden-section refined in rank 2
std::vector<double> densest_direction(const GroupSpec& spec, const ConeHull& hull,
                                      const std::vector<CartanPoint>& census,
                                      const std::function<double(const std::vector<double>&)>& scale) {
    auto rate = [&](const std::vector<double>& u) -> double {
        double s = scale(u);
        if (s <= 0) return -1e300;
        for (double ap : {0.12, 0.2, 0.35, 0.6}) {
            try {
                return growth_indicator(census, u, ap, 60) / s;
            } catch (const InsufficientDataError&) {
            }
        }
        return -1e300;
    };
    if (hull.span_dim == 2 && hull.angle_range) {
        auto dir_at = [&](double ang) {
            std::vector<double> u(hull.span_basis[0].size(), 0.0);
            axpy(u, std::cos(ang), hull.span_basis[0]);
            axpy(u, std::sin(ang), hull.span_basis[1]);
            return u;
        };
        auto [lo, hi] = *hull.angle_range;
        if (hi - lo < 1e-9) return dir_at(lo);
        int grid = 33;
        double best_ang = lo;
        double best = -1e300;
        for (int i = 0; i < grid; ++i) {
            double ang = lo + (hi - lo) * i / (grid - 1);
            double r = rate(dir_at(ang));
            if (r > best) {
                best = r;
                best_ang = ang;
            }
        }
        // golden-section refinement around the grid argmax
        double a = std::max(lo, best_ang - (hi - lo) / grid);
        double b = std::min(hi, best_ang + (hi - lo) / grid);
        const double gr = 0.6180339887498949;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = rate(dir_at(x1)), f2 = rate(dir_at(x2));
        for (int it = 0; it < 25; ++it) {
            if (f1 < f2) {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = rate(dir_at(x2));
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = rate(dir_at(x1));
            }
        }
        return dir_at((a + b) / 2);
    }
    // higher rank: grid over convex combinations of hull rays
    std::vector<double> best_dir = hull.rays.front();
    double best = -1e300;
    int steps = 6;
    std::vector<std::vector<double>> rays = hull.rays;
    if (rays.size() == 1) return rays.front();
    std::function<void(size_t, std::vector<double>&, int)> walk = [&](size_t i,
                                                                      std::vector<double>& acc,
                                                                      int left) {
        if (i + 1 == rays.size()) {
            std::vector<double> u = acc;
            axpy(u, static_cast<double>(left), rays[i]);
            double n = norm2(u);
            if (n <= 0) return;
            u = scaled(std::move(u), 1.0 / n);
            double r = rate(u);
            if (r > best) {
                best = r;
                best_dir = u;
            }
            return;
        }
        for (int take = 0; take <= left; ++take) {
            std::vector<double> acc2 = acc;
            axpy(acc2, static_cast<double>(take), rays[i]);
            walk(i + 1, acc2, left - take);
        }
    };
    std::vector<double> zero(rays.front().size(), 0.0);
    walk(0, zero, steps);
    return best_dir;
}

}  // namespace

LinearForm normalize_tangent(const GroupSpec& spec, const LinearForm& psi,
                             const std::vector<CartanPoint>& census) {
    ConeHull hull = cone_hull(spec, census);
    for (const auto& ray : hull.rays)
        if (psi(ray) <= 0)
            throw DataError("normalize_tangent: form is not positive on a hull ray");
    std::vector<double> vals;
    vals.reserve(census.size());
    for (const CartanPoint& p : census) vals.push_back(psi(p));
    double vmax = *std::max_element(vals.begin(), vals.end());
    double vmin = *std::min_element(vals.begin(), vals.end());
    ExponentEstimate est = critical_exponent(vals, (vmax + vmin) / 2, vmax,
                                             std::min<long>(1000, vals.size()));
    LinearForm out;
    out.coefficients = scaled(psi.coefficients, est.value);
    std::vector<double> v =
        densest_direction(spec, hull, census, [&](const std::vector<double>& u) { return psi(u); });
    // scale so the normalized form takes value 1 at v
    double val = out(v);
    if (val <= 0) throw DataError("normalize_tangent: nonpositive value at tangency direction");
    v = scaled(std::move(v), 1.0 / val);
    Normalization nz;
    nz.delta = est.value;
    nz.direction = v;
    out.normalization = nz;
    return out;
}

DeltaNResult delta_n(const GroupSpec& spec, const NormLike& n,
                     const std::vector<CartanPoint>& census) {
    ConeHull hull = cone_hull(spec, census);
    for (const auto& ray : hull.rays)
        if (n.value(ray) <= 0) throw DataError("delta_n: norm not positive on a hull ray");
    std::vector<double> vals;
    vals.reserve(census.size());
    for (const CartanPoint& p : census) vals.push_back(n.value(p.flat()));
    double vmax = *std::max_element(vals.begin(), vals.end());
    double vmin = *std::min_element(vals.begin(), vals.end());
    DeltaNResult r;
    r.estimate = critical_exponent(vals, (vmax + vmin) / 2, vmax, std::min<long>(1000, vals.size()));
    std::vector<double> v = densest_direction(spec, hull, census,
                                              [&](const std::vector<double>& u) { return n.value(u); });
    double nv = n.value(v);
    if (nv <= 0) throw DataError("delta_n: nonpositive norm at densest direction");
    r.direction = scaled(std::move(v), 1.0 / nv);
    return r;
}

std::vector<std::vector<double>> kerpsi_basis(const GroupSpec& spec, const LinearForm& psi) {
    int dim = spec.ambient_dim();
    if (static_cast<int>(psi.coefficients.size()) != dim)
        throw ConfigError("kerpsi_basis: form dimension mismatch");
    // orthonormal basis of the sum-zero subspace a, factor by factor
    std::vector<std::vector<double>> abasis;
    int off = 0;
    for (const FactorSpec& f : spec.factors) {
        for (int i = 0; i + 1 < f.dimension; ++i) {
            std::vector<double> v(dim, 0.0);
            v[off + i] = 1.0;
            v[off + i + 1] = -1.0;
            for (const auto& b : abasis) axpy(v, -dot(v, b), b);
            double n = norm2(v);
            if (n > 1e-12) abasis.push_back(scaled(std::move(v), 1.0 / n));
        }
        off += f.dimension;
    }
    // representing vector of psi restricted to a
    std::vector<double> vpsi(dim, 0.0);
    for (const auto& b : abasis) axpy(vpsi, psi(b), b);
    double pn = norm2(vpsi);
    if (pn <= 1e-12) throw ConfigError("kerpsi_basis: form vanishes on a");
    vpsi = scaled(std::move(vpsi), 1.0 / pn);
    // complement of vpsi inside a: Gram-Schmidt over the a-basis seeds
    std::vector<std::vector<double>> out;
    for (const auto& seed : abasis) {
        std::vector<double> v = seed;
        axpy(v, -dot(v, vpsi), vpsi);
        for (const auto& b : out) axpy(v, -dot(v, b), b);
        double n = norm2(v);
        if (n > 1e-9) out.push_back(scaled(std::move(v), 1.0 / n));
    }
    if (static_cast<int>(out.size()) != spec.total_rank() - 1)
        throw NumericError("kerpsi_basis: unexpected kernel dimension");
    return out;
}

CConstant c_from_forms(const std::vector<std::vector<double>>& a_i,
                       const std::vector<std::vector<double>>& a_q, long mc_samples,
                       std::uint64_t seed) {
    size_t r = a_i.size();
    CConstant out;
    if (r == 0) return out;  // rank one: empty Gaussian integrals, c = 1
    if (a_q.size() != r) throw ConfigError("c_from_forms: dimension mismatch");

    std::vector<double> iev = sym_eigenvalues(a_i);
    if (iev.front() <= 1e-12)
        throw ConfigError("c_from_forms: I must be positive definite on ker psi");
    double qscale = 0;
    for (const auto& row : a_q)
        for (double x : row) qscale = std::max(qscale, std::abs(x));
    std::vector<std::vector<double>> q = a_q;
    std::vector<double> qev = sym_eigenvalues(q);
    if (!qev.empty() && qev.front() < -1e-7 * std::max(1.0, qscale))
        throw ConfigError("c_from_forms: Hessian form has a negative eigenvalue (not convex)");
    if (!qev.empty() && qev.front() < 0)  // clip roundoff negatives
        for (size_t i = 0; i < r; ++i) q[i][i] -= qev.front();

    std::vector<std::vector<double>> sum(r, std::vector<double>(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) sum[i][j] = a_i[i][j] + q[i][j];
    double det_i = sym_determinant(a_i);
    double det_sum = sym_determinant(sum);
    if (det_sum <= 0) throw NumericError("c_from_forms: degenerate combined form");
    out.closed_form = std::sqrt(det_i / det_sum);

    // Monte Carlo cross-check: E[e^{-Q(u)}] under density ~ e^{-I(u)},
    // u = L z with L L^T = (2 A_I)^{-1}
    std::vector<std::vector<double>> two_i(r, std::vector<double>(r));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) two_i[i][j] = 2.0 * a_i[i][j];
    std::vector<std::vector<double>> cov = mat_inverse_spd(two_i);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < i; ++j) {
            double s = (cov[i][j] + cov[j][i]) / 2;
            cov[i][j] = cov[j][i] = s;
        }
    std::vector<std::vector<double>> chol = cholesky(cov);
    Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
    double acc = 0;
    std::vector<double> z(r), u(r);
    for (long s = 0; s < mc_samples; ++s) {
        for (size_t i = 0; i < r; ++i) z[i] = rng.normal();
        for (size_t i = 0; i < r; ++i) {
            double x = 0;
            for (size_t j = 0; j <= i; ++j) x += chol[i][j] * z[j];
            u[i] = x;
        }
        double qu = 0;
        for (size_t i = 0; i < r; ++i)
            for (size_t j = 0; j < r; ++j) qu += u[i] * q[i][j] * u[j];
        acc += std::exp(-qu);
    }
    out.monte_carlo = acc / mc_samples;
    return out;
}

CConstant c_constant(const GroupSpec& spec, const LinearForm& psi, const QuadraticFormI& I,
                     const NormLike& n, double delta_n_value, const std::vector<double>& v,
                     long mc_samples, std::uint64_t seed) {
    std::vector<std::vector<double>> basis = kerpsi_basis(spec, psi);
    size_t r = basis.size();
    if (I.matrix.size() != r)
        throw ConfigError("c_constant: I has dimension " + std::to_string(I.matrix.size()) +
                          ", ker psi has dimension " + std::to_string(r));
    if (r == 0) return CConstant{};

    // Hessian quadratic form restricted to ker psi
    std::vector<double> point = scaled(std::vector<double>(v), delta_n_value);
    std::vector<std::vector<double>> hess = n.hessian(point);
    std::vector<std::vector<double>> q(r, std::vector<double>(r, 0.0));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < r; ++j) {
            double s = 0;
            for (size_t a = 0; a < basis[i].size(); ++a)
                for (size_t b = 0; b < basis[j].size(); ++b)
                    s += basis[i][a] * hess[a][b] * basis[j][b];
            q[i][j] = (delta_n_value * delta_n_value / 2.0) * s;
        }
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < i; ++j) {
            double s = (q[i][j] + q[j][i]) / 2;
            q[i][j] = q[j][i] = s;
        }
    return c_from_forms(I.matrix, q, mc_samples, seed);
}

}  // namespace cyl
