#include "cyl/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cyl/errors.hpp"

namespace cyl {

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("linear_fit: need >= 2 points");
    size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw DataError("linear_fit: degenerate abscissae");
    LinFit f;
    f.slope = (n * sxy - sx * sy) / det;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0, ybar = sy / n;
    for (size_t i = 0; i < n; ++i) {
        double r = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += r * r;
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.rms_residual = std::sqrt(ss_res / n);
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

LinFit origin_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.empty()) throw DataError("origin_fit: need >= 1 point");
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    if (sxx < 1e-300) throw DataError("origin_fit: degenerate abscissae");
    LinFit f;
    f.slope = sxy / sxx;
    double ss_res = 0, ss_tot = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - f.slope * x[i];
        ss_res += r * r;
        ss_tot += y[i] * y[i];
    }
    f.rms_residual = std::sqrt(ss_res / x.size());
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

double median(std::vector<double> v) {
    if (v.empty()) throw DataError("median: empty sample");
    size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    return (v[mid - 1] + hi) / 2.0;
}

namespace {
std::vector<double> ranks(const std::vector<double>& v) {
    size_t n = v.size();
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
        double avg = (i + j) / 2.0;
        for (size_t k = i; k <= j; ++k) r[idx[k]] = avg;
        i = j + 1;
    }
    return r;
}
}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DataError("spearman: need >= 2 points");
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0, my = 0;
    for (size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double num = 0, dx = 0, dy = 0;
    for (size_t i = 0; i < rx.size(); ++i) {
        num += (rx[i] - mx) * (ry[i] - my);
        dx += (rx[i] - mx) * (rx[i] - mx);
        dy += (ry[i] - my) * (ry[i] - my);
    }
    if (dx <= 0 || dy <= 0) return 0.0;
    return num / std::sqrt(dx * dy);
}

double ks_uniform(std::vector<double> u) {
    if (u.empty()) throw DataError("ks_uniform: empty sample");
    std::sort(u.begin(), u.end());
    size_t n = u.size();
    double d = 0;
    for (size_t i = 0; i < n; ++i) {
        d = std::max(d, u[i] - static_cast<double>(i) / n);
        d = std::max(d, static_cast<double>(i + 1) / n - u[i]);
    }
    return d;
}

namespace {
constexpr int kGrid = 64;

double disc_1d(const std::vector<std::vector<double>>& pts) {
    std::vector<double> h(kGrid, 0.0);
    for (const auto& p : pts) {
        int i = std::min(static_cast<int>(p[0] * kGrid), kGrid - 1);
        h[i] += 1.0;
    }
    for (double& v : h) v /= pts.size();
    double best = 0;
    // wrapped intervals on the grid via prefix sums over a doubled row
    std::vector<double> pre(2 * kGrid + 1, 0.0);
    for (int i = 0; i < 2 * kGrid; ++i) pre[i + 1] = pre[i] + h[i % kGrid];
    for (int a = 0; a < kGrid; ++a)
        for (int w = 1; w <= kGrid; ++w) {
            double mass = pre[a + w] - pre[a];
            best = std::max(best, std::abs(mass - static_cast<double>(w) / kGrid));
        }
    return best;
}

double disc_2d(const std::vector<std::vector<double>>& pts) {
    std::vector<std::vector<double>> h(kGrid, std::vector<double>(kGrid, 0.0));
    for (const auto& p : pts) {
        int i = std::min(static_cast<int>(p[0] * kGrid), kGrid - 1);
        int j = std::min(static_cast<int>(p[1] * kGrid), kGrid - 1);
        h[i][j] += 1.0;
    }
    // prefix sums over the doubled torus
    int n2 = 2 * kGrid;
    std::vector<std::vector<double>> pre(n2 + 1, std::vector<double>(n2 + 1, 0.0));
    for (int i = 0; i < n2; ++i)
        for (int j = 0; j < n2; ++j)
            pre[i + 1][j + 1] =
                h[i % kGrid][j % kGrid] / pts.size() + pre[i][j + 1] + pre[i + 1][j] - pre[i][j];
    double best = 0;
    // anchors and extents stride 2 to keep the scan around 10^6 boxes
    for (int ai = 0; ai < kGrid; ai += 2)
        for (int aj = 0; aj < kGrid; aj += 2)
            for (int wi = 2; wi <= kGrid; wi += 2)
                for (int wj = 2; wj <= kGrid; wj += 2) {
                    double mass = pre[ai + wi][aj + wj] - pre[ai][aj + wj] - pre[ai + wi][aj] +
                                  pre[ai][aj];
                    double area = static_cast<double>(wi) * wj / (kGrid * kGrid);
                    best = std::max(best, std::abs(mass - area));
                }
    return best;
}
}  // namespace

double wrapped_box_discrepancy(const std::vector<std::vector<double>>& pts) {
    if (pts.empty()) throw DataError("wrapped_box_discrepancy: empty sample");
    size_t dim = pts.front().size();
    if (dim == 1) return disc_1d(pts);
    if (dim == 2) return disc_2d(pts);
    throw DataError("wrapped_box_discrepancy: dimension must be 1 or 2");
}

double torus_discrepancy(const std::vector<std::vector<double>>& pts) {
    if (pts.empty()) throw DataError("torus_discrepancy: empty sample");
    double raw = wrapped_box_discrepancy(pts);
    if (pts.front().size() != 2) return raw;
    std::vector<std::vector<double>> sheared(pts.size(), std::vector<double>(2));
    for (size_t i = 0; i < pts.size(); ++i) {
        sheared[i][0] = pts[i][0];
        double d = pts[i][1] - pts[i][0];
        d -= std::floor(d);
        sheared[i][1] = d;
    }
    return std::max(raw, wrapped_box_discrepancy(sheared));
}

}  // namespace cyl
