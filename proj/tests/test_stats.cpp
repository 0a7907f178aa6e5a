#include <doctest.h>

#include <cmath>

#include "cyl/errors.hpp"
#include "cyl/rng.hpp"
#include "cyl/stats.hpp"

using namespace cyl;

TEST_CASE("linear and origin fits recover known lines") {
    std::vector<double> x{1, 2, 3, 4, 5}, y;
    for (double v : x) y.push_back(2.5 * v - 1.0);
    LinFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0));
    y.clear();
    for (double v : x) y.push_back(0.7 * v);
    LinFit g = origin_fit(x, y);
    CHECK(g.slope == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(g.r2 == doctest::Approx(1.0));
}

TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == doctest::Approx(2.0));
    CHECK(median({4, 1, 2, 3}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(median({}), DataError);
}

TEST_CASE("spearman on monotone and anti-monotone data") {
    std::vector<double> x{1, 2, 3, 4, 5, 6};
    std::vector<double> y{2, 4, 5, 7, 11, 12};
    CHECK(spearman(x, y) == doctest::Approx(1.0));
    std::vector<double> z{9, 7, 5, 4, 2, 1};
    CHECK(spearman(x, z) == doctest::Approx(-1.0));
}

TEST_CASE("KS critical value on iid uniform samples") {
    Rng rng(101);
    int n = 10000;
    std::vector<double> u(n);
    for (double& v : u) v = rng.uniform01();
    // 95% critical value 1.358/sqrt(n); allow a small slack for one draw
    CHECK(ks_uniform(u) < 1.36 / std::sqrt(static_cast<double>(n)) * 1.5);
    // point mass: KS near 1
    std::vector<double> point(500, 0.37);
    CHECK(ks_uniform(point) > 0.6);
}

TEST_CASE("wrapped discrepancy detects non-uniformity and stays small on uniform") {
    Rng rng(103);
    std::vector<std::vector<double>> uni(20000, std::vector<double>(2));
    for (auto& p : uni) {
        p[0] = rng.uniform01();
        p[1] = rng.uniform01();
    }
    CHECK(torus_discrepancy(uni) < 0.03);
    // exact diagonal: raw axis-box discrepancy caps at ~1/4, the sheared
    // component sees the concentration at ~1
    std::vector<std::vector<double>> diag(5000, std::vector<double>(2));
    for (auto& p : diag) {
        p[0] = rng.uniform01();
        p[1] = p[0];
    }
    CHECK(wrapped_box_discrepancy(diag) < 0.30);
    CHECK(torus_discrepancy(diag) > 0.9);
}

TEST_CASE("discrepancy is invariant under grid-step global rotations") {
    Rng rng(107);
    std::vector<std::vector<double>> pts(3000, std::vector<double>(2));
    for (auto& p : pts) {
        p[0] = rng.uniform01();
        p[1] = std::fmod(p[0] * 0.5 + 0.1 * rng.uniform01(), 1.0);
    }
    double base = torus_discrepancy(pts);
    for (int shift = 1; shift <= 3; ++shift) {
        std::vector<std::vector<double>> rot = pts;
        double c0 = 7.0 * shift / 64.0, c1 = 13.0 * shift / 64.0;
        for (auto& p : rot) {
            p[0] = std::fmod(p[0] + c0, 1.0);
            p[1] = std::fmod(p[1] + c1, 1.0);
        }
        double moved = torus_discrepancy(rot);
        CHECK(std::abs(moved - base) < 0.02 * std::max(base, 0.05) + 1e-9);
    }
}

TEST_CASE("1-d wrapped discrepancy") {
    Rng rng(109);
    std::vector<std::vector<double>> uni(20000, std::vector<double>(1));
    for (auto& p : uni) p[0] = rng.uniform01();
    CHECK(torus_discrepancy(uni) < 0.02);
    std::vector<std::vector<double>> half(2000, std::vector<double>(1));
    for (auto& p : half) p[0] = 0.5 * rng.uniform01();  // only [0, 1/2)
    CHECK(torus_discrepancy(half) > 0.4);
}
