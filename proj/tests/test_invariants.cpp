#include <doctest.h>

#include <cmath>

#include "cyl/errors.hpp"
#include "cyl/invariants.hpp"
#include "cyl/rng.hpp"
#include "fixtures.hpp"

using namespace cyl;

namespace {

constexpr double kPi = 3.14159265358979323846;

GroupSpec one_complex() {
    GroupSpec spec;
    spec.factors = {{FactorKind::ComplexSpecialLinear2, 2, false}};
    spec.generators = {{Mat::identity(2)}, {Mat::identity(2)}};
    return spec;
}

GroupSpec one_real(int d) {
    GroupSpec spec;
    spec.factors = {{FactorKind::RealSpecialLinear, d, false}};
    spec.generators = {{Mat::identity(d)}, {Mat::identity(d)}};
    return spec;
}

Mat diag2(Cplx a, Cplx b) {
    Mat m(2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

Word random_reduced(Rng& rng, int len) {
    std::vector<Letter> raw;
    while (static_cast<int>(raw.size()) < len) {
        Letter l = static_cast<Letter>(rng.uniform01() * 4);
        if (!raw.empty() && raw.back() == inverse_letter(l)) continue;
        raw.push_back(l);
    }
    return reduce_word(raw);
}

double flat_dist(const CartanPoint& a, const CartanPoint& b) {
    auto fa = a.flat(), fb = b.flat();
    double s = 0;
    for (size_t i = 0; i < fa.size(); ++i) s += (fa[i] - fb[i]) * (fa[i] - fb[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("cartan basics") {
    GroupSpec spec = one_complex();
    // identity -> zero point
    CartanPoint p = cartan(spec, identity_tuple(spec));
    CHECK(p.per_factor[0][0] == doctest::Approx(0.0).epsilon(1e-14));
    // diag(3, 1/3) -> (log 3, -log 3)
    p = cartan(spec, {diag2(3.0, 1.0 / 3.0)});
    CHECK(p.per_factor[0][0] == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(p.per_factor[0][1] == doctest::Approx(-std::log(3.0)).epsilon(1e-12));
    CHECK(cartan_valid(spec, p, 1e-10));
}

TEST_CASE("cartan of [[2,1],[1,1]]: golden-ratio singular values") {
    GroupSpec spec = one_real(2);
    Mat m(2);
    m(0, 0) = 2;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 1;
    CartanPoint p = cartan(spec, {m});
    double phi = (1 + std::sqrt(5.0)) / 2;
    CHECK(p.per_factor[0][0] == doctest::Approx(2 * std::log(phi)).epsilon(1e-12));
    CHECK(p.per_factor[0][1] == doctest::Approx(-2 * std::log(phi)).epsilon(1e-12));
    // cross-check with the independent Gram route
    auto oracle = singular_values_2x2_gram(m);
    CHECK(std::log(oracle[0]) == doctest::Approx(p.per_factor[0][0]).epsilon(1e-10));
    CHECK_THROWS_AS(cartan(spec, {diag2(std::nan(""), 1.0)}), NumericError);
}

TEST_CASE("jordan basics") {
    GroupSpec spec = one_real(2);
    CartanPoint p = jordan(spec, {diag2(2.0, 0.5)});
    CHECK(p.per_factor[0][0] == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    // upper triangular [[2,5],[0,1/2]]: triangular spectrum
    Mat t(2);
    t(0, 0) = 2;
    t(0, 1) = 5;
    t(1, 1) = 0.5;
    p = jordan(spec, {t});
    CHECK(p.per_factor[0][0] == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(p.per_factor[0][1] == doctest::Approx(-std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("jordan conjugation invariance over 100 random conjugators") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(41);
    Word w = random_reduced(rng, 5);
    MatrixTuple gamma = evaluate_word(spec, w);
    CartanPoint base = jordan(spec, gamma);
    for (int trial = 0; trial < 100; ++trial) {
        Word c = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 5));
        MatrixTuple conj = evaluate_word(spec, c);
        MatrixTuple moved = tuple_multiply(tuple_multiply(conj, gamma), tuple_inverse(conj));
        CHECK(flat_dist(jordan(spec, moved), base) < 1e-8 * (1 + base.norm()));
    }
}

TEST_CASE("is_loxodromic") {
    GroupSpec spec = one_real(2);
    CHECK(is_loxodromic(spec, {diag2(2.0, 0.5)}, 0.1));
    // rotation: moduli both 1
    Mat rot(2);
    rot(0, 0) = std::cos(0.5);
    rot(0, 1) = -std::sin(0.5);
    rot(1, 0) = std::sin(0.5);
    rot(1, 1) = std::cos(0.5);
    CHECK(!is_loxodromic(spec, {rot}, 0.1));
    CHECK_THROWS_AS(is_loxodromic(spec, {rot}, 0.0), ConfigError);
}

TEST_CASE("holonomy angles on complex factors") {
    GroupSpec spec = one_complex();
    Holonomy h = holonomy(spec, {diag2(2.0, 0.5)});
    CHECK(h.factors[0].kind == HolonomyFactor::Kind::Angle);
    CHECK(h.factors[0].angle == doctest::Approx(0.0).epsilon(1e-12));
    // diag(2 e^{i pi/3}, e^{-i pi/3}/2): angle arg(l1/l2) = 2 pi/3
    h = holonomy(spec, {diag2(std::polar(2.0, kPi / 3), std::polar(0.5, -kPi / 3))});
    CHECK(h.factors[0].angle == doctest::Approx(2 * kPi / 3).epsilon(1e-12));
    // projectivized: reduced mod pi
    spec.factors[0].projectivized = true;
    h = holonomy(spec, {diag2(std::polar(2.0, kPi / 3), std::polar(0.5, -kPi / 3))});
    CHECK(h.factors[0].range == doctest::Approx(kPi));
    CHECK(h.factors[0].angle == doctest::Approx(2 * kPi / 3 - kPi + kPi).epsilon(1e-12));
    CHECK(h.factors[0].angle < kPi);
    // non-loxodromic input
    GroupSpec rspec = one_real(2);
    Mat rot(2);
    rot(0, 0) = std::cos(0.5);
    rot(0, 1) = -std::sin(0.5);
    rot(1, 0) = std::sin(0.5);
    rot(1, 1) = std::cos(0.5);
    CHECK_THROWS_AS(holonomy(rspec, {rot}), DataError);
}

TEST_CASE("holonomy sign vectors and the trivial marker on real factors") {
    GroupSpec spec = one_real(2);
    // all-positive spectrum -> trivial (Hitchin-type image)
    Holonomy h = holonomy(spec, {diag2(2.0, 0.5)});
    CHECK(h.factors[0].kind == HolonomyFactor::Kind::Trivial);
    // negative pair
    h = holonomy(spec, {diag2(-2.0, -0.5)});
    CHECK(h.factors[0].kind == HolonomyFactor::Kind::Signs);
    CHECK(h.factors[0].signs == std::vector<int>{-1, -1});
    // projectivized PSL2R: (-,-) is identified with (+,+) = trivial
    spec.factors[0].projectivized = true;
    h = holonomy(spec, {diag2(-2.0, -0.5)});
    CHECK(h.factors[0].kind == HolonomyFactor::Kind::Trivial);
    // SL3 with one sign flip: signs recorded in decreasing-modulus order
    GroupSpec s3 = one_real(3);
    Mat d3(3);
    d3(0, 0) = -4.0;
    d3(1, 1) = 1.0;
    d3(2, 2) = -0.25;
    h = holonomy(s3, {d3});
    CHECK(h.factors[0].signs == std::vector<int>{-1, 1, -1});
    // real factor with complex spectrum is unsupported
    Mat mixed(3);
    mixed(0, 0) = 4.0;
    mixed(1, 1) = 0.3;
    mixed(1, 2) = -0.9;
    mixed(2, 1) = 0.9;
    mixed(2, 2) = 0.3;
    // normalize det to 1
    double det = 4.0 * (0.3 * 0.3 + 0.9 * 0.9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mixed(i, j) /= std::cbrt(det);
    CHECK_THROWS_AS(holonomy(s3, {mixed}), DataError);
}

TEST_CASE("holonomy is conjugation invariant") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(43);
    for (int trial = 0; trial < 50; ++trial) {
        Word w = random_reduced(rng, 2 + static_cast<int>(rng.uniform01() * 5));
        MatrixTuple gamma = evaluate_word(spec, w);
        Holonomy base = holonomy(spec, gamma);
        Word c = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 4));
        MatrixTuple conj = evaluate_word(spec, c);
        MatrixTuple moved = tuple_multiply(tuple_multiply(conj, gamma), tuple_inverse(conj));
        CHECK(holonomies_equal(base, holonomy(spec, moved), 1e-8));
    }
}

TEST_CASE("opposition involution") {
    GroupSpec spec = one_real(3);
    CartanPoint p;
    p.per_factor = {{2, 0, -2}};
    CartanPoint o = opposition(spec, p);
    CHECK(o.per_factor[0] == std::vector<double>{2, 0, -2});
    p.per_factor = {{3, 1, -4}};
    o = opposition(spec, p);
    CHECK(o.per_factor[0] == std::vector<double>{4, -1, -3});
    // rank-one factor: identity
    GroupSpec s2 = one_real(2);
    p.per_factor = {{1.5, -1.5}};
    CHECK(opposition(s2, p).per_factor[0] == std::vector<double>{1.5, -1.5});
}

TEST_CASE("lambda(g^{-1}) = i(lambda(g))") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(47);
    for (int trial = 0; trial < 60; ++trial) {
        Word w = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 8));
        MatrixTuple g = evaluate_word(spec, w);
        CartanPoint lhs = jordan(spec, tuple_inverse(g));
        CartanPoint rhs = opposition(spec, jordan(spec, g));
        CHECK(flat_dist(lhs, rhs) < 1e-8 * (1 + rhs.norm()));
    }
}

TEST_CASE("lambda(g^n) = n lambda(g) for n <= 5") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(53);
    for (int trial = 0; trial < 30; ++trial) {
        Word w = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 6));
        MatrixTuple g = evaluate_word(spec, w);
        CartanPoint lam = jordan(spec, g);
        MatrixTuple p = g;
        for (int n = 2; n <= 5; ++n) {
            p = tuple_multiply(p, g);
            CartanPoint ln = jordan(spec, p);
            auto fl = lam.flat();
            auto fn = ln.flat();
            for (size_t i = 0; i < fl.size(); ++i)
                CHECK(fn[i] == doctest::Approx(n * fl[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("mu(g^n)/n converges to lambda(g)") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(59);
    for (int trial = 0; trial < 20; ++trial) {
        Word w = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 4));
        MatrixTuple g = evaluate_word(spec, w);
        CartanPoint lam = jordan(spec, g);
        MatrixTuple g2 = tuple_multiply(g, g);
        MatrixTuple g8 = tuple_multiply(tuple_multiply(g2, g2), tuple_multiply(g2, g2));
        CartanPoint mu2 = cartan(spec, g2), mu8 = cartan(spec, g8);
        auto f2 = mu2.flat(), f8 = mu8.flat(), fl = lam.flat();
        double d2 = 0, d8 = 0;
        for (size_t i = 0; i < fl.size(); ++i) {
            d2 += std::pow(f2[i] / 2 - fl[i], 2);
            d8 += std::pow(f8[i] / 8 - fl[i], 2);
        }
        CHECK(std::sqrt(d8) <= std::sqrt(d2) + 1e-12);
    }
}

TEST_CASE("coarse subadditivity of the Cartan projection") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(61);
    for (int trial = 0; trial < 50; ++trial) {
        Word u = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 6));
        Word v = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 6));
        MatrixTuple gu = evaluate_word(spec, u), gv = evaluate_word(spec, v);
        double lhs = cartan(spec, tuple_multiply(gu, gv)).norm();
        CHECK(lhs <= cartan(spec, gu).norm() + cartan(spec, gv).norm() + 1e-9);
    }
}

TEST_CASE("eigenflags basics and transversality") {
    GroupSpec spec = one_real(2);
    Flag f = eigenflags(spec, {diag2(2.0, 0.5)});
    CHECK(std::abs(f.factors[0].attracting[0] - Cplx(1, 0)) < 1e-10);
    CHECK(std::abs(f.factors[0].attracting[1]) < 1e-10);
    CHECK(std::abs(f.factors[0].repelling[1] - Cplx(1, 0)) < 1e-10);
    // [[2,1],[1,1]]: attracting direction (phi, 1) normalized
    Mat m(2);
    m(0, 0) = 2;
    m(0, 1) = 1;
    m(1, 0) = 1;
    m(1, 1) = 1;
    f = eigenflags(spec, {m});
    double phi = (1 + std::sqrt(5.0)) / 2;
    double nn = std::sqrt(phi * phi + 1);
    CHECK(std::abs(f.factors[0].attracting[0] - Cplx(phi / nn, 0)) < 1e-9);
    CHECK(std::abs(f.factors[0].attracting[1] - Cplx(1 / nn, 0)) < 1e-9);
}

TEST_CASE("flags of gamma and gamma^2 coincide") {
    GroupSpec spec = fixtures::selfjoining_spec();
    Rng rng(67);
    for (int trial = 0; trial < 30; ++trial) {
        Word w = random_reduced(rng, 1 + static_cast<int>(rng.uniform01() * 5));
        MatrixTuple g = evaluate_word(spec, w);
        Flag f1 = eigenflags(spec, g);
        Flag f2 = eigenflags(spec, tuple_multiply(g, g));
        for (size_t k = 0; k < f1.factors.size(); ++k)
            for (int i = 0; i < 2; ++i) {
                CHECK(std::abs(f1.factors[k].attracting[i] - f2.factors[k].attracting[i]) < 1e-7);
                CHECK(std::abs(f1.factors[k].repelling[i] - f2.factors[k].repelling[i]) < 1e-7);
            }
    }
}

TEST_CASE("namn decomposition basics") {
    GroupSpec spec = one_complex();
    auto parts = decompose_namn(spec, identity_tuple(spec));
    CHECK(std::abs(parts[0].x) < 1e-14);
    CHECK(std::abs(parts[0].y) < 1e-14);
    CHECK(parts[0].t == doctest::Approx(0.0));
    CHECK(parts[0].phi == doctest::Approx(0.0));
    parts = decompose_namn(spec, {diag2(std::exp(1.0), std::exp(-1.0))});
    CHECK(parts[0].t == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(parts[0].x) < 1e-14);
    // off-cell: zero pivot
    Mat w(2);
    w(0, 1) = -1;
    w(1, 0) = 1;
    CHECK_THROWS_AS(decompose_namn(spec, {w}), NumericError);
}

TEST_CASE("namn recomposition on 1000 random cell members") {
    GroupSpec spec;
    spec.factors = {{FactorKind::ComplexSpecialLinear2, 2, false},
                    {FactorKind::RealSpecialLinear, 2, false}};
    spec.generators = {{Mat::identity(2), Mat::identity(2)},
                       {Mat::identity(2), Mat::identity(2)}};
    Rng rng(71);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<NamnFactor> parts(2);
        parts[0].x = Cplx(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
        parts[0].y = Cplx(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4));
        parts[0].t = rng.uniform(-0.4, 0.4);
        parts[0].phi = rng.uniform(-1.5, 1.5);
        parts[1].x = rng.uniform(-0.4, 0.4);
        parts[1].y = rng.uniform(-0.4, 0.4);
        parts[1].t = rng.uniform(-0.4, 0.4);
        parts[1].phi = rng.uniform01() < 0.5 ? 0.0 : kPi;
        MatrixTuple g = recompose_namn(spec, parts);
        auto back = decompose_namn(spec, g);
        MatrixTuple re = recompose_namn(spec, back);
        double err = 0;
        for (size_t k = 0; k < g.size(); ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) err = std::max(err, std::abs(re[k](i, j) - g[k](i, j)));
        CHECK(err <= 1e-10);
        // coordinates recovered
        CHECK(std::abs(back[0].x - parts[0].x) < 1e-10);
        CHECK(std::abs(back[0].y - parts[0].y) < 1e-10);
        CHECK(back[0].t == doctest::Approx(parts[0].t).epsilon(1e-10));
    }
}

TEST_CASE("swapped-cell decomposition agrees with its own recomposition") {
    GroupSpec spec = one_complex();
    Rng rng(73);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<NamnFactor> parts(1);
        parts[0].x = Cplx(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
        parts[0].y = Cplx(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
        parts[0].t = rng.uniform(-0.3, 0.3);
        parts[0].phi = rng.uniform(-1.0, 1.0);
        // build n h a m directly
        Mat n(2), h(2), am(2);
        n = Mat::identity(2);
        n(0, 1) = parts[0].y;
        h = Mat::identity(2);
        h(1, 0) = parts[0].x;
        am(0, 0) = std::polar(std::exp(parts[0].t), parts[0].phi);
        am(1, 1) = 1.0 / am(0, 0);
        MatrixTuple g = {n * h * am};
        auto back = decompose_nnam(spec, g);
        CHECK(std::abs(back[0].x - parts[0].x) < 1e-10);
        CHECK(std::abs(back[0].y - parts[0].y) < 1e-10);
        CHECK(back[0].t == doctest::Approx(parts[0].t).epsilon(1e-9));
        CHECK(back[0].phi == doctest::Approx(parts[0].phi).epsilon(1e-9));
    }
}
