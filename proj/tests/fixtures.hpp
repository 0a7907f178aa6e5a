#pragma once

// Shared test groups: a two-factor SL2(C) Schottky self-joining with a
// twisted second copy, its degenerate diagonal variant, and a small
// one-factor group for flow-box experiments.

#include <cmath>
#include <complex>

#include "cyl/group.hpp"

namespace fixtures {

using cyl::Cplx;
using cyl::Mat;

// g = F diag(s, 1/s) F^{-1} with F sending (infinity, 0) to (p, q):
// loxodromic with attracting fixed point p, repelling q, eigenvalues s, 1/s
inline Mat mobius_gen(Cplx p, Cplx q, Cplx s) {
    Mat f(2);
    Cplx root = std::sqrt(p - q);
    f(0, 0) = p / root;
    f(0, 1) = q / root;
    f(1, 0) = 1.0 / root;
    f(1, 1) = 1.0 / root;
    Mat d(2);
    d(0, 0) = s;
    d(1, 1) = 1.0 / s;
    return f * d * cyl::inverse(f);
}

inline Cplx polar_mult(double modulus, double angle_fraction_of_pi) {
    return std::polar(modulus, 3.14159265358979323846 * angle_fraction_of_pi);
}

// Rotation-number fractions chosen badly approximable individually and in
// small integer combinations across the two factors, so holonomy angles,
// their differences, and their sums all fill the torus quickly at desk
// scale. Multipliers and fixed points keep the isometric circles of each
// factor pair disjoint (classical ping-pong).
inline const double kFracA1 = 0.7182818284590452;  // e - 2
inline const double kFracB1 = 0.4142135623730951;  // sqrt(2) - 1
inline const double kFracA2 = 0.6180339887498949;  // golden ratio - 1
inline const double kFracB2 = 0.7236067977499790;  // 1 - 1/(2 + golden ratio)

inline Mat a1() { return mobius_gen({2.2, 0}, {-2.2, 0}, polar_mult(3.6, kFracA1)); }
inline Mat b1() { return mobius_gen({0, 2.2}, {0, -2.2}, polar_mult(4.6, kFracB1)); }
inline Mat a2() { return mobius_gen({2.4, 0}, {-2.2, 0}, polar_mult(4.0, kFracA2)); }
inline Mat b2() { return mobius_gen({0, 2.5}, {0, -2.3}, polar_mult(4.8, kFracB2)); }

// self-joining of the Schottky pair by a non-conjugate twisted copy
inline cyl::GroupSpec selfjoining_spec() {
    cyl::GroupSpec spec;
    spec.factors = {{cyl::FactorKind::ComplexSpecialLinear2, 2, false},
                    {cyl::FactorKind::ComplexSpecialLinear2, 2, false}};
    spec.generators = {{a1(), a2()}, {b1(), b2()}};
    spec.metadata["assumes"] = "zariski-dense anosov (ping-pong Schottky self-joining)";
    return spec;
}

// diagonal self-joining: second factor equals the first (rho = identity)
inline cyl::GroupSpec diagonal_spec() {
    cyl::GroupSpec spec;
    spec.factors = {{cyl::FactorKind::ComplexSpecialLinear2, 2, false},
                    {cyl::FactorKind::ComplexSpecialLinear2, 2, false}};
    spec.generators = {{a1(), a1()}, {b1(), b1()}};
    spec.metadata["assumes"] = "diagonal self-joining (rho = id; not Zariski dense)";
    return spec;
}

// single complex factor with short translation lengths; T = 0.7 per power
// of the first generator, good e^{-T} spread for closing experiments
inline cyl::GroupSpec closing_spec() {
    cyl::GroupSpec spec;
    spec.factors = {{cyl::FactorKind::ComplexSpecialLinear2, 2, false}};
    spec.generators = {{mobius_gen({1.2, 0}, {-0.8, 0}, std::polar(std::exp(0.35), 0.2))},
                       {mobius_gen({0, 1.5}, {0, -0.9}, std::polar(std::exp(0.45), -0.3))}};
    return spec;
}

// real SL2 Schottky pair (hyperbolic translations along crossing axes)
inline cyl::GroupSpec real_sl2_spec() {
    cyl::GroupSpec spec;
    spec.factors = {{cyl::FactorKind::RealSpecialLinear, 2, false}};
    spec.generators = {{mobius_gen({2.0, 0}, {-2.0, 0}, {4.0, 0})},
                       {mobius_gen({0.9, 0}, {-5.0, 0}, {3.5, 0})}};
    return spec;
}

}  // namespace fixtures
