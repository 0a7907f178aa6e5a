#pragma once

#include <vector>

#include "cyl/group.hpp"

namespace cyl {

// A point of the (closed) positive chamber, one weakly decreasing
// zero-sum block per factor. Houses both Cartan and Jordan projections.
struct CartanPoint {
    std::vector<std::vector<double>> per_factor;

    std::vector<double> flat() const;      // all coordinates, factor by factor
    std::vector<double> independent() const;  // drop each factor's last (redundant) coordinate
    double norm() const;                   // Euclidean on the flat coordinates
};

CartanPoint cartan_from_flat(const GroupSpec& spec, const std::vector<double>& flat);
bool cartan_valid(const GroupSpec& spec, const CartanPoint& p, double tol);

struct HolonomyFactor {
    enum class Kind { Angle, Signs, Trivial };
    Kind kind = Kind::Trivial;
    double angle = 0.0;          // Angle kind, in [0, range)
    double range = 0.0;          // 2*pi, or pi when projectivized
    std::vector<int> signs;      // Signs kind, decreasing-eigenvalue-modulus order
};

struct Holonomy {
    std::vector<HolonomyFactor> factors;
};

// angle distance on the factor's circle; sign mismatch is infinite
double holonomy_factor_distance(const HolonomyFactor& a, const HolonomyFactor& b);
bool holonomies_equal(const Holonomy& a, const Holonomy& b, double tol);

struct FlagFactor {
    std::vector<Cplx> attracting;  // unit, first nonzero coordinate positive real
    std::vector<Cplx> repelling;
};

struct Flag {
    std::vector<FlagFactor> factors;
};

// N+ N A M coordinates of an SL2 factor under the convention
// N = upper unipotent, N+ = lower unipotent, A+ = diag(e^t, e^-t) t >= 0.
struct NamnFactor {
    Cplx x;        // N+ coordinate: [[1,0],[x,1]]
    Cplx y;        // N  coordinate: [[1,y],[0,1]]
    double t;      // A  coordinate: diag(e^t, e^-t)
    double phi;    // M  coordinate: diag(e^{i phi}, e^{-i phi}); real factors: 0 or pi
};

// mu(g): per factor the sorted logarithms of singular values.
CartanPoint cartan(const GroupSpec& spec, const MatrixTuple& g);

// lambda(g): per factor the sorted logarithms of eigenvalue moduli.
CartanPoint jordan(const GroupSpec& spec, const MatrixTuple& g);

// strictly regular spectrum: every consecutive gap of jordan(g) exceeds margin
bool is_loxodromic(const GroupSpec& spec, const MatrixTuple& g, double margin);

// h_g: rotation angle arg(lambda_1/lambda_2) per complex factor (mod pi when
// projectivized); eigenvalue signs per real factor, `trivial` when all
// positive. Real factors with non-real spectrum are unsupported.
Holonomy holonomy(const GroupSpec& spec, const MatrixTuple& g, double margin = 1e-9);

// opposition involution: reverse and negate each factor block
CartanPoint opposition(const GroupSpec& spec, const CartanPoint& v);

Flag eigenflags(const GroupSpec& spec, const MatrixTuple& g, double margin = 1e-9);

std::vector<NamnFactor> decompose_namn(const GroupSpec& spec, const MatrixTuple& g);
MatrixTuple recompose_namn(const GroupSpec& spec, const std::vector<NamnFactor>& parts);

// N A M coordinates in the swapped cell N N+ A M (used by flow boxes):
// g = n h a m with n upper, h lower.
std::vector<NamnFactor> decompose_nnam(const GroupSpec& spec, const MatrixTuple& g);

}  // namespace cyl
