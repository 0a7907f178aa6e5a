#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cyl/group.hpp"
#include "cyl/invariants.hpp"

namespace cyl {

// Conical hull of sampled chamber points, in flattened a-coordinates.
struct ConeHull {
    std::vector<std::vector<double>> rays;  // unit extreme rays
    long sample_count = 0;
    int span_dim = 0;
    // rank-2 fast path: angles of the boundary rays in the span plane
    std::optional<std::pair<double, double>> angle_range;
    std::vector<std::vector<double>> span_basis;  // orthonormal basis of the sample span
};

struct Normalization {
    double delta = 1.0;                 // critical exponent absorbed into the form
    std::vector<double> direction;      // tangency direction v, scaled so form(v) = 1
};

struct LinearForm {
    std::vector<double> coefficients;   // on the flattened a-coordinates
    std::optional<Normalization> normalization;

    double operator()(const std::vector<double>& flat) const;
    double operator()(const CartanPoint& p) const { return (*this)(p.flat()); }
};

// alpha_i on one factor: t_i - t_{i+1} of that factor's block
LinearForm simple_root_form(const GroupSpec& spec, int factor, int index);

struct NormLike {
    std::string kind;  // "lp" | "weighted-euclidean" | "linear" | "custom"
    std::function<double(const std::vector<double>&)> value;
    std::function<std::vector<double>(const std::vector<double>&)> gradient;
    std::function<std::vector<std::vector<double>>(const std::vector<double>&)> hessian;
};

NormLike lp_norm(double p, int dim);
NormLike weighted_euclidean_norm(std::vector<double> weights);
NormLike linear_restriction_norm(LinearForm form);
// value-only evaluator; gradient and Hessian by symmetrized central
// differences with step 1e-5
NormLike custom_norm(std::function<double(const std::vector<double>&)> value, int dim);

// User-supplied quadratic form I on a declared orthonormal basis of ker psi.
struct QuadraticFormI {
    std::vector<std::vector<double>> matrix;
    std::string basis_convention = "kerpsi-gram-schmidt";
};

QuadraticFormI quadratic_form_from_json(const std::string& text);

struct ExponentEstimate {
    double value = 0;
    double window_lo = 0, window_hi = 0;
    double residual = 0;  // rms of the log-count regression
};

// --- operations ---

ConeHull cone_hull(const GroupSpec& spec, const std::vector<CartanPoint>& samples);
bool cone_contains(const ConeHull& hull, const std::vector<double>& direction, double angular_tol);

// slope of log #{samples in cone(direction, aperture) with norm <= t} over
// the top half of the populated range; the value of the growth indicator at
// the unit vector of `direction`.
double growth_indicator(const std::vector<CartanPoint>& samples,
                        const std::vector<double>& direction, double aperture,
                        long min_samples = 100);

// slope of log N(t) against t over the window, N(t) = #{values <= t}
ExponentEstimate critical_exponent(const std::vector<double>& values, double window_lo,
                                   double window_hi, long min_samples = 1000);

// delta_psi * psi with the normalization record; the tangency direction is
// the argmax of the cone-restricted growth rate per unit psi over the hull.
LinearForm normalize_tangent(const GroupSpec& spec, const LinearForm& psi,
                             const std::vector<CartanPoint>& census);

struct DeltaNResult {
    ExponentEstimate estimate;
    std::vector<double> direction;  // v_N, scaled so N(v_N) = 1
};

DeltaNResult delta_n(const GroupSpec& spec, const NormLike& n,
                     const std::vector<CartanPoint>& census);

// deterministic orthonormal basis of ker psi inside the sum-zero subspace
std::vector<std::vector<double>> kerpsi_basis(const GroupSpec& spec, const LinearForm& psi);

struct CConstant {
    double closed_form = 1.0;
    double monte_carlo = 1.0;
};

// Gaussian-integral ratio at the formula level:
//   c = integral e^{-(I+Q)} / integral e^{-I} = sqrt(det A_I / det(A_I + A_Q)),
// plus a seeded Monte Carlo estimate of the same ratio. A_I must be positive
// definite, A_Q positive semidefinite (within tolerance).
CConstant c_from_forms(const std::vector<std::vector<double>>& a_i,
                       const std::vector<std::vector<double>>& a_q, long mc_samples = 1000000,
                       std::uint64_t seed = 0);

// c_N = c_from_forms with A_Q the Hessian quadratic form
// (delta_N^2/2) Hess(N)(delta_N v) restricted to ker psi.
CConstant c_constant(const GroupSpec& spec, const LinearForm& psi, const QuadraticFormI& I,
                     const NormLike& n, double delta_n_value, const std::vector<double>& v,
                     long mc_samples = 1000000, std::uint64_t seed = 0);

}  // namespace cyl
