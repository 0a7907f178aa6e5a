#pragma once

#include <vector>

namespace cyl {

struct LinFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
    double rms_residual = 0;
};

LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// least squares y ~ slope * x through the origin
LinFit origin_fit(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Kolmogorov-Smirnov distance of values (pre-normalized to [0,1)) to uniform.
double ks_uniform(std::vector<double> unit_values);

// Discrepancy of points in [0,1)^d (d = 1 or 2) against uniform over the
// family of wrapped grid-aligned boxes on a fixed grid (64 cells per axis).
// Wrapped anchors make the estimate invariant under global rotations.
double wrapped_box_discrepancy(const std::vector<std::vector<double>>& unit_points);

// max of the raw estimate and the estimate after the measure-preserving
// shear (u, v) -> (u, v - u mod 1); the shear exposes diagonal concentration
// that axis-aligned boxes cannot see. 1-d input: plain estimate.
double torus_discrepancy(const std::vector<std::vector<double>>& unit_points);

}  // namespace cyl
