#pragma once

#include <string>
#include <vector>

#include "cyl/census.hpp"
#include "cyl/cone.hpp"
#include "cyl/group.hpp"
#include "cyl/invariants.hpp"

namespace cyl {

// One primitive conjugacy class with its spectral data; the computational
// stand-in for a maximal flat cylinder.
struct CensusRecord {
    CyclicWord word;
    int length = 0;
    CartanPoint lambda;
    double ell_psi = 0;               // psi(lambda), the psi-circumference
    std::vector<double> n_values;     // one per registered norm
    Holonomy hol;
};

struct CensusBuild {
    std::vector<CensusRecord> records;   // canonical order: length, then lex
    long excluded_nonloxodromic = 0;     // must be 0 on Anosov-like inputs
    std::vector<std::string> norm_names;
};

struct NamedNorm {
    std::string name;
    NormLike norm;
};

// One record per primitive class of length <= max_length. Shards are
// enumerated independently (thread pool) and merged back into canonical
// order, so the output is independent of shard and thread counts.
CensusBuild build_census(const GroupSpec& spec, int max_length, const LinearForm& psi,
                         const std::vector<NamedNorm>& norms, int shards = 1, int threads = 1,
                         double loxodromy_margin = 1e-6);

struct CountSeries {
    std::string ordering;
    std::vector<double> grid;
    std::vector<long> counts;
    double delta_fit = 0;       // fitted in the e^{dT}/(dT) form
    double fit_residual = 0;    // rms of log N - (dT - log dT) over the grid
    std::vector<double> ratios; // c(T_j) = N(T_j) d T_j e^{-d T_j}
};

CountSeries count_series(const std::vector<double>& values, const std::string& ordering,
                         const std::vector<double>& grid);

struct UniformityReport {
    long sample_count = 0;
    std::vector<double> ks_per_dim;
    double ks_max = 0;
    double discrepancy = 0;  // wrapped-box estimate, max of raw and sheared
};

// Uniformity of the holonomy angles of the selected factors (1 or 2 angle
// factors) over records with ell_psi <= threshold.
UniformityReport holonomy_uniformity(const std::vector<CensusRecord>& records, double threshold,
                                     const std::vector<int>& factor_indices,
                                     long min_samples = 200);

struct AngleWindow {
    double lo = 0, hi = 0;  // 0 < lo < hi < factor range
};

struct WindowCount {
    long observed = 0;
    double predicted = 0;
};

// observed = #{ell_psi <= T, angles in windows}; predicted =
// prod(width/range) * e^{dT}/(dT) with the series-fitted delta.
WindowCount window_count(const std::vector<CensusRecord>& records, double threshold,
                         const std::vector<std::pair<int, AngleWindow>>& windows,
                         double fitted_delta);

// --- serialization ---

// CSV columns: word,length,lambda_0..lambda_{r-1},ell_psi,<norms>,hol_0,...
// floats with 17 significant digits; holonomy cells: angle, sign pattern
// like "+-", or "trivial".
std::string census_to_csv(const GroupSpec& spec, const CensusBuild& build);
CensusBuild census_from_csv(const GroupSpec& spec, const std::string& csv);

}  // namespace cyl
