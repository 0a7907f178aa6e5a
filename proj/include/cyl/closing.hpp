#pragma once

#include <cstdint>
#include <vector>

#include "cyl/group.hpp"
#include "cyl/invariants.hpp"

namespace cyl {

struct FlowBoxSpec {
    MatrixTuple base;     // g0
    double epsilon = 0.01;
    static constexpr double kEpsilonCeiling = 0.05;
};

struct ClosingReport {
    double T = 0;                 // min over positive roots of alpha(log a~)
    double dist_a = 0;            // |log a_gamma - log a~| on a
    double dist_m = 0;            // holonomy angle distance
    double box_displacement = 0;  // cell-coordinate distance of the diagonalizer from the box
    bool success = false;         // set by fit_closing against the fitted C
};

struct ClosingRun {
    bool applicable = true;       // flags of gamma inside the box flag neighborhoods
    double epsilon = 0;
    std::vector<ClosingReport> reports;
    long skipped = 0;             // trials whose AM projection was unsolvable
};

// Membership in the flow box: both cell decompositions of g0^{-1} g exist and
// the N+, N, A, M parts sit inside their epsilon balls.
bool flow_box_membership(const GroupSpec& spec, const FlowBoxSpec& box, const MatrixTuple& g);

// Per trial: sample g1, g2 in the box, project g1^{-1} gamma g2 to AM to get
// (a~, m~), form the exactly closing element g1 a~ m~ g2^{-1}, diagonalize it
// through its eigenflags and report the distances of the lemma's conclusion.
ClosingRun closing_experiment(const GroupSpec& spec, const MatrixTuple& gamma,
                              const FlowBoxSpec& box, int trials, std::uint64_t seed);

struct ClosingFits {
    double slope = 0;       // median dist_a ~ slope * epsilon, through origin
    double r2 = 0;
    double spearman = 0;    // rank correlation of per-T median displacement with e^{-T}
    double fitted_c = 0;    // success threshold constant
};

// Shared fit across runs at several epsilons (and T values inside each run);
// marks per-report success flags with C = 3 * slope.
ClosingFits fit_closing(std::vector<ClosingRun>& runs);

// diagonalizer of a loxodromic tuple: per-factor eigenvector columns,
// determinant-normalized
MatrixTuple diagonalizer(const GroupSpec& spec, const MatrixTuple& g, double margin = 1e-9);

}  // namespace cyl
