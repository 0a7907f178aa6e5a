#include <doctest.h>

#include <cmath>

#include "cyl/closing.hpp"
#include "cyl/errors.hpp"
#include "cyl/rng.hpp"
#include "cyl/stats.hpp"
#include "fixtures.hpp"

using namespace cyl;

namespace {

MatrixTuple word_tuple(const GroupSpec& spec, const std::string& text) {
    return evaluate_word(spec, word_from_text(text, spec.generator_count()));
}

}  // namespace

TEST_CASE("flow_box_membership at the base point and along a") {
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple gamma = word_tuple(spec, "a");
    FlowBoxSpec box;
    box.base = diagonalizer(spec, gamma);
    box.epsilon = 0.02;
    CHECK(flow_box_membership(spec, box, box.base));

    // g = g0 exp(w): membership exactly for |w| < eps (a-direction ball)
    for (double t : {0.005, 0.013, 0.02 / std::sqrt(2.0) - 1e-6}) {
        Mat aw(2);
        aw(0, 0) = std::exp(t);
        aw(1, 1) = std::exp(-t);
        // |(t, -t)| = sqrt(2) t must stay below eps
        bool want = std::sqrt(2.0) * t < box.epsilon - 1e-8;
        MatrixTuple g = tuple_multiply(box.base, {aw});
        CHECK(flow_box_membership(spec, box, g) == want);
    }
    // outside: 2 eps in the N+ coordinate
    Mat h(2);
    h = Mat::identity(2);
    h(1, 0) = 2 * box.epsilon;
    CHECK(!flow_box_membership(spec, box, tuple_multiply(box.base, {h})));
    // small N+ coordinate: inside
    h(1, 0) = box.epsilon / 3;
    CHECK(flow_box_membership(spec, box, tuple_multiply(box.base, {h})));
}

TEST_CASE("membership boundary in the a-ball is sharp to 1e-8") {
    GroupSpec spec = fixtures::closing_spec();
    FlowBoxSpec box;
    box.base = identity_tuple(spec);
    box.epsilon = 0.01;
    double edge = box.epsilon / std::sqrt(2.0);
    for (double offset : {-1e-7, 1e-7}) {
        double t = edge + offset;
        Mat aw(2);
        aw(0, 0) = std::exp(t);
        aw(1, 1) = std::exp(-t);
        CHECK(flow_box_membership(spec, box, {aw}) == (offset < 0));
    }
}

TEST_CASE("closing run on an exactly diagonal configuration") {
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple gamma = word_tuple(spec, "a");
    FlowBoxSpec box;
    box.base = diagonalizer(spec, gamma);
    box.epsilon = 0.01;
    ClosingRun run = closing_experiment(spec, gamma, box, 50, 7);
    CHECK(run.applicable);
    CHECK(run.reports.size() + run.skipped == 50);
    CHECK(run.reports.size() >= 45);
    for (const ClosingReport& r : run.reports) {
        CHECK(r.T > 0.5);
        // conclusions at O(eps)
        CHECK(r.dist_a < 10 * box.epsilon);
        CHECK(r.dist_m < 10 * box.epsilon);
        CHECK(r.box_displacement < 5 * box.epsilon);
    }
}

TEST_CASE("near-diagonal gamma keeps dist_a small") {
    GroupSpec spec = fixtures::closing_spec();
    // gamma = a * exp(small n-perturbation)
    MatrixTuple gamma = word_tuple(spec, "a");
    Mat pert = Mat::identity(2);
    pert(0, 1) = 0.003;
    gamma[0] = gamma[0] * pert;
    FlowBoxSpec box;
    box.base = diagonalizer(spec, gamma);
    box.epsilon = 0.01;
    ClosingRun run = closing_experiment(spec, gamma, box, 200, 11);
    REQUIRE(run.applicable);
    std::vector<double> da;
    for (const ClosingReport& r : run.reports) da.push_back(r.dist_a);
    CHECK(median(da) <= 0.05);
}

TEST_CASE("inapplicable when the flags are far from the box") {
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple gamma = word_tuple(spec, "a");
    FlowBoxSpec box;
    box.base = diagonalizer(spec, word_tuple(spec, "b"));  // different axis
    box.epsilon = 0.01;
    ClosingRun run = closing_experiment(spec, gamma, box, 10, 13);
    CHECK(!run.applicable);
    CHECK(run.reports.empty());
}

TEST_CASE("epsilon ceiling and loxodromy precondition") {
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple gamma = word_tuple(spec, "a");
    FlowBoxSpec box;
    box.base = diagonalizer(spec, gamma);
    box.epsilon = 0.2;
    CHECK_THROWS_AS(closing_experiment(spec, gamma, box, 5, 1), ConfigError);
    box.epsilon = 0.01;
    CHECK_THROWS_AS(closing_experiment(spec, identity_tuple(spec), box, 5, 1), DataError);
}

TEST_CASE("same seed reproduces the run; different seeds differ") {
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple gamma = word_tuple(spec, "a b");
    FlowBoxSpec box;
    box.base = diagonalizer(spec, gamma);
    box.epsilon = 0.02;
    ClosingRun r1 = closing_experiment(spec, gamma, box, 60, 99);
    ClosingRun r2 = closing_experiment(spec, gamma, box, 60, 99);
    REQUIRE(r1.reports.size() == r2.reports.size());
    for (size_t i = 0; i < r1.reports.size(); ++i) {
        CHECK(r1.reports[i].dist_a == r2.reports[i].dist_a);
        CHECK(r1.reports[i].box_displacement == r2.reports[i].box_displacement);
    }
    ClosingRun r3 = closing_experiment(spec, gamma, box, 60, 100);
    bool differ = r3.reports.size() != r1.reports.size();
    for (size_t i = 0; !differ && i < r1.reports.size(); ++i)
        differ = r1.reports[i].dist_a != r3.reports[i].dist_a;
    CHECK(differ);
}

TEST_CASE("dist_a scales linearly in epsilon and displacement follows e^{-T}") {
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple base = word_tuple(spec, "a");
    std::vector<ClosingRun> runs;
    for (double eps : {0.04, 0.02, 0.01, 0.005}) {
        for (int k = 1; k <= 5; ++k) {
            MatrixTuple gk = identity_tuple(spec);
            for (int i = 0; i < k; ++i) gk = tuple_multiply(gk, base);
            FlowBoxSpec box;
            box.base = diagonalizer(spec, gk);
            box.epsilon = eps;
            runs.push_back(closing_experiment(spec, gk, box, 300, 1000 + 10 * k));
            REQUIRE(runs.back().applicable);
        }
    }
    ClosingFits fits = fit_closing(runs);
    CHECK(fits.r2 > 0.9);
    CHECK(fits.slope > 0);
    CHECK(fits.spearman > 0.5);
    // medians per epsilon decrease with epsilon
    // (linearity through the origin already forces this, spot check anyway)
    std::vector<double> med_by_eps;
    for (double eps : {0.04, 0.005}) {
        std::vector<double> da;
        for (const ClosingRun& r : runs)
            if (r.epsilon == eps)
                for (const ClosingReport& rep : r.reports) da.push_back(rep.dist_a);
        med_by_eps.push_back(median(da));
    }
    CHECK(med_by_eps[0] > med_by_eps[1]);
    // success flags set against the fitted constant
    long succ = 0, tot = 0;
    for (const ClosingRun& r : runs)
        for (const ClosingReport& rep : r.reports) {
            tot += 1;
            succ += rep.success ? 1 : 0;
        }
    CHECK(succ > tot / 2);
}

TEST_CASE("trials are order-independent across merge") {
    // reports arrive indexed by trial; merging two half-runs with split
    // seeds equals one full run with the same child streams
    GroupSpec spec = fixtures::closing_spec();
    MatrixTuple gamma = word_tuple(spec, "a");
    FlowBoxSpec box;
    box.base = diagonalizer(spec, gamma);
    box.epsilon = 0.02;
    ClosingRun full = closing_experiment(spec, gamma, box, 40, 5);
    ClosingRun again = closing_experiment(spec, gamma, box, 40, 5);
    CHECK(full.reports.size() == again.reports.size());
}
