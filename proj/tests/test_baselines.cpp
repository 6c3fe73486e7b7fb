#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tvflow/baselines.hpp"
#include "tvflow/solver.hpp"

using namespace tvflow;

namespace {

// Long-run subgradient descent on the nLasso objective; an implementation-
// independent reference for small instances. Steps scale with 1/lambda so
// the nonsmooth term does not dominate the early iterations.
double subgradient_oracle(const EmpiricalGraph& g, const TrainingSet& t, double lambda,
                          long iters = 2000000) {
    GraphSignal x(static_cast<std::size_t>(g.num_nodes()), 0.0);
    const std::vector<char> labeled = t.mask(g.num_nodes());
    GraphSignal label_of(static_cast<std::size_t>(g.num_nodes()), 0.0);
    for (std::size_t m = 0; m < t.nodes().size(); ++m)
        label_of[static_cast<std::size_t>(t.nodes()[m])] = t.values()[m];

    double best = nlasso_objective(g, t, x, lambda);
    const double scale = 0.25 / (1.0 + lambda);
    for (long k = 1; k <= iters; ++k) {
        GraphSignal grad(x.size(), 0.0);
        for (int i = 0; i < g.num_nodes(); ++i)
            if (labeled[static_cast<std::size_t>(i)])
                grad[static_cast<std::size_t>(i)] =
                    2.0 * (x[static_cast<std::size_t>(i)] - label_of[static_cast<std::size_t>(i)]);
        for (const auto& e : g.edges()) {
            const double d = x[static_cast<std::size_t>(e.head)] -
                             x[static_cast<std::size_t>(e.tail)];
            const double s = d > 0 ? 1.0 : (d < 0 ? -1.0 : 0.0);
            grad[static_cast<std::size_t>(e.head)] += lambda * e.weight * s;
            grad[static_cast<std::size_t>(e.tail)] -= lambda * e.weight * s;
        }
        const double step = scale / std::sqrt(static_cast<double>(k));
        for (std::size_t i = 0; i < x.size(); ++i) x[i] -= step * grad[i];
        best = std::min(best, nlasso_objective(g, t, x, lambda));
    }
    return best;
}

// Duality-gap certificate for the nLasso pair (x, y): the conjugate of the
// quadratic fidelity gives sum over labeled nodes of (v_i^2/4 - v_i label_i)
// with v = -D^T y, valid when y lies in the lambda box and D^T y vanishes at
// unlabeled nodes. A nonnegative gap near zero certifies optimality.
double nlasso_dual_gap(const EmpiricalGraph& g, const TrainingSet& t, double lambda,
                       const GraphSignal& x, const EdgeVector& y) {
    const GraphSignal dty = incidence_transpose_apply(g, y);
    const std::vector<char> labeled = t.mask(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) {
        if (!labeled[static_cast<std::size_t>(i)])
            REQUIRE(std::abs(dty[static_cast<std::size_t>(i)]) <= 1e-6);
    }
    for (double v : y) REQUIRE(std::abs(v) <= lambda + 1e-12);
    double hstar = 0.0;
    for (std::size_t m = 0; m < t.nodes().size(); ++m) {
        const double v = -dty[static_cast<std::size_t>(t.nodes()[m])];
        hstar += v * v / 4.0 + v * t.values()[m];
    }
    return nlasso_objective(g, t, x, lambda) + hstar;
}

EmpiricalGraph five_path() {
    return EmpiricalGraph(5, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
}

}  // namespace

TEST_CASE("label propagation returns the labels when everything is labeled") {
    const EmpiricalGraph g = testing::two_cluster_graph();
    std::vector<std::pair<int, double>> pairs;
    for (int i = 0; i < 8; ++i) pairs.emplace_back(i, 0.5 * i);
    const TrainingSet t = TrainingSet::from_pairs(pairs);
    const GraphSignal x = solve_lp(g, t);
    for (int i = 0; i < 8; ++i) CHECK(x[static_cast<std::size_t>(i)] == 0.5 * i);
}

TEST_CASE("label propagation interpolates a chain harmonically") {
    const EmpiricalGraph g(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    const TrainingSet t = TrainingSet::from_pairs({{0, 0.0}, {2, 1.0}});
    const GraphSignal x = solve_lp(g, t);
    CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("label propagation solves the squared-weight harmonic system") {
    // two-cluster instance, direct elimination oracle computed externally:
    // x = (1, 11/12, 11/12, 5/6, 1/6, 1/12, 1/12, 0)
    const GraphSignal x = solve_lp(testing::two_cluster_graph(), testing::two_cluster_labels());
    const GraphSignal expected{1.0, 11.0 / 12, 11.0 / 12, 5.0 / 6, 1.0 / 6, 1.0 / 12, 1.0 / 12,
                               0.0};
    for (std::size_t i = 0; i < expected.size(); ++i)
        CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-8));
}

TEST_CASE("label propagation satisfies the harmonic property at unlabeled nodes") {
    Rng rng(31);
    for (int rep = 0; rep < 5; ++rep) {
        const EmpiricalGraph g = testing::random_connected_graph(20, 25, rng);
        const TrainingSet t = TrainingSet::from_pairs(
            {{0, rng.uniform()}, {5, rng.uniform()}, {13, rng.uniform()}}, g.num_nodes());
        const GraphSignal x = solve_lp(g, t);
        const std::vector<char> labeled = t.mask(g.num_nodes());
        for (int i = 0; i < g.num_nodes(); ++i) {
            if (labeled[static_cast<std::size_t>(i)]) continue;
            double num = 0.0, den = 0.0;
            for (const auto& inc : g.incident(i)) {
                const auto& e = g.edge(inc.edge);
                const int j = e.head == i ? e.tail : e.head;
                const double w2 = e.weight * e.weight;
                num += w2 * x[static_cast<std::size_t>(j)];
                den += w2;
            }
            CHECK(std::abs(x[static_cast<std::size_t>(i)] - num / den) <= 1e-7);
        }
    }
}

TEST_CASE("label propagation is optimal for its own objective") {
    const EmpiricalGraph g = testing::two_cluster_graph();
    const TrainingSet t = testing::two_cluster_labels();
    auto lp_objective = [&](const GraphSignal& x) {
        double acc = 0.0;
        for (const auto& e : g.edges()) {
            const double d = x[static_cast<std::size_t>(e.head)] -
                             x[static_cast<std::size_t>(e.tail)];
            acc += e.weight * e.weight * d * d;
        }
        return acc;
    };
    const GraphSignal lp = solve_lp(g, t);
    SolveOptions opts;
    opts.max_iters = 3000;
    opts.gap_tol = 0.0;
    const GraphSignal tv = solve_tvmin(g, t, opts).x_last;
    CHECK(lp_objective(lp) <= lp_objective(tv) + 1e-12);
}

TEST_CASE("label propagation smooths across the boundary, TV does not") {
    const EmpiricalGraph g = testing::two_cluster_graph();
    const TrainingSet t = testing::two_cluster_labels();
    const GraphSignal lp = solve_lp(g, t);
    // boundary nodes 3 and 4 strictly between the cluster values
    CHECK(lp[3] > 0.01);
    CHECK(lp[3] < 1.0 - 0.01);
    CHECK(lp[4] > 0.01);
    CHECK(lp[4] < 1.0 - 0.01);

    SolveOptions opts;
    opts.max_iters = 2000;
    opts.gap_tol = 0.0;
    const GraphSignal tv = solve_tvmin(g, t, opts).x_last;
    CHECK(std::abs(tv[3] - 1.0) <= 1e-5);
    CHECK(std::abs(tv[4] - 0.0) <= 1e-5);
}

TEST_CASE("label propagation rejects unlabeled components") {
    const EmpiricalGraph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}});
    CHECK_THROWS_AS(solve_lp(g, t), std::invalid_argument);
    CHECK_THROWS_AS(solve_lp(g, TrainingSet{}), std::invalid_argument);
}

TEST_CASE("nlasso requires a positive penalty") {
    const EmpiricalGraph g = five_path();
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}});
    NLassoOptions opts;
    opts.lambda = 0.0;
    CHECK_THROWS_AS(solve_nlasso(g, t, opts), std::invalid_argument);
}

TEST_CASE("nlasso with vanishing penalty returns the labels on a fully labeled graph") {
    const EmpiricalGraph g(3, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0}});
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}, {1, 2.0}, {2, 3.0}});
    NLassoOptions opts;
    opts.lambda = 1e-6;
    opts.max_iters = 50000;
    const NLassoResult r = solve_nlasso(g, t, opts);
    for (int i = 0; i < 3; ++i)
        CHECK(std::abs(r.x_last[static_cast<std::size_t>(i)] - (i + 1.0)) <= 1e-4);
}

TEST_CASE("nlasso single edge matches the fused-lasso closed form") {
    const EmpiricalGraph g(2, {{0, 1, 1.0}});
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}, {1, -1.0}});
    NLassoOptions opts;
    opts.lambda = 1e-2;
    opts.max_iters = 100000;
    const NLassoResult r = solve_nlasso(g, t, opts);
    // stationarity: x = (1 - lambda/2, -1 + lambda/2)
    CHECK(std::abs(r.x_last[0] - 0.995) <= 1e-4);
    CHECK(std::abs(r.x_last[1] + 0.995) <= 1e-4);
    CHECK(std::abs(r.x_last[0] - r.x_last[1]) < 2.0);

    // shrinkage is monotone in lambda
    double prev = 0.0;
    for (double lambda : {1e-2, 1e-1, 0.5, 1.0}) {
        NLassoOptions o;
        o.lambda = lambda;
        o.max_iters = 100000;
        const NLassoResult rl = solve_nlasso(g, t, o);
        const double shrink = 1.0 - rl.x_last[0];  // distance from the observed label
        CHECK(shrink > prev - 1e-6);
        prev = shrink;
    }
}

TEST_CASE("nlasso with a huge penalty collapses to the label mean") {
    const EmpiricalGraph g = five_path();
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}, {2, 0.4}, {4, -0.2}});
    NLassoOptions opts;
    opts.lambda = 5.0;  // >= 2 d_max * label range
    opts.max_iters = 200000;
    const NLassoResult r = solve_nlasso(g, t, opts);
    for (double v : r.x_last) CHECK(std::abs(v - 0.4) <= 1e-3);
}

TEST_CASE("nlasso solutions check out against the subgradient oracle and the dual gap") {
    const EmpiricalGraph g = five_path();
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}, {2, 0.4}, {4, -0.2}});
    for (double lambda : {0.05, 0.5, 5.0}) {
        NLassoOptions opts;
        opts.lambda = lambda;
        opts.max_iters = 200000;
        const NLassoResult r = solve_nlasso(g, t, opts);
        const double ours = nlasso_objective(g, t, r.x_last, lambda);
        const double reference = subgradient_oracle(g, t, lambda);
        CHECK(ours <= reference + 1e-3);
        CHECK(std::abs(ours - reference) <= 5e-3);
        // machine-tight optimality certificate for the returned pair
        const double gap = nlasso_dual_gap(g, t, lambda, r.x_last, r.y);
        CHECK(gap >= -1e-10);
        CHECK(gap <= 1e-5);
    }
}

TEST_CASE("some lambda reproduces the TV minimizer on the two-cluster instance") {
    const ConsistencyReport report =
        nlasso_tvmin_consistency(testing::two_cluster_graph(), testing::two_cluster_labels());
    CHECK(report.found);
    CHECK(report.best_error <= 1e-3);
}

TEST_CASE("consistency sweep on a fully labeled instance accepts small lambdas") {
    const EmpiricalGraph g(2, {{0, 1, 1.0}});
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}, {1, 0.0}});
    const ConsistencyReport report = nlasso_tvmin_consistency(g, t);
    CHECK(report.found);
    CHECK(report.lambda <= 1e-3);
}

TEST_CASE("consistency sweep reports not-found for unlabeled components") {
    const EmpiricalGraph g(4, {{0, 1, 1.0}, {2, 3, 1.0}});
    const TrainingSet t = TrainingSet::from_pairs({{0, 1.0}, {1, 0.5}});
    const ConsistencyReport report = nlasso_tvmin_consistency(g, t);
    CHECK_FALSE(report.found);
    CHECK_FALSE(report.note.empty());
}
