// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tvflow/bench.hpp"
#include "tvflow/baselines.hpp"
#include "tvflow/cli.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/mp.hpp"
#include "tvflow/solver.hpp"

using namespace tvflow;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int id;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

// Shared corpus for criteria 3 and 10: fifty random instances with at most
// ten unlabeled nodes and three distinct label values, solved to a tight
// certificate.
struct OracleRun {
    double tv_error;          // |TV(x_bar) - oracle TV|
    double flow_gap;          // TV(x_bar) - dual objective of the flow
    bool flow_feasible;
    double max_unsat_jump;    // max |x_head - x_tail| over unsaturated edges
};

std::vector<OracleRun> run_oracle_suite() {
    std::vector<OracleRun> runs;
    Rng rng(987654321);
    while (runs.size() < 50) {
        const int n = rng.uniform_int(8, 14);
        const EmpiricalGraph g = testing::random_connected_graph(n, rng.uniform_int(2, n), rng);
        const double values[3] = {0.0, 0.5, 1.0};
        const int num_unlabeled = rng.uniform_int(2, std::min(10, n - 1));
        std::set<int> unlabeled;
        while (static_cast<int>(unlabeled.size()) < num_unlabeled)
            unlabeled.insert(rng.uniform_int(0, n - 1));
        std::vector<std::pair<int, double>> pairs;
        for (int i = 0; i < n; ++i)
            if (!unlabeled.count(i)) pairs.emplace_back(i, values[rng.uniform_int(0, 2)]);
        const TrainingSet t = TrainingSet::from_pairs(pairs, n);

        const OracleResult oracle = tvmin_oracle(g, t);
        SolveOptions opts;
        opts.max_iters = 4000000;
        opts.gap_tol = 5e-7;
        opts.gap_check_interval = 32;
        opts.record_trace = false;
        const SolveResult solved = solve_tvmin(g, t, opts);

        OracleRun run{};
        run.tv_error = std::abs(tv_norm(g, solved.x_bar) - oracle.tv);

        const Flow f = dual_to_flow(g, solved.y);
        run.flow_feasible = check_flow_feasible(g, f, t, 1e-6).ok();
        run.flow_gap = run.flow_feasible
                           ? tv_norm(g, solved.x_bar) - dual_objective(g, t, f, 1e-6)
                           : std::numeric_limits<double>::infinity();

        run.max_unsat_jump = 0.0;
        for (int e = 0; e < g.num_edges(); ++e) {
            if (std::abs(solved.y[static_cast<std::size_t>(e)]) >= 0.999) continue;
            const auto& ge = g.edge(e);
            run.max_unsat_jump =
                std::max(run.max_unsat_jump,
                         std::abs(solved.x_last[static_cast<std::size_t>(ge.head)] -
                                  solved.x_last[static_cast<std::size_t>(ge.tail)]));
        }
        runs.push_back(run);
    }
    return runs;
}

const std::vector<OracleRun>& oracle_suite() {
    static const std::vector<OracleRun> runs = run_oracle_suite();
    return runs;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Criterion criterion_1() {
    Criterion c{1, "exact recovery on the two-cluster instance", false, "", 0};
    const EmpiricalGraph g = testing::two_cluster_graph();
    const TrainingSet t = testing::two_cluster_labels();
    const GraphSignal planted = testing::two_cluster_planted();

    SolveOptions opts;
    opts.max_iters = 2000;
    opts.gap_tol = 0.0;
    opts.record_trace = false;
    const SolveResult r = solve_tvmin(g, t, opts);
    double err_last = 0.0;
    for (std::size_t i = 0; i < planted.size(); ++i)
        err_last = std::max(err_last, std::abs(r.x_last[i] - planted[i]));

    // cross-check on the averaged output with the budget the O(1/K) rate needs
    SolveOptions avg_opts;
    avg_opts.max_iters = 2000000;
    avg_opts.gap_tol = 1e-8;
    avg_opts.gap_check_interval = 64;
    avg_opts.record_trace = false;
    const SolveResult ravg = solve_tvmin(g, t, avg_opts);
    double err_avg = 0.0;
    for (std::size_t i = 0; i < planted.size(); ++i)
        err_avg = std::max(err_avg, std::abs(ravg.x_bar[i] - planted[i]));

    c.pass = err_last <= 1e-5 && err_avg <= 1e-5;
    c.detail = "last-iterate err " + fmt(err_last) + " after <=2000 iters, averaged err " +
               fmt(err_avg) + " after convergence";
    return c;
}

Criterion criterion_2() {
    Criterion c{2, "resolving verification on the two-cluster instance", false, "", 0};
    const fs::path dir = fs::temp_directory_path() / "tvflow_acceptance";
    fs::create_directories(dir);
    const fs::path graph = dir / "fig.graph";
    const fs::path labels = dir / "fig.labels";
    const fs::path partition = dir / "fig.partition";
    std::ofstream(graph) << "0 1 1\n0 2 1\n1 2 1\n1 3 1\n2 3 1\n3 4 0.5\n"
                            "4 5 1\n4 6 1\n5 6 1\n5 7 1\n6 7 1\n";
    std::ofstream(labels) << "0 1.0\n7 0.0\n";
    {
        std::ofstream p(partition);
        for (int i = 0; i < 8; ++i) p << i << " " << (i < 4 ? 0 : 1) << "\n";
    }

    std::ostringstream out, err;
    const int code = run_cli({"verify", "--graph", graph.string(), "--labels", labels.string(),
                              "--partition", partition.string()},
                             out, err);

    const auto reports = resolving_check_maxflow(testing::two_cluster_graph(),
                                                 testing::two_cluster_partition(),
                                                 testing::two_cluster_labels());
    const bool required_ok = reports.size() == 2 &&
                             std::abs(reports[0].required - 1.0) <= 1e-12 &&
                             std::abs(reports[1].required - 1.0) <= 1e-12 &&
                             reports[0].pass && reports[1].pass;
    const bool exact = resolving_check_exact(testing::two_cluster_graph(),
                                             testing::two_cluster_partition(),
                                             testing::two_cluster_labels());
    c.pass = code == 0 && required_ok && exact;
    c.detail = "verify exit " + std::to_string(code) + ", required value 1.0 per cluster, exact check " +
               (exact ? "agrees" : "disagrees");
    return c;
}

Criterion criterion_3() {
    Criterion c{3, "oracle equivalence with flow certificates (50 instances)", false, "", 0};
    double worst_tv = 0.0, worst_gap = 0.0;
    bool feasible = true;
    for (const OracleRun& run : oracle_suite()) {
        worst_tv = std::max(worst_tv, run.tv_error);
        worst_gap = std::max(worst_gap, run.flow_gap);
        feasible = feasible && run.flow_feasible;
    }
    c.pass = feasible && worst_tv <= 1e-5 && worst_gap <= 1e-5;
    c.detail = "max |TV - oracle| " + fmt(worst_tv) + ", max certificate gap " + fmt(worst_gap);
    return c;
}

Criterion criterion_4() {
    Criterion c{4, "message passing reproduces the solver (20 graphs, 200 rounds)", false, "", 0};
    Rng rng(24680);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const int n = rng.uniform_int(20, 100);
        const int max_extra = std::min(3 * n, 400 - (n - 1));
        const EmpiricalGraph g =
            testing::random_connected_graph(n, rng.uniform_int(0, max_extra), rng);
        std::vector<std::pair<int, double>> pairs;
        for (int i = 0; i < n; ++i)
            if (rng.uniform() < 0.25) pairs.emplace_back(i, rng.uniform() * 2 - 1);
        if (pairs.empty()) pairs.emplace_back(0, 1.0);
        const TrainingSet t = TrainingSet::from_pairs(pairs, n);

        const ScalingFactors s = ScalingFactors::standard(g);
        SolverState st = SolverState::zeros(g);
        MessagePassingNetwork net(g, t);
        for (int k = 0; k < 200; ++k) {
            pd_iterate(st, g, t, s);
            net.run_round();
            const GraphSignal mx = net.x_last();
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(mx[static_cast<std::size_t>(i)] -
                                                 st.x_cur[static_cast<std::size_t>(i)]));
        }
    }
    c.pass = worst <= 1e-12;
    c.detail = "max trajectory difference " + fmt(worst);
    return c;
}

Criterion criterion_5() {
    Criterion c{5, "O(1/K) averaged convergence on a 50-node chain", false, "", 0};
    std::vector<GraphEdge> edges;
    for (int i = 0; i + 1 < 50; ++i) edges.push_back({i, i + 1, 1.0});
    const EmpiricalGraph g(50, edges);
    const TrainingSet t = TrainingSet::from_pairs({{0, 0.0}, {49, 1.0}});

    SolveOptions opts;
    opts.max_iters = 2000;
    opts.gap_tol = 0.0;
    const SolveResult r = solve_tvmin(g, t, opts);

    const double tv_opt = 1.0;  // label spread bounds the chain TV from below
    double at_100 = 0.0, worst = 0.0;
    for (const auto& rec : r.trace.records) {
        if (rec.k < 10) continue;
        const double value = static_cast<double>(rec.k) * (rec.tv_bar - tv_opt);
        if (rec.k == 100) at_100 = value;
        if (rec.k >= 100) worst = std::max(worst, value);
    }
    // the fp-noise floor keeps the 2x comparison meaningful when the
    // sequence is numerically zero
    c.pass = worst <= 2.0 * at_100 + 1e-9;
    c.detail = "K*(TV-opt) at K=100: " + fmt(at_100) + ", max over K>=100: " + fmt(worst);
    return c;
}

Criterion criterion_6() {
    Criterion c{6, "max-flow equals exhaustive min-cut (50 problems)", false, "", 0};
    Rng rng(13579);
    int exact_matches = 0;
    for (int rep = 0; rep < 50; ++rep) {
        FlowProblem p;
        p.num_nodes = rng.uniform_int(2, 8);
        p.source = rng.uniform_int(0, p.num_nodes - 1);
        do {
            p.sink = rng.uniform_int(0, p.num_nodes - 1);
        } while (p.sink == p.source);
        const int arcs = rng.uniform_int(1, 2 * p.num_nodes + 4);
        for (int a = 0; a < arcs; ++a) {
            const int u = rng.uniform_int(0, p.num_nodes - 1);
            const int v = rng.uniform_int(0, p.num_nodes - 1);
            if (u != v) p.arcs.push_back({u, v, 0.25 * rng.uniform_int(0, 20)});
        }

        double best = std::numeric_limits<double>::infinity();
        for (unsigned mask = 0; mask < (1u << p.num_nodes); ++mask) {
            if (!((mask >> p.source) & 1u) || ((mask >> p.sink) & 1u)) continue;
            double cut = 0.0;
            for (const auto& arc : p.arcs)
                if (((mask >> arc.from) & 1u) && !((mask >> arc.to) & 1u)) cut += arc.capacity;
            best = std::min(best, cut);
        }
        if (max_flow(p).value == best) ++exact_matches;
    }
    c.pass = exact_matches == 50;
    c.detail = std::to_string(exact_matches) + "/50 exact";
    return c;
}

Criterion criterion_7() {
    Criterion c{7, "two-cluster sweep: NMSE bands vs connectivity", false, "", 0};
    TwoClusterConfig cfg;
    cfg.seed = 18102019;
    cfg.trials = 10;
    cfg.n_per_cluster = 100;
    const TwoClusterResult result = exp_two_cluster(cfg);

    double high_sum = 0.0, low_sum = 0.0;
    int high_n = 0, low_n = 0;
    for (const auto& trial : result.trials) {
        if (!std::isfinite(trial.rho_bar)) continue;
        if (trial.rho_bar >= 2.0) {
            high_sum += trial.nmse_value;
            ++high_n;
        } else if (trial.rho_bar <= 0.5) {
            low_sum += trial.nmse_value;
            ++low_n;
        }
    }
    const double high_mean = high_n ? high_sum / high_n : 1.0;
    const double low_mean = low_n ? low_sum / low_n : 0.0;
    c.pass = high_n >= 10 && low_n >= 10 && high_mean <= 0.05 && low_mean >= 0.2;
    c.detail = "mean NMSE " + fmt(high_mean) + " over " + std::to_string(high_n) +
               " trials at rho>=2; " + fmt(low_mean) + " over " + std::to_string(low_n) +
               " trials at rho<=0.5";
    return c;
}

Criterion criterion_8() {
    Criterion c{8, "SBM sweep: NMSE bands vs p_in/p_out", false, "", 0};
    SbmConfig cfg;
    cfg.seed = 20102019;
    cfg.trials = 100;
    cfg.ratios = {2.0, 12.0};
    const SbmResult result = exp_sbm(cfg);
    const double at_2 = result.rows[0].nmse_mean;
    const double at_12 = result.rows[1].nmse_mean;
    c.pass = at_12 <= 0.05 && at_2 >= 0.3;
    c.detail = "mean NMSE " + fmt(at_12) + " at ratio 12, " + fmt(at_2) + " at ratio 2";
    return c;
}

Criterion criterion_9() {
    Criterion c{9, "label propagation smooths the boundary, TV-min keeps it sharp", false, "", 0};
    const EmpiricalGraph g = testing::two_cluster_graph();
    const TrainingSet t = testing::two_cluster_labels();

    const GraphSignal lp = solve_lp(g, t);
    const double spread = 1.0;  // |a1 - a2|
    const double margin3 = std::min(1.0 - lp[3], lp[3] - 0.0);
    const double margin4 = std::min(1.0 - lp[4], lp[4] - 0.0);

    SolveOptions opts;
    opts.max_iters = 2000;
    opts.gap_tol = 0.0;
    opts.record_trace = false;
    const SolveResult tv = solve_tvmin(g, t, opts);
    const double tv_err =
        std::max(std::abs(tv.x_last[3] - 1.0), std::abs(tv.x_last[4] - 0.0));

    c.pass = margin3 >= 0.01 * spread && margin4 >= 0.01 * spread && tv_err <= 1e-5;
    c.detail = "LP boundary margins " + fmt(margin3) + "/" + fmt(margin4) +
               ", TV boundary error " + fmt(tv_err);
    return c;
}

Criterion criterion_10() {
    Criterion c{10, "unsaturated edges carry no signal jump (criterion-3 corpus)", false, "", 0};
    double worst = 0.0;
    for (const OracleRun& run : oracle_suite()) worst = std::max(worst, run.max_unsat_jump);
    c.pass = worst <= 1e-5;
    c.detail = "max endpoint difference on edges with |y| < 0.999: " + fmt(worst);
    return c;
}

}  // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    std::vector<Criterion (*)()> criteria = {
        criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
        criterion_6, criterion_7, criterion_8, criterion_9, criterion_10,
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto* fn = criteria[i];
        const auto start = Clock::now();
        Criterion c;
        try {
            c = fn();
        } catch (const std::exception& e) {
            c.id = static_cast<int>(i) + 1;
            c.name = "(aborted)";
            c.pass = false;
            c.detail = std::string("exception: ") + e.what();
        }
        c.seconds = std::chrono::duration<double>(Clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%s; %.2f s)\n", c.pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), c.detail.c_str(), c.seconds);
        std::fflush(stdout);
        if (!c.pass) ++failures;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
