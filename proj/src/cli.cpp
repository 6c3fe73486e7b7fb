#include "tvflow/cli.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tvflow/baselines.hpp"
#include "tvflow/bench.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/io.hpp"
#include "tvflow/solver.hpp"

namespace tvflow {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCheckFailed = 3;

struct SolveArgs {
    std::string graph, labels, algorithm = "tvmin";
    double lambda = 1e-2;
    long iters = 2000;
    double gap_tol = 1e-6;
    double lp_tol = 1e-10;
    std::string output_kind = "average";
    std::string out, trace, dual_out, flow_out;
};

struct VerifyArgs {
    std::string graph, labels, partition, out;
    bool exact = false;
    double tol = 1e-9;
};

struct CertArgs {
    std::string graph, labels, estimate, dual, flow_out;
    double gap_tol = 1e-5;
    double feas_tol = 1e-6;
};

struct GenTwoClusterArgs {
    int n_per_cluster = 100;
    double p_edge = 0.3;
    int n_cross = 5;
    double a1 = 0.1, a2 = -0.1;
    std::uint64_t seed = 1;
    std::string out_prefix;
};

struct GenSbmArgs {
    std::vector<int> sizes{10, 10, 10};
    double p_in = 0.85, p_out = 0.1;
    std::vector<double> amplitudes;
    int labels_per_cluster = 5;
    std::uint64_t seed = 1;
    std::string out_prefix;
};

struct ExpArgs {
    std::string config;
    std::string out;
};

nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(path + ": " + ex.what());
    }
    return j;
}

void apply_solver_json(const nlohmann::json& j, SolveOptions& opts) {
    if (j.contains("max_iters")) opts.max_iters = j.at("max_iters").get<long>();
    if (j.contains("gap_tol")) opts.gap_tol = j.at("gap_tol").get<double>();
    if (j.contains("gamma_scale")) opts.gamma_scale = j.at("gamma_scale").get<double>();
}

std::string compact(const nlohmann::json& j) { return j.dump(); }

void write_labels_file(const std::filesystem::path& path, const std::vector<int>& nodes,
                       const GraphSignal& values, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path.string());
    out << "# seed=" << seed << "\n";
    for (std::size_t k = 0; k < nodes.size(); ++k)
        out << nodes[k] << " " << format_double(values[k]) << "\n";
}

void write_generated(const GeneratedInstance& inst, const GraphSignal& x_true,
                     const TrainingSet& t, std::uint64_t seed, const std::string& prefix,
                     std::ostream& out) {
    const std::filesystem::path graph_path = prefix + ".graph";
    {
        std::ofstream f(graph_path);
        if (!f) throw ParseError("cannot write file: " + graph_path.string());
        f << "# seed=" << seed << "\n";
        for (const auto& e : inst.graph.edges())
            f << e.head << " " << e.tail << " " << format_double(e.weight) << "\n";
    }
    const std::filesystem::path part_path = prefix + ".partition";
    {
        std::ofstream f(part_path);
        if (!f) throw ParseError("cannot write file: " + part_path.string());
        f << "# seed=" << seed << "\n";
        for (std::size_t i = 0; i < inst.partition.cluster_of.size(); ++i)
            f << i << " " << inst.partition.cluster_of[i] << "\n";
    }
    std::vector<int> all_nodes(x_true.size());
    for (std::size_t i = 0; i < x_true.size(); ++i) all_nodes[i] = static_cast<int>(i);
    write_labels_file(prefix + ".true", all_nodes, x_true, seed);
    GraphSignal label_values(t.values());
    write_labels_file(prefix + ".labels", t.nodes(), label_values, seed);
    out << "wrote " << graph_path.string() << ", " << part_path.string() << ", " << prefix
        << ".true, " << prefix << ".labels\n";
}

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const EmpiricalGraph g = load_graph(a.graph);
    const TrainingSet t = load_labels(a.labels, g.num_nodes());

    GraphSignal estimate;
    std::optional<SolveResult> solved;
    if (a.algorithm == "tvmin") {
        SolveOptions opts;
        opts.max_iters = a.iters;
        opts.gap_tol = a.gap_tol;
        opts.record_trace = !a.trace.empty();
        solved = solve_tvmin(g, t, opts);
        estimate = a.output_kind == "last" ? solved->x_last : solved->x_bar;
    } else if (a.algorithm == "lp") {
        LpOptions opts;
        opts.tol = a.lp_tol;
        opts.max_iters = a.iters;
        estimate = solve_lp(g, t, opts);
    } else if (a.algorithm == "nlasso") {
        NLassoOptions opts;
        opts.lambda = a.lambda;
        opts.max_iters = a.iters;
        const NLassoResult r = solve_nlasso(g, t, opts);
        estimate = a.output_kind == "last" ? r.x_last : r.x_bar;
    } else {
        err << "unknown algorithm: " << a.algorithm << "\n";
        return kExitUsage;
    }

    write_estimate_csv(a.out, estimate);
    if (solved) {
        if (!a.trace.empty()) write_trace_csv(a.trace, solved->trace);
        if (!a.dual_out.empty()) write_dual_csv(a.dual_out, g, solved->y);
        if (!a.flow_out.empty()) write_flow_csv(a.flow_out, g, dual_to_flow(g, solved->y));
        out << "iterations=" << solved->trace.iterations
            << " gap=" << format_double(solved->trace.final_gap) << "\n";
    }
    return kExitOk;
}

int do_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
    const EmpiricalGraph g = load_graph(a.graph);
    const TrainingSet t = load_labels(a.labels, g.num_nodes());
    const Partition p = load_partition(a.partition, g.num_nodes());

    const auto reports = resolving_check_maxflow(g, p, t, a.tol);
    std::ostringstream csv;
    csv << "cluster,rho,required,pass\n";
    bool all_pass = true;
    for (const auto& r : reports) {
        csv << r.cluster << "," << format_double(r.rho) << "," << format_double(r.required)
            << "," << (r.pass ? 1 : 0) << "\n";
        if (!r.pass) {
            all_pass = false;
            err << "cluster " << r.cluster << " fails"
                << (r.reason.empty() ? "" : ": " + r.reason) << "\n";
        }
    }
    if (a.out.empty()) {
        out << csv.str();
    } else {
        std::ofstream f(a.out);
        if (!f) throw ParseError("cannot write file: " + a.out);
        f << csv.str();
    }

    if (a.exact) {
        // the sign-pattern test is the definition; the max-flow test is
        // only sufficient, so the exact verdict decides when requested
        const bool exact = resolving_check_exact(g, p, t);
        out << "# exact=" << (exact ? "true" : "false") << "\n";
        all_pass = exact;
    }
    out << (all_pass ? "resolving: pass" : "resolving: fail") << "\n";
    return all_pass ? kExitOk : kExitCheckFailed;
}

int do_cert(const CertArgs& a, std::ostream& out, std::ostream& err) {
    const EmpiricalGraph g = load_graph(a.graph);
    const TrainingSet t = load_labels(a.labels, g.num_nodes());
    const GraphSignal estimate = load_estimate_csv(a.estimate, g.num_nodes());
    const EdgeVector y = load_dual_csv(a.dual, g);

    const Flow f = dual_to_flow(g, y);
    const FlowFeasibilityReport feas = check_flow_feasible(g, f, t, a.feas_tol);
    const Certificate cert = certificate_gap(g, t, estimate, y, a.feas_tol);
    const ConstancyReport constancy = unsaturated_constancy_check(g, f, estimate, a.feas_tol);
    if (!a.flow_out.empty()) write_flow_csv(a.flow_out, g, f);

    out << "tv=" << format_double(tv_norm(g, estimate)) << "\n";
    out << "dual_objective=" << format_double(cert.dual_objective) << "\n";
    out << "feasible=" << (feas.ok() ? "true" : "false") << "\n";
    out << "gap=" << format_double(cert.gap) << "\n";
    out << "unsaturated_constancy_violations=" << constancy.violations.size() << "\n";

    if (!feas.ok()) {
        err << "dual infeasible: " << feas.capacity_violations.size() << " capacity, "
            << feas.conservation_violations.size() << " conservation violations\n";
        return kExitCheckFailed;
    }
    if (!(cert.gap <= a.gap_tol)) {
        err << "certificate gap " << format_double(cert.gap) << " exceeds tolerance "
            << format_double(a.gap_tol) << "\n";
        return kExitCheckFailed;
    }
    return kExitOk;
}

int do_gen_two_cluster(const GenTwoClusterArgs& a, std::ostream& out) {
    Rng rng(a.seed);
    const GeneratedInstance inst = gen_two_cluster(a.n_per_cluster, a.p_edge, a.n_cross, rng);
    const GraphSignal x_true =
        piecewise_constant_signal(inst.graph, inst.partition, {a.a1, a.a2});
    const int m0 = rng.uniform_int(0, a.n_per_cluster - 1);
    const int m1 = a.n_per_cluster + rng.uniform_int(0, a.n_per_cluster - 1);
    const TrainingSet t = TrainingSet::from_pairs({{m0, x_true[static_cast<std::size_t>(m0)]},
                                                   {m1, x_true[static_cast<std::size_t>(m1)]}},
                                                  inst.graph.num_nodes());
    write_generated(inst, x_true, t, a.seed, a.out_prefix, out);
    return kExitOk;
}

int do_gen_sbm(const GenSbmArgs& a, std::ostream& out) {
    Rng rng(a.seed);
    const GeneratedInstance inst = gen_sbm(a.sizes, a.p_in, a.p_out, rng);
    std::vector<double> amplitudes = a.amplitudes;
    if (amplitudes.empty()) {
        amplitudes.resize(a.sizes.size());
        for (std::size_t l = 0; l < amplitudes.size(); ++l)
            amplitudes[l] = 0.1 * static_cast<double>(l + 1) *
                            (l % 2 == 0 ? 1.0 : -1.0);  // alternating, distinct per cluster
    }
    if (amplitudes.size() != a.sizes.size())
        throw ParseError("gen sbm: need one amplitude per cluster");
    const GraphSignal x_true = piecewise_constant_signal(inst.graph, inst.partition, amplitudes);

    std::vector<std::pair<int, double>> pairs;
    for (const auto& members : inst.partition.clusters()) {
        if (a.labels_per_cluster > static_cast<int>(members.size()))
            throw ParseError("gen sbm: labels_per_cluster exceeds cluster size");
        std::vector<int> pool = members;
        for (int k = 0; k < a.labels_per_cluster; ++k) {
            const int pick = rng.uniform_int(k, static_cast<int>(pool.size()) - 1);
            std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
            pairs.emplace_back(pool[static_cast<std::size_t>(k)],
                               x_true[static_cast<std::size_t>(pool[static_cast<std::size_t>(k)])]);
        }
    }
    const TrainingSet t = TrainingSet::from_pairs(std::move(pairs), inst.graph.num_nodes());
    write_generated(inst, x_true, t, a.seed, a.out_prefix, out);
    return kExitOk;
}

template <typename WriteFn>
int emit_csv(const std::string& out_path, std::ostream& out, WriteFn&& write) {
    if (out_path.empty()) {
        write(out);
    } else {
        std::ofstream f(out_path);
        if (!f) throw ParseError("cannot write file: " + out_path);
        write(f);
    }
    return kExitOk;
}

int do_exp_two_cluster(const ExpArgs& a, std::ostream& out) {
    const nlohmann::json j = load_json(a.config);
    TwoClusterConfig cfg;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("n_per_cluster")) cfg.n_per_cluster = j.at("n_per_cluster").get<int>();
    if (j.contains("amplitudes")) {
        const auto amps = j.at("amplitudes").get<std::vector<double>>();
        if (amps.size() != 2) throw ParseError(a.config + ": amplitudes must have 2 entries");
        cfg.amplitude_a = amps[0];
        cfg.amplitude_b = amps[1];
    }
    if (j.contains("bucket_width")) cfg.bucket_width = j.at("bucket_width").get<double>();
    if (j.contains("sweep"))
        for (const auto& s : j.at("sweep"))
            cfg.sweep.push_back({s.at("p_edge").get<double>(), s.at("n_cross").get<int>()});
    if (j.contains("solver")) apply_solver_json(j.at("solver"), cfg.solver);

    const TwoClusterResult result = exp_two_cluster(cfg);
    return emit_csv(a.out, out, [&](std::ostream& os) {
        write_two_cluster_csv(os, result, cfg.seed, compact(j));
    });
}

int do_exp_sbm(const ExpArgs& a, std::ostream& out) {
    const nlohmann::json j = load_json(a.config);
    SbmConfig cfg;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
    if (j.contains("cluster_sizes"))
        cfg.cluster_sizes = j.at("cluster_sizes").get<std::vector<int>>();
    if (j.contains("labels_per_cluster"))
        cfg.labels_per_cluster = j.at("labels_per_cluster").get<int>();
    if (j.contains("p_in")) cfg.p_in = j.at("p_in").get<double>();
    if (j.contains("ratios")) cfg.ratios = j.at("ratios").get<std::vector<double>>();
    if (j.contains("amplitudes")) cfg.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (cfg.amplitudes.size() != cfg.cluster_sizes.size()) {
        cfg.amplitudes.resize(cfg.cluster_sizes.size());
        for (std::size_t l = 0; l < cfg.amplitudes.size(); ++l)
            cfg.amplitudes[l] =
                0.1 * static_cast<double>(l + 1) * (l % 2 == 0 ? 1.0 : -1.0);
    }
    if (j.contains("solver")) apply_solver_json(j.at("solver"), cfg.solver);

    const SbmResult result = exp_sbm(cfg);
    return emit_csv(a.out, out,
                    [&](std::ostream& os) { write_sbm_csv(os, result, cfg.seed, compact(j)); });
}

int do_exp_comparison(const ExpArgs& a, std::ostream& out) {
    const nlohmann::json j = load_json(a.config);
    ComparisonConfig cfg;
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("n_per_cluster")) cfg.n_per_cluster = j.at("n_per_cluster").get<int>();
    if (j.contains("p_edge")) cfg.p_edge = j.at("p_edge").get<double>();
    if (j.contains("n_cross")) cfg.n_cross = j.at("n_cross").get<int>();
    if (j.contains("labels_per_cluster"))
        cfg.labels_per_cluster = j.at("labels_per_cluster").get<int>();
    if (j.contains("iters")) cfg.iters = j.at("iters").get<long>();
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();

    const ComparisonResult result = exp_comparison(cfg);
    return emit_csv(a.out, out, [&](std::ostream& os) {
        write_comparison_csv(os, result, cfg.seed, compact(j));
    });
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semi-supervised recovery of piece-wise constant graph signals by "
                 "TV minimization, with network-flow certificates"};
    app.name("tvflow");
    app.require_subcommand(1);

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Recover a signal from labeled nodes");
    solve->add_option("--graph", solve_args.graph, "edge list file")->required();
    solve->add_option("--labels", solve_args.labels, "labels file")->required();
    solve->add_option("--algorithm", solve_args.algorithm, "tvmin|lp|nlasso")
        ->check(CLI::IsMember({"tvmin", "lp", "nlasso"}));
    solve->add_option("--lambda", solve_args.lambda, "nLasso penalty");
    solve->add_option("--iters", solve_args.iters, "iteration budget");
    solve->add_option("--gap-tol", solve_args.gap_tol, "certificate stop tolerance");
    solve->add_option("--lp-tol", solve_args.lp_tol, "CG residual tolerance");
    solve->add_option("--output", solve_args.output_kind, "average|last")
        ->check(CLI::IsMember({"average", "last"}));
    solve->add_option("--out", solve_args.out, "estimate CSV")->required();
    solve->add_option("--trace", solve_args.trace, "trace CSV");
    solve->add_option("--dual-out", solve_args.dual_out, "dual CSV");
    solve->add_option("--flow-out", solve_args.flow_out, "flow dump CSV");

    VerifyArgs verify_args;
    CLI::App* verify = app.add_subcommand("verify", "Check that the labels resolve a partition");
    verify->add_option("--graph", verify_args.graph, "edge list file")->required();
    verify->add_option("--labels", verify_args.labels, "labels file")->required();
    verify->add_option("--partition", verify_args.partition, "partition file")->required();
    verify->add_flag("--exact", verify_args.exact, "also run the exact sign-pattern check");
    verify->add_option("--tol", verify_args.tol, "flow value tolerance");
    verify->add_option("--out", verify_args.out, "report CSV (stdout when omitted)");

    CertArgs cert_args;
    CLI::App* cert = app.add_subcommand("cert", "Certify an estimate with a dual vector");
    cert->add_option("--graph", cert_args.graph, "edge list file")->required();
    cert->add_option("--labels", cert_args.labels, "labels file")->required();
    cert->add_option("--estimate", cert_args.estimate, "estimate CSV")->required();
    cert->add_option("--dual", cert_args.dual, "dual CSV")->required();
    cert->add_option("--gap-tol", cert_args.gap_tol, "pass threshold on the gap");
    cert->add_option("--feas-tol", cert_args.feas_tol, "dual feasibility tolerance");
    cert->add_option("--flow-out", cert_args.flow_out, "flow dump CSV");

    CLI::App* gen = app.add_subcommand("gen", "Generate synthetic instances");
    gen->require_subcommand(1);
    GenTwoClusterArgs gtc;
    CLI::App* gen_tc = gen->add_subcommand("two-cluster", "two Erdos-Renyi clusters");
    gen_tc->add_option("--n-per-cluster", gtc.n_per_cluster);
    gen_tc->add_option("--p-edge", gtc.p_edge);
    gen_tc->add_option("--n-cross", gtc.n_cross);
    gen_tc->add_option("--a1", gtc.a1, "planted value, first cluster");
    gen_tc->add_option("--a2", gtc.a2, "planted value, second cluster");
    gen_tc->add_option("--seed", gtc.seed)->required();
    gen_tc->add_option("--out-prefix", gtc.out_prefix)->required();

    GenSbmArgs gsbm;
    CLI::App* gen_sbm_cmd = gen->add_subcommand("sbm", "stochastic block model");
    gen_sbm_cmd->add_option("--sizes", gsbm.sizes, "cluster sizes")->delimiter(',');
    gen_sbm_cmd->add_option("--p-in", gsbm.p_in);
    gen_sbm_cmd->add_option("--p-out", gsbm.p_out);
    gen_sbm_cmd->add_option("--amplitudes", gsbm.amplitudes)->delimiter(',');
    gen_sbm_cmd->add_option("--labels-per-cluster", gsbm.labels_per_cluster);
    gen_sbm_cmd->add_option("--seed", gsbm.seed)->required();
    gen_sbm_cmd->add_option("--out-prefix", gsbm.out_prefix)->required();

    CLI::App* exp = app.add_subcommand("exp", "Run a reproducible experiment sweep");
    exp->require_subcommand(1);
    ExpArgs exp_tc_args, exp_sbm_args, exp_cmp_args;
    CLI::App* exp_tc = exp->add_subcommand("two-cluster", "NMSE vs cluster connectivity");
    exp_tc->add_option("--config", exp_tc_args.config, "JSON config")->required();
    exp_tc->add_option("--out", exp_tc_args.out, "CSV output (stdout when omitted)");
    CLI::App* exp_sbm_cmd = exp->add_subcommand("sbm", "NMSE vs p_in/p_out");
    exp_sbm_cmd->add_option("--config", exp_sbm_args.config, "JSON config")->required();
    exp_sbm_cmd->add_option("--out", exp_sbm_args.out, "CSV output (stdout when omitted)");
    CLI::App* exp_cmp = exp->add_subcommand("comparison", "tvmin vs lp vs nlasso over iterations");
    exp_cmp->add_option("--config", exp_cmp_args.config, "JSON config")->required();
    exp_cmp->add_option("--out", exp_cmp_args.out, "CSV output (stdout when omitted)");

    std::vector<const char*> argv;
    argv.push_back("tvflow");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            app.exit(e, out, err);
            return kExitOk;
        }
        err << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*solve) return do_solve(solve_args, out, err);
        if (*verify) return do_verify(verify_args, out, err);
        if (*cert) return do_cert(cert_args, out, err);
        if (*gen) {
            if (*gen_tc) return do_gen_two_cluster(gtc, out);
            if (*gen_sbm_cmd) return do_gen_sbm(gsbm, out);
        }
        if (*exp) {
            if (*exp_tc) return do_exp_two_cluster(exp_tc_args, out);
            if (*exp_sbm_cmd) return do_exp_sbm(exp_sbm_args, out);
            if (*exp_cmp) return do_exp_comparison(exp_cmp_args, out);
        }
        err << "no subcommand selected\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {  // config type errors and the like
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
}

}  // namespace tvflow
