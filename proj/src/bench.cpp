#include "tvflow/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "tvflow/baselines.hpp"
#include "tvflow/detail/pd_core.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/io.hpp"

namespace tvflow {

double Rng::uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

int Rng::uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
    const std::uint64_t n = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    const std::uint64_t limit = (std::numeric_limits<std::uint64_t>::max() / n) * n;
    std::uint64_t r;
    do {
        r = eng_();
    } while (r >= limit);
    return lo + static_cast<int>(r % n);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

bool no_isolated(int num_nodes, const std::vector<GraphEdge>& edges) {
    std::vector<char> touched(static_cast<std::size_t>(num_nodes), 0);
    for (const auto& e : edges) {
        touched[static_cast<std::size_t>(e.head)] = 1;
        touched[static_cast<std::size_t>(e.tail)] = 1;
    }
    return std::all_of(touched.begin(), touched.end(), [](char c) { return c != 0; });
}

}  // namespace

std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) + index);
}

GeneratedInstance gen_two_cluster(int n_per_cluster, double p_edge, int n_cross,
                                  std::uint64_t seed, int max_retries) {
    Rng rng(seed);
    return gen_two_cluster(n_per_cluster, p_edge, n_cross, rng, max_retries);
}

GeneratedInstance gen_two_cluster(int n_per_cluster, double p_edge, int n_cross, Rng& rng,
                                  int max_retries) {
    if (n_per_cluster < 1) throw std::invalid_argument("gen_two_cluster: empty cluster");
    if (p_edge < 0.0 || p_edge > 1.0)
        throw std::invalid_argument("gen_two_cluster: p_edge must lie in [0,1]");
    const long long pairs =
        static_cast<long long>(n_per_cluster) * static_cast<long long>(n_per_cluster);
    if (n_cross < 0 || n_cross > pairs)
        throw std::invalid_argument("gen_two_cluster: n_cross out of range");

    const int n = 2 * n_per_cluster;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<GraphEdge> edges;
        for (int c = 0; c < 2; ++c) {
            const int off = c * n_per_cluster;
            for (int i = 0; i < n_per_cluster; ++i)
                for (int j = i + 1; j < n_per_cluster; ++j)
                    if (rng.uniform() < p_edge) edges.push_back({off + i, off + j, 1.0});
        }
        // Distinct cross pairs via a partial shuffle of the pair indices.
        std::vector<int> pair_ids(static_cast<std::size_t>(pairs));
        for (long long k = 0; k < pairs; ++k) pair_ids[static_cast<std::size_t>(k)] = static_cast<int>(k);
        for (int k = 0; k < n_cross; ++k) {
            const int pick = rng.uniform_int(k, static_cast<int>(pairs) - 1);
            std::swap(pair_ids[static_cast<std::size_t>(k)], pair_ids[static_cast<std::size_t>(pick)]);
            const int id = pair_ids[static_cast<std::size_t>(k)];
            edges.push_back({id / n_per_cluster, n_per_cluster + id % n_per_cluster, 1.0});
        }
        if (!no_isolated(n, edges)) continue;

        std::vector<int> cluster_of(static_cast<std::size_t>(n), 0);
        for (int i = n_per_cluster; i < n; ++i) cluster_of[static_cast<std::size_t>(i)] = 1;
        return {EmpiricalGraph(n, std::move(edges)),
                Partition::from_assignments(std::move(cluster_of))};
    }
    throw std::runtime_error("gen_two_cluster: retry budget exhausted (graph keeps isolated nodes)");
}

GeneratedInstance gen_sbm(const std::vector<int>& cluster_sizes, double p_in, double p_out,
                          std::uint64_t seed, int max_retries) {
    Rng rng(seed);
    return gen_sbm(cluster_sizes, p_in, p_out, rng, max_retries);
}

GeneratedInstance gen_sbm(const std::vector<int>& cluster_sizes, double p_in, double p_out,
                          Rng& rng, int max_retries) {
    if (cluster_sizes.empty()) throw std::invalid_argument("gen_sbm: no clusters");
    for (int s : cluster_sizes)
        if (s < 1) throw std::invalid_argument("gen_sbm: empty cluster");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw std::invalid_argument("gen_sbm: probabilities must lie in [0,1]");

    std::vector<int> cluster_of;
    for (std::size_t c = 0; c < cluster_sizes.size(); ++c)
        cluster_of.insert(cluster_of.end(), static_cast<std::size_t>(cluster_sizes[c]),
                          static_cast<int>(c));
    const int n = static_cast<int>(cluster_of.size());

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<GraphEdge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double p = cluster_of[static_cast<std::size_t>(i)] ==
                                         cluster_of[static_cast<std::size_t>(j)]
                                     ? p_in
                                     : p_out;
                if (rng.uniform() < p) edges.push_back({i, j, 1.0});
            }
        if (!no_isolated(n, edges)) continue;
        return {EmpiricalGraph(n, std::move(edges)), Partition::from_assignments(cluster_of)};
    }
    throw std::runtime_error("gen_sbm: retry budget exhausted (graph keeps isolated nodes)");
}

double nmse(const GraphSignal& x_true, const GraphSignal& x_hat) {
    if (x_true.size() != x_hat.size()) throw std::invalid_argument("nmse: size mismatch");
    double err = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < x_true.size(); ++i) {
        const double d = x_true[i] - x_hat[i];
        err += d * d;
        norm += x_true[i] * x_true[i];
    }
    if (norm == 0.0) throw std::invalid_argument("nmse: zero true signal");
    return err / norm;
}

OracleResult tvmin_oracle(const EmpiricalGraph& g, const TrainingSet& t, int max_unlabeled,
                          int max_values) {
    if (t.empty()) throw std::invalid_argument("tvmin_oracle: empty training set");
    t.validate_for(g);

    std::vector<double> values = t.values();
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    if (static_cast<int>(values.size()) > max_values)
        throw std::invalid_argument("tvmin_oracle: " + std::to_string(values.size()) +
                                    " distinct label values (limit " +
                                    std::to_string(max_values) + ")");

    const std::vector<char> labeled = t.mask(g.num_nodes());
    std::vector<int> unlabeled;
    for (int i = 0; i < g.num_nodes(); ++i)
        if (!labeled[static_cast<std::size_t>(i)]) unlabeled.push_back(i);
    if (static_cast<int>(unlabeled.size()) > max_unlabeled)
        throw std::invalid_argument("tvmin_oracle: " + std::to_string(unlabeled.size()) +
                                    " unlabeled nodes (limit " + std::to_string(max_unlabeled) +
                                    ")");

    GraphSignal x(static_cast<std::size_t>(g.num_nodes()), 0.0);
    detail::clamp_labels(x, t);

    OracleResult best;
    best.tv = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> assign(unlabeled.size(), 0);
    while (true) {
        for (std::size_t u = 0; u < unlabeled.size(); ++u)
            x[static_cast<std::size_t>(unlabeled[u])] = values[assign[u]];
        const double tv = tv_norm(g, x);
        if (tv < best.tv) {
            best.tv = tv;
            best.x = x;
        }
        // Odometer step over assignments.
        std::size_t pos = 0;
        while (pos < assign.size()) {
            if (++assign[pos] < values.size()) break;
            assign[pos] = 0;
            ++pos;
        }
        if (pos == assign.size()) break;
    }
    return best;
}

SolveOptions TwoClusterConfig::experiment_solver_defaults() {
    SolveOptions opts;
    opts.max_iters = 3000;
    opts.gap_tol = 0.0;  // fixed iteration budget
    opts.record_trace = false;
    return opts;
}

namespace {

double mean_rho(const std::vector<ClusterResolvingReport>& reports) {
    double acc = 0.0;
    for (const auto& r : reports) acc += r.rho;
    return acc / static_cast<double>(reports.size());
}

}  // namespace

TwoClusterResult exp_two_cluster(const TwoClusterConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("exp_two_cluster: trials must be >= 1");
    if (!(cfg.bucket_width > 0.0))
        throw std::invalid_argument("exp_two_cluster: bucket_width must be positive");
    // Sparser settings than p = 0.05 keep isolated nodes almost surely at
    // this cluster size and would exhaust the regeneration budget.
    std::vector<TwoClusterSetting> sweep = cfg.sweep;
    if (sweep.empty())
        sweep = {{0.30, 4},  {0.25, 8},  {0.20, 14}, {0.16, 22},
                 {0.12, 34}, {0.08, 55}, {0.05, 85}};

    TwoClusterResult result;
    std::map<long, std::pair<double, std::pair<double, int>>> buckets;  // id -> (rho sum, (nmse sum, n))

    for (std::size_t s = 0; s < sweep.size(); ++s) {
        for (int trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t stream =
                derive_stream(cfg.seed, s * static_cast<std::size_t>(cfg.trials) +
                                            static_cast<std::size_t>(trial));
            Rng rng(stream);
            GeneratedInstance inst =
                gen_two_cluster(cfg.n_per_cluster, sweep[s].p_edge, sweep[s].n_cross, rng);

            const GraphSignal x_true = piecewise_constant_signal(
                inst.graph, inst.partition, {cfg.amplitude_a, cfg.amplitude_b});
            const int m0 = rng.uniform_int(0, cfg.n_per_cluster - 1);
            const int m1 = cfg.n_per_cluster + rng.uniform_int(0, cfg.n_per_cluster - 1);
            const TrainingSet t = TrainingSet::from_pairs(
                {{m0, x_true[static_cast<std::size_t>(m0)]},
                 {m1, x_true[static_cast<std::size_t>(m1)]}},
                inst.graph.num_nodes());

            const double rho_bar = mean_rho(resolving_check_maxflow(inst.graph, inst.partition, t));
            const SolveResult solved = solve_tvmin(inst.graph, t, cfg.solver);
            const double err = nmse(x_true, solved.x_bar);

            result.trials.push_back({static_cast<int>(s), trial, rho_bar, err});
            if (std::isfinite(rho_bar)) {
                auto& b = buckets[static_cast<long>(std::floor(rho_bar / cfg.bucket_width))];
                b.first += rho_bar;
                b.second.first += err;
                b.second.second += 1;
            }
        }
    }
    for (const auto& [id, acc] : buckets) {
        const int count = acc.second.second;
        result.buckets.push_back(
            {acc.first / count, acc.second.first / count, count});
    }
    return result;
}

SbmResult exp_sbm(const SbmConfig& cfg) {
    if (cfg.trials < 1) throw std::invalid_argument("exp_sbm: trials must be >= 1");
    if (cfg.amplitudes.size() != cfg.cluster_sizes.size())
        throw std::invalid_argument("exp_sbm: one amplitude per cluster required");
    for (int s : cfg.cluster_sizes)
        if (cfg.labels_per_cluster < 1 || cfg.labels_per_cluster > s)
            throw std::invalid_argument("exp_sbm: labels_per_cluster out of range");

    SbmResult result;
    for (std::size_t ri = 0; ri < cfg.ratios.size(); ++ri) {
        const double ratio = cfg.ratios[ri];
        if (!(ratio > 0.0)) throw std::invalid_argument("exp_sbm: ratios must be positive");
        const double p_out = cfg.p_in / ratio;
        if (p_out > 1.0) throw std::invalid_argument("exp_sbm: p_out exceeds 1 at ratio " +
                                                     std::to_string(ratio));

        double nmse_sum = 0.0;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t stream =
                derive_stream(cfg.seed, ri * static_cast<std::size_t>(cfg.trials) +
                                            static_cast<std::size_t>(trial));
            Rng rng(stream);
            GeneratedInstance inst = gen_sbm(cfg.cluster_sizes, cfg.p_in, p_out, rng);
            const GraphSignal x_true =
                piecewise_constant_signal(inst.graph, inst.partition, cfg.amplitudes);

            // labels_per_cluster distinct nodes per cluster
            std::vector<std::pair<int, double>> pairs;
            const auto clusters = inst.partition.clusters();
            for (const auto& members : clusters) {
                std::vector<int> pool = members;
                for (int k = 0; k < cfg.labels_per_cluster; ++k) {
                    const int pick = rng.uniform_int(k, static_cast<int>(pool.size()) - 1);
                    std::swap(pool[static_cast<std::size_t>(k)],
                              pool[static_cast<std::size_t>(pick)]);
                    const int node = pool[static_cast<std::size_t>(k)];
                    pairs.emplace_back(node, x_true[static_cast<std::size_t>(node)]);
                }
            }
            const TrainingSet t =
                TrainingSet::from_pairs(std::move(pairs), inst.graph.num_nodes());

            const SolveResult solved = solve_tvmin(inst.graph, t, cfg.solver);
            nmse_sum += nmse(x_true, solved.x_bar);
        }

        const std::vector<int> labeled_per(cfg.cluster_sizes.size(), cfg.labels_per_cluster);
        const std::vector<double> margins =
            sbm_condition(cfg.cluster_sizes, labeled_per, cfg.p_in, p_out);
        result.rows.push_back({ratio, nmse_sum / cfg.trials,
                               *std::min_element(margins.begin(), margins.end())});
    }
    return result;
}

ComparisonResult exp_comparison(const ComparisonConfig& cfg) {
    if (cfg.iters < 1) throw std::invalid_argument("exp_comparison: iters must be >= 1");
    Rng rng(derive_stream(cfg.seed, 0));
    GeneratedInstance inst = gen_two_cluster(cfg.n_per_cluster, cfg.p_edge, cfg.n_cross, rng);
    const GraphSignal x_true = piecewise_constant_signal(inst.graph, inst.partition,
                                                         {cfg.amplitude_a, cfg.amplitude_b});

    std::vector<std::pair<int, double>> pairs;
    for (int c = 0; c < 2; ++c) {
        std::vector<int> pool(static_cast<std::size_t>(cfg.n_per_cluster));
        for (int i = 0; i < cfg.n_per_cluster; ++i)
            pool[static_cast<std::size_t>(i)] = c * cfg.n_per_cluster + i;
        for (int k = 0; k < cfg.labels_per_cluster; ++k) {
            const int pick = rng.uniform_int(k, cfg.n_per_cluster - 1);
            std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
            const int node = pool[static_cast<std::size_t>(k)];
            pairs.emplace_back(node, x_true[static_cast<std::size_t>(node)]);
        }
    }
    const TrainingSet t = TrainingSet::from_pairs(std::move(pairs), inst.graph.num_nodes());
    const EmpiricalGraph& g = inst.graph;

    std::vector<double> tv_curve(static_cast<std::size_t>(cfg.iters));
    {
        const ScalingFactors s = ScalingFactors::standard(g);
        SolverState state = SolverState::zeros(g);
        for (long k = 0; k < cfg.iters; ++k) {
            pd_iterate(state, g, t, s);
            tv_curve[static_cast<std::size_t>(k)] = nmse(x_true, state.x_bar);
        }
    }

    std::vector<double> nl_curve(static_cast<std::size_t>(cfg.iters));
    {
        const ScalingFactors s = ScalingFactors::standard(g);
        SolverState state = SolverState::zeros(g);
        const auto& mnodes = t.nodes();
        const auto& mvalues = t.values();
        auto prox = [&](GraphSignal& x) {
            for (std::size_t m = 0; m < mnodes.size(); ++m) {
                const auto i = static_cast<std::size_t>(mnodes[m]);
                const double two_gamma = 2.0 * s.gamma[i];
                x[i] = (x[i] + two_gamma * mvalues[m]) / (1.0 + two_gamma);
            }
        };
        for (long k = 0; k < cfg.iters; ++k) {
            detail::pd_step(g, s.gamma, cfg.lambda, state, prox);
            nl_curve[static_cast<std::size_t>(k)] = nmse(x_true, state.x_bar);
        }
    }

    std::vector<double> lp_curve;
    lp_curve.reserve(static_cast<std::size_t>(cfg.iters));
    LpOptions lp_opts;
    lp_opts.max_iters = cfg.iters;
    const GraphSignal lp_final =
        solve_lp(g, t, lp_opts, [&](long, const GraphSignal& snapshot) {
            if (static_cast<long>(lp_curve.size()) < cfg.iters)
                lp_curve.push_back(nmse(x_true, snapshot));
        });
    const double lp_last = lp_curve.empty() ? nmse(x_true, lp_final) : lp_curve.back();
    while (static_cast<long>(lp_curve.size()) < cfg.iters) lp_curve.push_back(lp_last);

    ComparisonResult result;
    for (long k = 0; k < cfg.iters; ++k)
        result.rows.push_back({k + 1, tv_curve[static_cast<std::size_t>(k)],
                               lp_curve[static_cast<std::size_t>(k)],
                               nl_curve[static_cast<std::size_t>(k)]});
    return result;
}

namespace {

void write_header(std::ostream& out, std::uint64_t seed, const std::string& config_comment) {
    out << "# seed=" << seed << "\n";
    out << "# config=" << config_comment << "\n";
}

}  // namespace

void write_two_cluster_csv(std::ostream& out, const TwoClusterResult& result,
                           std::uint64_t seed, const std::string& config_comment) {
    write_header(out, seed, config_comment);
    out << "rho,nmse\n";
    for (const auto& b : result.buckets)
        out << format_double(b.rho_mean) << "," << format_double(b.nmse_mean) << "\n";
}

void write_sbm_csv(std::ostream& out, const SbmResult& result, std::uint64_t seed,
                   const std::string& config_comment) {
    write_header(out, seed, config_comment);
    out << "ratio,nmse,margin\n";
    for (const auto& r : result.rows)
        out << format_double(r.ratio) << "," << format_double(r.nmse_mean) << ","
            << format_double(r.margin) << "\n";
}

void write_comparison_csv(std::ostream& out, const ComparisonResult& result, std::uint64_t seed,
                          const std::string& config_comment) {
    write_header(out, seed, config_comment);
    out << "k,nmse_tvmin,nmse_lp,nmse_nlasso\n";
    for (const auto& r : result.rows)
        out << r.k << "," << format_double(r.nmse_tvmin) << "," << format_double(r.nmse_lp)
            << "," << format_double(r.nmse_nlasso) << "\n";
}

}  // namespace tvflow
