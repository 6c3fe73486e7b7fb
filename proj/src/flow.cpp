#include "tvflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "tvflow/io.hpp"

namespace tvflow {

namespace {

constexpr double kResidualEps = 1e-9;

void check_flow_size(const EmpiricalGraph& g, const Flow& f) {
    if (f.size() != static_cast<std::size_t>(g.num_edges()))
        throw std::invalid_argument("flow length does not match graph edge count");
}

// Residual-arc pool shared by every max-flow call site.
struct ResidualGraph {
    std::vector<std::vector<int>> head;  // per node: arc indices
    std::vector<int> to;
    std::vector<double> cap;

    explicit ResidualGraph(int num_nodes) : head(static_cast<std::size_t>(num_nodes)) {}

    // Arc index of the forward arc; the paired reverse arc is index ^ 1.
    int add_arc(int from, int to_node, double capacity) {
        const int idx = static_cast<int>(to.size());
        head[static_cast<std::size_t>(from)].push_back(idx);
        to.push_back(to_node);
        cap.push_back(capacity);
        head[static_cast<std::size_t>(to_node)].push_back(idx + 1);
        to.push_back(from);
        cap.push_back(0.0);
        return idx;
    }

    double run(int s, int t) {
        const int n = static_cast<int>(head.size());
        double value = 0.0;
        std::vector<int> parent_arc(static_cast<std::size_t>(n));
        while (true) {
            std::fill(parent_arc.begin(), parent_arc.end(), -1);
            parent_arc[static_cast<std::size_t>(s)] = -2;
            std::deque<int> queue{s};
            while (!queue.empty() && parent_arc[static_cast<std::size_t>(t)] == -1) {
                const int u = queue.front();
                queue.pop_front();
                for (int a : head[static_cast<std::size_t>(u)]) {
                    const int v = to[static_cast<std::size_t>(a)];
                    if (cap[static_cast<std::size_t>(a)] > kResidualEps &&
                        parent_arc[static_cast<std::size_t>(v)] == -1) {
                        parent_arc[static_cast<std::size_t>(v)] = a;
                        queue.push_back(v);
                    }
                }
            }
            if (parent_arc[static_cast<std::size_t>(t)] == -1) break;
            double aug = std::numeric_limits<double>::infinity();
            for (int v = t; v != s;) {
                const int a = parent_arc[static_cast<std::size_t>(v)];
                aug = std::min(aug, cap[static_cast<std::size_t>(a)]);
                v = to[static_cast<std::size_t>(a ^ 1)];
            }
            for (int v = t; v != s;) {
                const int a = parent_arc[static_cast<std::size_t>(v)];
                cap[static_cast<std::size_t>(a)] -= aug;
                cap[static_cast<std::size_t>(a ^ 1)] += aug;
                v = to[static_cast<std::size_t>(a ^ 1)];
            }
            value += aug;
        }
        return value;
    }

    std::vector<char> reachable_from(int s) const {
        std::vector<char> seen(head.size(), 0);
        seen[static_cast<std::size_t>(s)] = 1;
        std::deque<int> queue{s};
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int a : head[static_cast<std::size_t>(u)]) {
                const int v = to[static_cast<std::size_t>(a)];
                if (cap[static_cast<std::size_t>(a)] > kResidualEps &&
                    !seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = 1;
                    queue.push_back(v);
                }
            }
        }
        return seen;
    }
};

}  // namespace

Flow dual_to_flow(const EmpiricalGraph& g, const EdgeVector& y) {
    if (y.size() != static_cast<std::size_t>(g.num_edges()))
        throw std::invalid_argument("dual_to_flow: size mismatch");
    Flow f(y.size());
    for (int e = 0; e < g.num_edges(); ++e)
        f[static_cast<std::size_t>(e)] = g.edge(e).weight * y[static_cast<std::size_t>(e)];
    return f;
}

GraphSignal divergence(const EmpiricalGraph& g, const Flow& f) {
    check_flow_size(g, f);
    GraphSignal v(static_cast<std::size_t>(g.num_nodes()), 0.0);
    for (int i = 0; i < g.num_nodes(); ++i) {
        double acc = 0.0;
        for (const auto& inc : g.incident(i))
            acc += inc.sign * f[static_cast<std::size_t>(inc.edge)];
        v[static_cast<std::size_t>(i)] = acc;
    }
    return v;
}

FlowFeasibilityReport check_flow_feasible(const EmpiricalGraph& g, const Flow& f,
                                          const TrainingSet& t,
                                          const std::vector<int>& cap_edges, double tol) {
    check_flow_size(g, f);
    FlowFeasibilityReport report;
    for (int e : cap_edges) {
        if (e < 0 || e >= g.num_edges())
            throw std::invalid_argument("check_flow_feasible: edge id out of range");
        const double excess = std::abs(f[static_cast<std::size_t>(e)]) - g.edge(e).weight;
        if (excess > tol) {
            report.capacity_violations.push_back(e);
            report.max_capacity_excess = std::max(report.max_capacity_excess, excess);
        }
    }
    const GraphSignal v = divergence(g, f);
    const std::vector<char> labeled = t.mask(g.num_nodes());
    for (int i = 0; i < g.num_nodes(); ++i) {
        if (labeled[static_cast<std::size_t>(i)]) continue;
        const double viol = std::abs(v[static_cast<std::size_t>(i)]);
        if (viol > tol) {
            report.conservation_violations.push_back(i);
            report.max_conservation_violation = std::max(report.max_conservation_violation, viol);
        }
    }
    return report;
}

FlowFeasibilityReport check_flow_feasible(const EmpiricalGraph& g, const Flow& f,
                                          const TrainingSet& t, double tol) {
    std::vector<int> all(static_cast<std::size_t>(g.num_edges()));
    for (int e = 0; e < g.num_edges(); ++e) all[static_cast<std::size_t>(e)] = e;
    return check_flow_feasible(g, f, t, all, tol);
}

double dual_objective(const EmpiricalGraph& g, const TrainingSet& t, const Flow& f, double tol) {
    const FlowFeasibilityReport report = check_flow_feasible(g, f, t, tol);
    if (!report.ok())
        throw std::invalid_argument(
            "dual_objective: infeasible flow (" +
            std::to_string(report.capacity_violations.size()) + " capacity, " +
            std::to_string(report.conservation_violations.size()) +
            " conservation violations); see check_flow_feasible");
    const GraphSignal v = divergence(g, f);
    double obj = 0.0;
    const auto& nodes = t.nodes();
    const auto& values = t.values();
    for (std::size_t m = 0; m < nodes.size(); ++m)
        obj += values[m] * v[static_cast<std::size_t>(nodes[m])];
    return obj;
}

ConstancyReport unsaturated_constancy_check(const EmpiricalGraph& g, const Flow& f_opt,
                                            const GraphSignal& x_hat, double tol) {
    check_flow_size(g, f_opt);
    if (x_hat.size() != static_cast<std::size_t>(g.num_nodes()))
        throw std::invalid_argument("unsaturated_constancy_check: signal size mismatch");
    ConstancyReport report;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ge = g.edge(e);
        if (std::abs(f_opt[static_cast<std::size_t>(e)]) >= ge.weight - tol) continue;
        const double diff = std::abs(x_hat[static_cast<std::size_t>(ge.head)] -
                                     x_hat[static_cast<std::size_t>(ge.tail)]);
        if (diff > tol) {
            report.violations.push_back(e);
            report.max_violation = std::max(report.max_violation, diff);
        }
    }
    return report;
}

MaxFlowResult max_flow(const FlowProblem& p) {
    if (p.source == p.sink) throw std::invalid_argument("max_flow: source equals sink");
    if (p.source < 0 || p.source >= p.num_nodes || p.sink < 0 || p.sink >= p.num_nodes)
        throw std::invalid_argument("max_flow: source or sink out of range");
    ResidualGraph rg(p.num_nodes);
    std::vector<int> arc_index;
    arc_index.reserve(p.arcs.size());
    for (const auto& arc : p.arcs) {
        if (arc.from < 0 || arc.from >= p.num_nodes || arc.to < 0 || arc.to >= p.num_nodes)
            throw std::invalid_argument("max_flow: arc endpoint out of range");
        if (!(arc.capacity >= 0.0) || !std::isfinite(arc.capacity))
            throw std::invalid_argument("max_flow: capacities must be finite and nonnegative");
        arc_index.push_back(rg.add_arc(arc.from, arc.to, arc.capacity));
    }
    MaxFlowResult result;
    result.value = rg.run(p.source, p.sink);
    result.arc_flow.resize(p.arcs.size());
    for (std::size_t a = 0; a < p.arcs.size(); ++a)
        result.arc_flow[a] = p.arcs[a].capacity - rg.cap[static_cast<std::size_t>(arc_index[a])];
    result.source_side = rg.reachable_from(p.source);
    return result;
}

AugmentedClusterGraph build_augmented_subgraph(const EmpiricalGraph& g, const Partition& p,
                                               int cluster) {
    p.validate_for(g);
    if (cluster < 0 || cluster >= p.num_clusters)
        throw std::invalid_argument("cluster id out of range: " + std::to_string(cluster));

    AugmentedClusterGraph sub;
    sub.original_node.push_back(-1);  // sink
    std::vector<int> sub_id(static_cast<std::size_t>(g.num_nodes()), -1);
    for (int i = 0; i < g.num_nodes(); ++i) {
        if (p.cluster_of[static_cast<std::size_t>(i)] == cluster) {
            sub_id[static_cast<std::size_t>(i)] = static_cast<int>(sub.original_node.size());
            sub.original_node.push_back(i);
        }
    }

    std::vector<double> cross_weight(static_cast<std::size_t>(g.num_nodes()), 0.0);
    for (const auto& e : g.edges()) {
        const bool hin = sub_id[static_cast<std::size_t>(e.head)] >= 0;
        const bool tin = sub_id[static_cast<std::size_t>(e.tail)] >= 0;
        if (hin && tin) {
            sub.edges.push_back({sub_id[static_cast<std::size_t>(e.head)],
                                 sub_id[static_cast<std::size_t>(e.tail)], e.weight});
        } else if (hin) {
            cross_weight[static_cast<std::size_t>(e.head)] += e.weight;
            sub.boundary_weight += e.weight;
        } else if (tin) {
            cross_weight[static_cast<std::size_t>(e.tail)] += e.weight;
            sub.boundary_weight += e.weight;
        }
    }
    for (std::size_t s = 1; s < sub.original_node.size(); ++s) {
        const int orig = sub.original_node[s];
        if (cross_weight[static_cast<std::size_t>(orig)] > 0.0)
            sub.edges.push_back(
                {0, static_cast<int>(s), 2.0 * cross_weight[static_cast<std::size_t>(orig)]});
    }
    sub.empty_boundary = sub.boundary_weight == 0.0;
    return sub;
}

std::vector<ClusterResolvingReport> resolving_check_maxflow(const EmpiricalGraph& g,
                                                            const Partition& p,
                                                            const TrainingSet& t, double tol) {
    p.validate_for(g);
    t.validate_for(g);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<ClusterResolvingReport> reports;
    reports.reserve(static_cast<std::size_t>(p.num_clusters));

    const std::vector<char> labeled = t.mask(g.num_nodes());
    for (int l = 0; l < p.num_clusters; ++l) {
        AugmentedClusterGraph sub = build_augmented_subgraph(g, p, l);
        ClusterResolvingReport rep;
        rep.cluster = l;
        rep.boundary_weight = sub.boundary_weight;
        rep.required = 2.0 * sub.boundary_weight;

        std::vector<int> sources;  // subgraph ids of labeled cluster nodes
        for (std::size_t s = 1; s < sub.original_node.size(); ++s)
            if (labeled[static_cast<std::size_t>(sub.original_node[s])])
                sources.push_back(static_cast<int>(s));

        if (sub.empty_boundary) {
            rep.rho = inf;
            rep.pass = true;
            rep.reason = "empty boundary";
        } else if (sources.empty()) {
            rep.rho = 0.0;
            rep.pass = false;
            rep.reason = "no labeled node";
        } else {
            FlowProblem fp;
            fp.num_nodes = static_cast<int>(sub.original_node.size()) + 1;
            fp.source = fp.num_nodes - 1;  // super-source over the labeled nodes
            fp.sink = 0;
            double total_cap = 0.0;
            for (const auto& e : sub.edges) total_cap += e.capacity;
            for (const auto& e : sub.edges) {
                fp.arcs.push_back({e.u, e.v, e.capacity});
                fp.arcs.push_back({e.v, e.u, e.capacity});
            }
            for (int s : sources) fp.arcs.push_back({fp.source, s, total_cap + 1.0});
            rep.flow_value = max_flow(fp).value;
            rep.rho = rep.flow_value / rep.boundary_weight;
            rep.pass = rep.flow_value >= rep.required - tol;
        }
        reports.push_back(std::move(rep));
    }
    return reports;
}

namespace {

// Feasibility of one boundary sign pattern: pin f = 2 b W on every boundary
// edge, then ask for a free flow on the remaining edges that restores
// conservation at unlabeled nodes. Labeled nodes trade arbitrary amounts
// with a slack node, and the pinned flows become node balances routed from
// a super source to a super sink.
bool sign_pattern_feasible(const EmpiricalGraph& g, const std::vector<char>& on_boundary,
                           const std::vector<char>& labeled, const std::vector<int>& boundary,
                           unsigned long long pattern) {
    const int n = g.num_nodes();
    const int slack = n;
    const int super_s = n + 1;
    const int super_t = n + 2;

    // balance[i] = net outflow the free flow must realize at node i. A
    // pinned flow of `pinned` units head -> tail must be carried into the
    // head by the free flow and away from the tail.
    std::vector<double> balance(static_cast<std::size_t>(n), 0.0);
    double pinned_total = 0.0;
    for (std::size_t b = 0; b < boundary.size(); ++b) {
        const auto& e = g.edge(boundary[b]);
        const double sign = (pattern >> b) & 1ULL ? -1.0 : 1.0;
        const double pinned = sign * 2.0 * e.weight;
        balance[static_cast<std::size_t>(e.head)] -= pinned;
        balance[static_cast<std::size_t>(e.tail)] += pinned;
        pinned_total += 2.0 * e.weight;
    }

    ResidualGraph rg(n + 3);
    double weight_total = 0.0;
    for (int e = 0; e < g.num_edges(); ++e) {
        if (on_boundary[static_cast<std::size_t>(e)]) continue;
        const auto& ge = g.edge(e);
        rg.add_arc(ge.head, ge.tail, ge.weight);
        rg.add_arc(ge.tail, ge.head, ge.weight);
        weight_total += ge.weight;
    }
    const double big = 2.0 * pinned_total + 2.0 * weight_total + 1.0;
    double slack_balance = 0.0;
    double supply_total = 0.0;
    for (int i = 0; i < n; ++i) {
        if (labeled[static_cast<std::size_t>(i)]) {
            rg.add_arc(i, slack, big);
            rg.add_arc(slack, i, big);
            continue;  // supplies at labeled nodes are unconstrained
        }
        const double b = balance[static_cast<std::size_t>(i)];
        if (b > 0.0) {
            rg.add_arc(super_s, i, b);
            supply_total += b;
        } else if (b < 0.0) {
            rg.add_arc(i, super_t, -b);
        }
        slack_balance -= b;
    }
    if (slack_balance > 0.0) {
        rg.add_arc(super_s, slack, slack_balance);
        supply_total += slack_balance;
    } else if (slack_balance < 0.0) {
        rg.add_arc(slack, super_t, -slack_balance);
    }

    const double value = rg.run(super_s, super_t);
    return value >= supply_total - 1e-9 * (1.0 + supply_total);
}

}  // namespace

bool resolving_check_exact(const EmpiricalGraph& g, const Partition& p, const TrainingSet& t,
                           int max_boundary) {
    p.validate_for(g);
    t.validate_for(g);
    const std::vector<int> boundary = boundary_edges(g, p);
    if (static_cast<int>(boundary.size()) > max_boundary)
        throw std::invalid_argument("resolving_check_exact: boundary has " +
                                    std::to_string(boundary.size()) + " edges (limit " +
                                    std::to_string(max_boundary) +
                                    "); use resolving_check_maxflow instead");
    if (boundary.empty()) return true;

    std::vector<char> on_boundary(static_cast<std::size_t>(g.num_edges()), 0);
    for (int e : boundary) on_boundary[static_cast<std::size_t>(e)] = 1;
    const std::vector<char> labeled = t.mask(g.num_nodes());

    // A pattern and its negation admit mirrored flows, so the first sign
    // can stay fixed.
    const unsigned long long patterns = 1ULL << (boundary.size() - 1);
    for (unsigned long long mask = 0; mask < patterns; ++mask)
        if (!sign_pattern_feasible(g, on_boundary, labeled, boundary, mask << 1))
            return false;
    return true;
}

bool cut_condition_check(const EmpiricalGraph& g, const Partition& p, const TrainingSet& t,
                         int cluster, int max_cluster) {
    p.validate_for(g);
    t.validate_for(g);
    if (cluster < 0 || cluster >= p.num_clusters)
        throw std::invalid_argument("cluster id out of range: " + std::to_string(cluster));

    std::vector<int> members;
    for (int i = 0; i < g.num_nodes(); ++i)
        if (p.cluster_of[static_cast<std::size_t>(i)] == cluster) members.push_back(i);
    if (static_cast<int>(members.size()) > max_cluster)
        throw std::invalid_argument("cut_condition_check: cluster has " +
                                    std::to_string(members.size()) + " nodes (limit " +
                                    std::to_string(max_cluster) + ")");

    const std::vector<char> labeled = t.mask(g.num_nodes());
    std::vector<int> free_nodes;  // cluster nodes that can fall on the cut side
    for (int i : members)
        if (!labeled[static_cast<std::size_t>(i)]) free_nodes.push_back(i);
    if (free_nodes.size() == members.size()) return false;  // no labeled source

    std::vector<int> free_index(static_cast<std::size_t>(g.num_nodes()), -1);
    for (std::size_t k = 0; k < free_nodes.size(); ++k)
        free_index[static_cast<std::size_t>(free_nodes[k])] = static_cast<int>(k);

    // Intra-cluster edges and per-node external weight, restricted to the
    // cluster, reused across all subsets.
    struct IntraEdge {
        int head_free;  // index into free_nodes, or -1 when labeled
        int tail_free;
        double weight;
    };
    std::vector<IntraEdge> intra;
    std::vector<double> external(free_nodes.size(), 0.0);
    for (const auto& e : g.edges()) {
        const bool hin = p.cluster_of[static_cast<std::size_t>(e.head)] == cluster;
        const bool tin = p.cluster_of[static_cast<std::size_t>(e.tail)] == cluster;
        if (hin && tin) {
            intra.push_back({free_index[static_cast<std::size_t>(e.head)],
                             free_index[static_cast<std::size_t>(e.tail)], e.weight});
        } else if (hin || tin) {
            const int inside = hin ? e.head : e.tail;
            const int k = free_index[static_cast<std::size_t>(inside)];
            if (k >= 0) external[static_cast<std::size_t>(k)] += e.weight;
        }
    }

    const unsigned long long subsets = 1ULL << free_nodes.size();
    for (unsigned long long mask = 1; mask < subsets; ++mask) {
        double internal_cut = 0.0;
        for (const auto& e : intra) {
            const bool a = e.head_free >= 0 && ((mask >> e.head_free) & 1ULL);
            const bool b = e.tail_free >= 0 && ((mask >> e.tail_free) & 1ULL);
            if (a != b) internal_cut += e.weight;
        }
        double external_cut = 0.0;
        for (std::size_t k = 0; k < free_nodes.size(); ++k)
            if ((mask >> k) & 1ULL) external_cut += external[k];
        if (internal_cut < 2.0 * external_cut - 1e-12) return false;
    }
    return true;
}

std::vector<double> sbm_condition(const std::vector<int>& cluster_sizes,
                                  const std::vector<int>& labeled_per_cluster, double p_in,
                                  double p_out) {
    if (cluster_sizes.size() != labeled_per_cluster.size())
        throw std::invalid_argument("sbm_condition: size mismatch");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0)
        throw std::invalid_argument("sbm_condition: probabilities must lie in [0,1]");
    int total = 0;
    for (int s : cluster_sizes) total += s;
    std::vector<double> margins;
    margins.reserve(cluster_sizes.size());
    for (std::size_t l = 0; l < cluster_sizes.size(); ++l) {
        const double denom = 2.0 * p_out * static_cast<double>(total - cluster_sizes[l]);
        if (denom == 0.0)
            margins.push_back(std::numeric_limits<double>::infinity());
        else
            margins.push_back(static_cast<double>(labeled_per_cluster[l]) * p_in / denom);
    }
    return margins;
}

void write_resolving_csv(const std::filesystem::path& file,
                         const std::vector<ClusterResolvingReport>& reports) {
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write file: " + file.string());
    out << "cluster,rho,required,pass\n";
    for (const auto& r : reports)
        out << r.cluster << "," << format_double(r.rho) << "," << format_double(r.required)
            << "," << (r.pass ? 1 : 0) << "\n";
}

void write_flow_csv(const std::filesystem::path& file, const EmpiricalGraph& g, const Flow& f,
                    double tol) {
    check_flow_size(g, f);
    std::ofstream out(file);
    if (!out) throw ParseError("cannot write file: " + file.string());
    out << "head,tail,flow,capacity,saturated\n";
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ge = g.edge(e);
        const bool saturated = std::abs(f[static_cast<std::size_t>(e)]) >= ge.weight - tol;
        out << ge.head << "," << ge.tail << "," << format_double(f[static_cast<std::size_t>(e)])
            << "," << format_double(ge.weight) << "," << (saturated ? 1 : 0) << "\n";
    }
}

}  // namespace tvflow
