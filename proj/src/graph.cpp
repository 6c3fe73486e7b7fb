#include "tvflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace tvflow {

namespace {

void check_signal_size(const EmpiricalGraph& g, const GraphSignal& x, const char* what) {
    if (static_cast<int>(x.size()) != g.num_nodes())
        throw std::invalid_argument(std::string(what) + ": signal length " +
                                    std::to_string(x.size()) + " does not match node count " +
                                    std::to_string(g.num_nodes()));
}

void check_edge_size(const EmpiricalGraph& g, const EdgeVector& y, const char* what) {
    if (static_cast<int>(y.size()) != g.num_edges())
        throw std::invalid_argument(std::string(what) + ": edge vector length " +
                                    std::to_string(y.size()) + " does not match edge count " +
                                    std::to_string(g.num_edges()));
}

}  // namespace

EmpiricalGraph::EmpiricalGraph(int num_nodes, std::vector<GraphEdge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
    if (num_nodes_ <= 0) throw std::invalid_argument("graph needs at least one node");
    for (auto& e : edges_) {
        if (e.head < 0 || e.head >= num_nodes_ || e.tail < 0 || e.tail >= num_nodes_)
            throw std::invalid_argument("edge endpoint out of range: (" +
                                        std::to_string(e.head) + "," + std::to_string(e.tail) + ")");
        if (e.head == e.tail)
            throw std::invalid_argument("self-loop at node " + std::to_string(e.head));
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw std::invalid_argument("edge weight must be a positive finite number");
        if (e.head > e.tail) std::swap(e.head, e.tail);
    }
    std::sort(edges_.begin(), edges_.end(), [](const GraphEdge& a, const GraphEdge& b) {
        return a.head != b.head ? a.head < b.head : a.tail < b.tail;
    });
    for (std::size_t e = 1; e < edges_.size(); ++e) {
        if (edges_[e].head == edges_[e - 1].head && edges_[e].tail == edges_[e - 1].tail)
            throw std::invalid_argument("duplicate edge (" + std::to_string(edges_[e].head) +
                                        "," + std::to_string(edges_[e].tail) + ")");
    }

    adjacency_.assign(static_cast<std::size_t>(num_nodes_), {});
    degrees_.assign(static_cast<std::size_t>(num_nodes_), 0.0);
    for (int e = 0; e < num_edges(); ++e) {
        const GraphEdge& ge = edges_[static_cast<std::size_t>(e)];
        adjacency_[static_cast<std::size_t>(ge.head)].push_back({e, +1.0});
        adjacency_[static_cast<std::size_t>(ge.tail)].push_back({e, -1.0});
        degrees_[static_cast<std::size_t>(ge.head)] += ge.weight;
        degrees_[static_cast<std::size_t>(ge.tail)] += ge.weight;
    }
    max_degree_ = 0.0;
    for (int i = 0; i < num_nodes_; ++i) {
        if (degrees_[static_cast<std::size_t>(i)] <= 0.0)
            throw std::invalid_argument("isolated node " + std::to_string(i));
        max_degree_ = std::max(max_degree_, degrees_[static_cast<std::size_t>(i)]);
    }
}

TrainingSet TrainingSet::from_pairs(std::vector<std::pair<int, double>> pairs, int num_nodes) {
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    TrainingSet t;
    t.nodes_.reserve(pairs.size());
    t.values_.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [node, value] = pairs[i];
        if (node < 0 || (num_nodes >= 0 && node >= num_nodes))
            throw std::invalid_argument("labeled node id out of range: " + std::to_string(node));
        if (i > 0 && node == pairs[i - 1].first)
            throw std::invalid_argument("duplicate label for node " + std::to_string(node));
        if (!std::isfinite(value))
            throw std::invalid_argument("label value at node " + std::to_string(node) +
                                        " is not finite");
        t.nodes_.push_back(node);
        t.values_.push_back(value);
    }
    return t;
}

std::vector<char> TrainingSet::mask(int num_nodes) const {
    std::vector<char> m(static_cast<std::size_t>(num_nodes), 0);
    for (int i : nodes_) {
        if (i >= num_nodes) throw std::invalid_argument("labeled node id out of range");
        m[static_cast<std::size_t>(i)] = 1;
    }
    return m;
}

void TrainingSet::validate_for(const EmpiricalGraph& g) const {
    if (!nodes_.empty() && nodes_.back() >= g.num_nodes())
        throw std::invalid_argument("training set references node " +
                                    std::to_string(nodes_.back()) + " beyond graph size");
}

Partition Partition::from_assignments(std::vector<int> cluster_of) {
    if (cluster_of.empty()) throw std::invalid_argument("empty partition");
    int max_cluster = -1;
    for (int c : cluster_of) {
        if (c < 0) throw std::invalid_argument("negative cluster id");
        max_cluster = std::max(max_cluster, c);
    }
    std::vector<int> count(static_cast<std::size_t>(max_cluster) + 1, 0);
    for (int c : cluster_of) ++count[static_cast<std::size_t>(c)];
    for (int c = 0; c <= max_cluster; ++c)
        if (count[static_cast<std::size_t>(c)] == 0)
            throw std::invalid_argument("cluster " + std::to_string(c) + " is empty");
    Partition p;
    p.cluster_of = std::move(cluster_of);
    p.num_clusters = max_cluster + 1;
    return p;
}

std::vector<std::vector<int>> Partition::clusters() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(num_clusters));
    for (std::size_t i = 0; i < cluster_of.size(); ++i)
        out[static_cast<std::size_t>(cluster_of[i])].push_back(static_cast<int>(i));
    return out;
}

void Partition::validate_for(const EmpiricalGraph& g) const {
    if (static_cast<int>(cluster_of.size()) != g.num_nodes())
        throw std::invalid_argument("partition covers " + std::to_string(cluster_of.size()) +
                                    " nodes, graph has " + std::to_string(g.num_nodes()));
}

EdgeVector incidence_apply(const EmpiricalGraph& g, const GraphSignal& x) {
    check_signal_size(g, x, "incidence_apply");
    EdgeVector out(static_cast<std::size_t>(g.num_edges()));
    const auto& edges = g.edges();
    for (std::size_t e = 0; e < edges.size(); ++e)
        out[e] = edges[e].weight * (x[static_cast<std::size_t>(edges[e].head)] -
                                    x[static_cast<std::size_t>(edges[e].tail)]);
    return out;
}

GraphSignal incidence_transpose_apply(const EmpiricalGraph& g, const EdgeVector& y) {
    check_edge_size(g, y, "incidence_transpose_apply");
    GraphSignal out(static_cast<std::size_t>(g.num_nodes()), 0.0);
    for (int i = 0; i < g.num_nodes(); ++i) {
        double acc = 0.0;
        for (const auto& inc : g.incident(i))
            acc += inc.sign * g.edge(inc.edge).weight * y[static_cast<std::size_t>(inc.edge)];
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

double tv_norm(const EmpiricalGraph& g, const GraphSignal& x) {
    check_signal_size(g, x, "tv_norm");
    double acc = 0.0;
    for (const auto& e : g.edges())
        acc += std::abs(e.weight * (x[static_cast<std::size_t>(e.head)] -
                                    x[static_cast<std::size_t>(e.tail)]));
    return acc;
}

std::vector<int> boundary_edges(const EmpiricalGraph& g, const Partition& p) {
    p.validate_for(g);
    std::vector<int> out;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ge = g.edge(e);
        if (p.cluster_of[static_cast<std::size_t>(ge.head)] !=
            p.cluster_of[static_cast<std::size_t>(ge.tail)])
            out.push_back(e);
    }
    return out;
}

std::vector<int> cluster_boundary(const EmpiricalGraph& g, const Partition& p, int cluster) {
    p.validate_for(g);
    if (cluster < 0 || cluster >= p.num_clusters)
        throw std::invalid_argument("cluster id out of range: " + std::to_string(cluster));
    std::vector<int> out;
    for (int e = 0; e < g.num_edges(); ++e) {
        const auto& ge = g.edge(e);
        const bool hin = p.cluster_of[static_cast<std::size_t>(ge.head)] == cluster;
        const bool tin = p.cluster_of[static_cast<std::size_t>(ge.tail)] == cluster;
        if (hin != tin) out.push_back(e);
    }
    return out;
}

GraphSignal piecewise_constant_signal(const EmpiricalGraph& g, const Partition& p,
                                      const std::vector<double>& coeffs) {
    p.validate_for(g);
    if (static_cast<int>(coeffs.size()) != p.num_clusters)
        throw std::invalid_argument("got " + std::to_string(coeffs.size()) +
                                    " coefficients for " + std::to_string(p.num_clusters) +
                                    " clusters");
    GraphSignal x(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i)
        x[static_cast<std::size_t>(i)] =
            coeffs[static_cast<std::size_t>(p.cluster_of[static_cast<std::size_t>(i)])];
    return x;
}

}  // namespace tvflow
