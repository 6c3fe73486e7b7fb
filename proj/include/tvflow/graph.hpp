#pragma once

#include <string>
#include <vector>

namespace tvflow {

/// Node-indexed real vector (labels, estimates, supplies).
using GraphSignal = std::vector<double>;

/// Edge-indexed real vector aligned with the canonical edge order
/// (dual iterates, flows).
using EdgeVector = std::vector<double>;

/// One weighted edge, oriented head < tail.
struct GraphEdge {
    int head;
    int tail;
    double weight;
};

/// Immutable undirected weighted graph with a canonical edge orientation:
/// every edge is stored with head < tail and the edge list is sorted
/// lexicographically by (head, tail). All reductions over edges or over a
/// node's incident edges run in this order, so results are reproducible.
///
/// Construction rejects self-loops, duplicate edges, nonpositive weights
/// and isolated nodes.
class EmpiricalGraph {
public:
    struct Incidence {
        int edge;
        double sign;  // +1 if the node is the head, -1 if the tail
    };

    EmpiricalGraph(int num_nodes, std::vector<GraphEdge> edges);

    int num_nodes() const { return num_nodes_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    const std::vector<GraphEdge>& edges() const { return edges_; }
    const GraphEdge& edge(int e) const { return edges_[static_cast<std::size_t>(e)]; }

    /// Incident edges of a node in increasing edge index (canonical order).
    const std::vector<Incidence>& incident(int node) const {
        return adjacency_[static_cast<std::size_t>(node)];
    }

    /// Weighted degree d_i = sum of incident edge weights.
    double degree(int node) const { return degrees_[static_cast<std::size_t>(node)]; }
    const std::vector<double>& degrees() const { return degrees_; }
    double max_degree() const { return max_degree_; }

private:
    int num_nodes_;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<Incidence>> adjacency_;
    std::vector<double> degrees_;
    double max_degree_;
};

/// Labeled nodes with observed values, kept sorted by node id.
class TrainingSet {
public:
    TrainingSet() = default;

    /// Validates: ids distinct and nonnegative, values finite; ids < num_nodes
    /// when num_nodes >= 0.
    static TrainingSet from_pairs(std::vector<std::pair<int, double>> pairs,
                                  int num_nodes = -1);

    const std::vector<int>& nodes() const { return nodes_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }

    /// Per-node labeled flag, length num_nodes.
    std::vector<char> mask(int num_nodes) const;

    void validate_for(const EmpiricalGraph& g) const;

private:
    std::vector<int> nodes_;
    std::vector<double> values_;
};

/// Disjoint cluster assignment; cluster ids are contiguous 0..num_clusters-1
/// and every cluster is non-empty.
struct Partition {
    std::vector<int> cluster_of;
    int num_clusters = 0;

    static Partition from_assignments(std::vector<int> cluster_of);

    /// Member lists per cluster, each sorted ascending.
    std::vector<std::vector<int>> clusters() const;

    void validate_for(const EmpiricalGraph& g) const;
};

/// y = D x: entry for edge e=(i,j) is W_e * (x_i - x_j), i = head.
/// D is never materialized; cost is one pass over the edge list.
EdgeVector incidence_apply(const EmpiricalGraph& g, const GraphSignal& x);

/// x = D^T y: node i accumulates +W_e y_e over edges where it is the head
/// and -W_e y_e where it is the tail, in canonical edge order.
GraphSignal incidence_transpose_apply(const EmpiricalGraph& g, const EdgeVector& y);

/// Weighted total variation sum_e W_e |x_head - x_tail|; equals the l1 norm
/// of incidence_apply(g, x).
double tv_norm(const EmpiricalGraph& g, const GraphSignal& x);

/// Edges whose endpoints lie in different clusters, ascending edge index.
std::vector<int> boundary_edges(const EmpiricalGraph& g, const Partition& p);

/// Edges with exactly one endpoint in cluster l.
std::vector<int> cluster_boundary(const EmpiricalGraph& g, const Partition& p, int cluster);

/// Signal taking coeffs[cluster_of(i)] at node i.
GraphSignal piecewise_constant_signal(const EmpiricalGraph& g, const Partition& p,
                                      const std::vector<double>& coeffs);

}  // namespace tvflow
