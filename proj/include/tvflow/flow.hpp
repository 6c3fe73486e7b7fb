#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tvflow/graph.hpp"

namespace tvflow {

/// Signed edge flow aligned with the canonical edge order; positive values
/// run head -> tail. The dual vector y maps to the flow f_e = W_e y_e.
using Flow = std::vector<double>;

Flow dual_to_flow(const EmpiricalGraph& g, const EdgeVector& y);

/// Net outflow (supply) v_i at every node. Equals D^T y for f = W y.
GraphSignal divergence(const EmpiricalGraph& g, const Flow& f);

struct FlowFeasibilityReport {
    std::vector<int> capacity_violations;      // edges with |f_e| > W_e + tol
    std::vector<int> conservation_violations;  // unlabeled nodes with |v_i| > tol
    double max_capacity_excess = 0.0;
    double max_conservation_violation = 0.0;
    bool ok() const { return capacity_violations.empty() && conservation_violations.empty(); }
};

/// Checks |f_e| <= W_e on cap_edges and zero divergence at unlabeled nodes.
FlowFeasibilityReport check_flow_feasible(const EmpiricalGraph& g, const Flow& f,
                                          const TrainingSet& t,
                                          const std::vector<int>& cap_edges,
                                          double tol = 1e-6);

/// Capacity checked on every edge.
FlowFeasibilityReport check_flow_feasible(const EmpiricalGraph& g, const Flow& f,
                                          const TrainingSet& t, double tol = 1e-6);

/// Dual objective sum over labeled nodes of label * net outflow. Throws when
/// the flow is infeasible within tol (see check_flow_feasible).
double dual_objective(const EmpiricalGraph& g, const TrainingSet& t, const Flow& f,
                      double tol = 1e-6);

struct ConstancyReport {
    std::vector<int> violations;  // unsaturated edges with differing endpoint estimates
    double max_violation = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Minimizers can only change across saturated edges: for every edge with
/// |f_e| < W_e - tol, the endpoint estimates must agree within tol.
ConstancyReport unsaturated_constancy_check(const EmpiricalGraph& g, const Flow& f_opt,
                                            const GraphSignal& x_hat, double tol = 1e-6);

/// Directed max-flow instance with nonnegative real capacities.
struct FlowProblem {
    struct Arc {
        int from;
        int to;
        double capacity;
    };
    int num_nodes = 0;
    int source = 0;
    int sink = 0;
    std::vector<Arc> arcs;
};

struct MaxFlowResult {
    double value = 0.0;
    std::vector<double> arc_flow;    // per input arc
    std::vector<char> source_side;   // min-cut certificate: residual-reachable set
};

/// Shortest-augmenting-path max-flow; residuals below 1e-9 count as empty.
/// The returned cut certifies optimality (its capacity equals the value).
MaxFlowResult max_flow(const FlowProblem& p);

/// Cluster subgraph plus a sink node that absorbs boundary capacity:
/// intra-cluster edges keep their weight; every boundary node i gets one
/// sink edge of capacity 2 * (total weight from i out of the cluster).
struct AugmentedClusterGraph {
    struct CapEdge {
        int u;
        int v;
        double capacity;
    };
    std::vector<int> original_node;  // subgraph id -> original id; entry 0 is the sink (-1)
    std::vector<CapEdge> edges;      // undirected
    double boundary_weight = 0.0;    // total weight of the cluster boundary
    bool empty_boundary = false;     // sink isolated; resolving check is vacuous
};

AugmentedClusterGraph build_augmented_subgraph(const EmpiricalGraph& g, const Partition& p,
                                               int cluster);

struct ClusterResolvingReport {
    int cluster = 0;
    double flow_value = 0.0;
    double boundary_weight = 0.0;
    double required = 0.0;  // 2 * boundary_weight
    double rho = 0.0;       // flow_value / boundary_weight; passes at 2
    bool pass = false;
    std::string reason;     // set when the check fails for a structural reason
};

/// Sufficient resolving test per cluster: max-flow from the cluster's
/// labeled nodes (as a super-source) to the boundary sink must reach
/// 2 * boundary weight. Clusters without labeled nodes fail; clusters
/// without boundary pass vacuously.
std::vector<ClusterResolvingReport> resolving_check_maxflow(const EmpiricalGraph& g,
                                                            const Partition& p,
                                                            const TrainingSet& t,
                                                            double tol = 1e-9);

/// Exact resolving test: for every sign pattern on the boundary edges,
/// decides whether a flow exists that pins each boundary edge at twice its
/// weight (with the pattern's sign), respects capacities elsewhere, and
/// conserves at unlabeled nodes. Exponential in the boundary size; refuses
/// above max_boundary.
bool resolving_check_exact(const EmpiricalGraph& g, const Partition& p, const TrainingSet& t,
                           int max_boundary = 20);

/// Brute-force min-cut form of the sufficient condition for one cluster:
/// every node subset avoiding the labeled nodes must have internal cut
/// weight at least twice its external cut weight. Refuses above max_cluster.
bool cut_condition_check(const EmpiricalGraph& g, const Partition& p, const TrainingSet& t,
                         int cluster, int max_cluster = 20);

/// Heuristic SBM recovery margin per cluster:
/// labeled_in_cluster * p_in / (2 * p_out * (total_nodes - cluster_size)).
/// Margins well above 1 indicate recoverability; p_out = 0 gives infinity.
std::vector<double> sbm_condition(const std::vector<int>& cluster_sizes,
                                  const std::vector<int>& labeled_per_cluster, double p_in,
                                  double p_out);

/// Report CSV `cluster,rho,required,pass`.
void write_resolving_csv(const std::filesystem::path& file,
                         const std::vector<ClusterResolvingReport>& reports);

/// Flow dump CSV `head,tail,flow,capacity,saturated`.
void write_flow_csv(const std::filesystem::path& file, const EmpiricalGraph& g, const Flow& f,
                    double tol = 1e-9);

}  // namespace tvflow
