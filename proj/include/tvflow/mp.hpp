#pragma once

#include <cstdint>
#include <vector>

#include "tvflow/graph.hpp"

namespace tvflow {

/// Node-local state for the message-passing form of the primal-dual method.
/// An agent stores only its own iterates and a view of its incident edges
/// (ids, weights, orientation), never global graph data.
struct NodeAgent {
    struct EdgeView {
        int edge_id;
        double weight;
        double sign;  // +1 if this node is the head, -1 if the tail
    };

    int id = 0;
    double gamma = 0.0;  // 1 / d_i
    bool labeled = false;
    double label = 0.0;
    double x_prev = 0.0;
    double x_cur = 0.0;
    double x_bar = 0.0;
    double x_tilde = 0.0;
    std::vector<EdgeView> incident;  // ascending edge id (canonical order)
};

struct EdgeAgent {
    int id = 0;
    int head = 0;
    int tail = 0;
    double weight = 0.0;
    double y = 0.0;  // |y| <= 1 after every round
};

/// Bulk-synchronous simulation of the distributed iteration. Each round has
/// two phases separated by barriers: nodes publish extrapolated values to
/// their incident edges, edges update and clip their dual variable, then
/// publish it back to their endpoints. Agents touch only delivered messages
/// and their own state; the scheduler counts every delivery.
class MessagePassingNetwork {
public:
    MessagePassingNetwork(const EmpiricalGraph& g, const TrainingSet& t);

    void run_round();
    void run(int rounds);

    long rounds_completed() const { return round_; }
    std::int64_t node_to_edge_messages() const { return node_to_edge_messages_; }
    std::int64_t edge_to_node_messages() const { return edge_to_node_messages_; }

    const std::vector<NodeAgent>& nodes() const { return nodes_; }
    const std::vector<EdgeAgent>& edges() const { return edges_; }

    GraphSignal x_last() const;
    GraphSignal x_bar() const;
    EdgeVector y() const;

private:
    std::vector<NodeAgent> nodes_;
    std::vector<EdgeAgent> edges_;
    long round_ = 0;
    std::int64_t node_to_edge_messages_ = 0;
    std::int64_t edge_to_node_messages_ = 0;

    // Mailboxes filled by the scheduler between phases.
    std::vector<double> edge_inbox_head_;          // x_tilde of the head, per edge
    std::vector<double> edge_inbox_tail_;          // x_tilde of the tail, per edge
    std::vector<std::vector<double>> node_inbox_;  // y per incident edge, per node
};

struct MpResult {
    GraphSignal x_last;  // the distributed algorithm reports the last iterate
    GraphSignal x_bar;   // running average, for cross-checks against the solver
};

/// Runs `rounds` synchronous rounds from zero initialization.
MpResult mp_run(const EmpiricalGraph& g, const TrainingSet& t, int rounds);

}  // namespace tvflow
