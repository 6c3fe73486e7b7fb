#include "tvflow/mp.hpp"

#include <algorithm>
#include <stdexcept>

namespace tvflow {

MessagePassingNetwork::MessagePassingNetwork(const EmpiricalGraph& g, const TrainingSet& t) {
    t.validate_for(g);
    const std::vector<char> labeled = t.mask(g.num_nodes());

    nodes_.resize(static_cast<std::size_t>(g.num_nodes()));
    for (int i = 0; i < g.num_nodes(); ++i) {
        NodeAgent& a = nodes_[static_cast<std::size_t>(i)];
        a.id = i;
        a.gamma = 1.0 / g.degree(i);
        a.labeled = labeled[static_cast<std::size_t>(i)] != 0;
        a.incident.reserve(g.incident(i).size());
        for (const auto& inc : g.incident(i))
            a.incident.push_back({inc.edge, g.edge(inc.edge).weight, inc.sign});
    }
    const auto& mnodes = t.nodes();
    const auto& mvalues = t.values();
    for (std::size_t m = 0; m < mnodes.size(); ++m)
        nodes_[static_cast<std::size_t>(mnodes[m])].label = mvalues[m];

    edges_.resize(static_cast<std::size_t>(g.num_edges()));
    for (int e = 0; e < g.num_edges(); ++e) {
        EdgeAgent& a = edges_[static_cast<std::size_t>(e)];
        a.id = e;
        a.head = g.edge(e).head;
        a.tail = g.edge(e).tail;
        a.weight = g.edge(e).weight;
    }

    edge_inbox_head_.assign(edges_.size(), 0.0);
    edge_inbox_tail_.assign(edges_.size(), 0.0);
    node_inbox_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i)
        node_inbox_[i].assign(nodes_[i].incident.size(), 0.0);
}

void MessagePassingNetwork::run_round() {
    // Node phase: extrapolate locally.
    for (NodeAgent& a : nodes_) a.x_tilde = 2.0 * a.x_cur - a.x_prev;

    // Barrier; deliver x_tilde of both endpoints to every edge.
    for (EdgeAgent& e : edges_) {
        edge_inbox_head_[static_cast<std::size_t>(e.id)] =
            nodes_[static_cast<std::size_t>(e.head)].x_tilde;
        edge_inbox_tail_[static_cast<std::size_t>(e.id)] =
            nodes_[static_cast<std::size_t>(e.tail)].x_tilde;
        node_to_edge_messages_ += 2;
    }

    // Edge phase: dual ascent and clip.
    for (EdgeAgent& e : edges_) {
        const auto ue = static_cast<std::size_t>(e.id);
        e.y = std::clamp(e.y + 0.5 * (edge_inbox_head_[ue] - edge_inbox_tail_[ue]), -1.0, 1.0);
    }

    // Barrier; deliver each edge's dual value to both endpoints.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const NodeAgent& a = nodes_[i];
        for (std::size_t j = 0; j < a.incident.size(); ++j) {
            node_inbox_[i][j] = edges_[static_cast<std::size_t>(a.incident[j].edge_id)].y;
            ++edge_to_node_messages_;
        }
    }

    ++round_;
    const double w = 1.0 / static_cast<double>(round_);

    // Node phase: primal descent from the incident duals, clamp, average.
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        NodeAgent& a = nodes_[i];
        double acc = 0.0;
        for (std::size_t j = 0; j < a.incident.size(); ++j)
            acc += a.incident[j].sign * a.incident[j].weight * node_inbox_[i][j];
        const double old = a.x_cur;
        a.x_cur = old - a.gamma * acc;
        a.x_prev = old;
        if (a.labeled) a.x_cur = a.label;
        a.x_bar = (1.0 - w) * a.x_bar + w * a.x_cur;
    }
}

void MessagePassingNetwork::run(int rounds) {
    for (int r = 0; r < rounds; ++r) run_round();
}

GraphSignal MessagePassingNetwork::x_last() const {
    GraphSignal x(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) x[i] = nodes_[i].x_cur;
    return x;
}

GraphSignal MessagePassingNetwork::x_bar() const {
    GraphSignal x(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) x[i] = nodes_[i].x_bar;
    return x;
}

EdgeVector MessagePassingNetwork::y() const {
    EdgeVector out(edges_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) out[e] = edges_[e].y;
    return out;
}

MpResult mp_run(const EmpiricalGraph& g, const TrainingSet& t, int rounds) {
    if (rounds < 1) throw std::invalid_argument("mp_run: rounds must be >= 1");
    if (t.empty())
        throw std::invalid_argument("mp_run: empty training set (minimizer not unique)");
    MessagePassingNetwork net(g, t);
    net.run(rounds);
    return {net.x_last(), net.x_bar()};
}

}  // namespace tvflow
