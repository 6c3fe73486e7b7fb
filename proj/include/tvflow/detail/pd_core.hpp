#pragma once

#include <algorithm>

#include "tvflow/solver.hpp"

namespace tvflow::detail {

// One iteration of the preconditioned primal-dual scheme, shared by TV
// minimization and nLasso (they differ only in the dual clip bound and the
// primal resolvent). The dual step lambda_e * W_e = 1/2 holds exactly in
// algebra for lambda_e = 1/(2 W_e), so the edge update uses the literal 1/2;
// the message-passing formulation performs the identical arithmetic.
template <typename ProxH>
void pd_step(const EmpiricalGraph& g, const std::vector<double>& gamma, double dual_bound,
             SolverState& state, ProxH&& prox) {
    const int n = g.num_nodes();
    const auto& edges = g.edges();

    if (state.x_tilde.size() != state.x_cur.size())
        state.x_tilde.resize(state.x_cur.size());
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        state.x_tilde[ui] = 2.0 * state.x_cur[ui] - state.x_prev[ui];
    }

    for (std::size_t e = 0; e < edges.size(); ++e) {
        double v = state.y[e] + 0.5 * (state.x_tilde[static_cast<std::size_t>(edges[e].head)] -
                                       state.x_tilde[static_cast<std::size_t>(edges[e].tail)]);
        state.y[e] = std::clamp(v, -dual_bound, dual_bound);
    }

    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        double acc = 0.0;
        for (const auto& inc : g.incident(i))
            acc += inc.sign * g.edge(inc.edge).weight * state.y[static_cast<std::size_t>(inc.edge)];
        const double old = state.x_cur[ui];
        state.x_cur[ui] = old - gamma[ui] * acc;
        state.x_prev[ui] = old;
    }

    prox(state.x_cur);

    ++state.k;
    const double w = 1.0 / static_cast<double>(state.k);
    for (int i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        state.x_bar[ui] = (1.0 - w) * state.x_bar[ui] + w * state.x_cur[ui];
    }
    for (std::size_t e = 0; e < edges.size(); ++e)
        state.y_bar[e] = (1.0 - w) * state.y_bar[e] + w * state.y[e];
}

// Clamp labeled entries to their observed values.
inline void clamp_labels(GraphSignal& x, const TrainingSet& t) {
    const auto& nodes = t.nodes();
    const auto& values = t.values();
    for (std::size_t m = 0; m < nodes.size(); ++m)
        x[static_cast<std::size_t>(nodes[m])] = values[m];
}

}  // namespace tvflow::detail
