#pragma once

#include <random>
#include <utility>
#include <vector>

#include "tvflow/bench.hpp"
#include "tvflow/graph.hpp"

namespace tvflow::testing {

// The 8-node two-cluster instance: two 4-node cliques-minus-an-edge with
// unit weights, joined by a single half-weight bridge. Node 0 and node 7
// carry the labels; the planted signal is 1 on the first cluster and 0 on
// the second.
//
// Cluster A: 0,1,2,3 (0 labeled, 3 touches the bridge)
// Cluster B: 4,5,6,7 (7 labeled, 4 touches the bridge)
inline EmpiricalGraph two_cluster_graph() {
    return EmpiricalGraph(8, {
                                 {0, 1, 1.0},
                                 {0, 2, 1.0},
                                 {1, 2, 1.0},
                                 {1, 3, 1.0},
                                 {2, 3, 1.0},
                                 {3, 4, 0.5},  // bridge, the partition boundary
                                 {4, 5, 1.0},
                                 {4, 6, 1.0},
                                 {5, 6, 1.0},
                                 {5, 7, 1.0},
                                 {6, 7, 1.0},
                             });
}

inline Partition two_cluster_partition() {
    return Partition::from_assignments({0, 0, 0, 0, 1, 1, 1, 1});
}

inline TrainingSet two_cluster_labels() {
    return TrainingSet::from_pairs({{0, 1.0}, {7, 0.0}}, 8);
}

inline GraphSignal two_cluster_planted() { return {1, 1, 1, 1, 0, 0, 0, 0}; }

constexpr int kTwoClusterBridgeEdge = 5;  // canonical index of (3,4)

// Random connected graph with n nodes: a random spanning tree plus extra
// edges, weights uniform in [0.5, 2.0).
inline EmpiricalGraph random_connected_graph(int n, int extra_edges, Rng& rng) {
    std::vector<GraphEdge> edges;
    std::vector<std::pair<int, int>> used;
    for (int i = 1; i < n; ++i) {
        const int j = rng.uniform_int(0, i - 1);
        edges.push_back({j, i, 0.5 + 1.5 * rng.uniform()});
        used.emplace_back(j, i);
    }
    int attempts = 0;
    while (extra_edges > 0 && attempts < 50 * extra_edges) {
        ++attempts;
        int u = rng.uniform_int(0, n - 1);
        int v = rng.uniform_int(0, n - 1);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        bool duplicate = false;
        for (const auto& [a, b] : used)
            if (a == u && b == v) {
                duplicate = true;
                break;
            }
        if (duplicate) continue;
        used.emplace_back(u, v);
        edges.push_back({u, v, 0.5 + 1.5 * rng.uniform()});
        --extra_edges;
    }
    return EmpiricalGraph(n, std::move(edges));
}

inline GraphSignal random_signal(int n, Rng& rng, double lo = -1.0, double hi = 1.0) {
    GraphSignal x(static_cast<std::size_t>(n));
    for (auto& v : x) v = lo + (hi - lo) * rng.uniform();
    return x;
}

}  // namespace tvflow::testing
