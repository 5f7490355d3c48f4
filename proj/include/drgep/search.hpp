#pragma once

#include <algorithm>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "drgep/common.hpp"
#include "drgep/graph.hpp"
#include "drgep/heaps.hpp"

namespace drgep {

enum class Algorithm { dfs, modified_dfs, bfs, rbfs, dijkstra };

inline const char* to_string(Algorithm alg) {
    switch (alg) {
        case Algorithm::dfs: return "dfs";
        case Algorithm::modified_dfs: return "modified-dfs";
        case Algorithm::bfs: return "bfs";
        case Algorithm::rbfs: return "rbfs";
        case Algorithm::dijkstra: return "dijkstra";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view s) {
    if (s == "dfs") return Algorithm::dfs;
    if (s == "modified-dfs") return Algorithm::modified_dfs;
    if (s == "bfs") return Algorithm::bfs;
    if (s == "rbfs") return Algorithm::rbfs;
    if (s == "dijkstra") return Algorithm::dijkstra;
    return std::nullopt;
}

inline std::optional<QueueKind> parse_queue_kind(std::string_view s) {
    if (s == "naive") return QueueKind::naive;
    if (s == "binary-heap") return QueueKind::binary_heap;
    if (s == "fibonacci-heap") return QueueKind::fibonacci_heap;
    return std::nullopt;
}

/// Per-target overall interaction coefficients. values[B] is the dependence
/// of the target on species B in [0, 1]; values[target] is 1.
struct OICVector {
    int target = 0;
    std::vector<double> values;
    Algorithm algorithm = Algorithm::dijkstra;
    std::optional<double> threshold;  // RBFS pruning threshold
};

namespace detail {

inline void check_target(const InteractionGraph& g, int target) {
    if (target < 0 || target >= g.n) throw Error("target index out of range");
}

}  // namespace detail

/// Depth-first search. A node's value is assigned exactly once, when the
/// search first reaches it, as R(parent) * r(parent->node), and is never
/// revisited. Neighbors are explored in ascending species index. The first
/// path found wins, which is what makes this baseline depend on species
/// order and underestimate OICs.
inline OICVector search_dfs(const InteractionGraph& g, int target) {
    detail::check_target(g, target);
    OICVector out{target, std::vector<double>(static_cast<std::size_t>(g.n), 0.0), Algorithm::dfs, {}};
    std::vector<char> visited(static_cast<std::size_t>(g.n), 0);
    visited[static_cast<std::size_t>(target)] = 1;
    out.values[static_cast<std::size_t>(target)] = 1.0;

    // Explicit stack of (node, next edge offset); equivalent to the recursive
    // preorder but immune to deep graphs.
    std::vector<std::pair<int, std::size_t>> stack;
    stack.emplace_back(target, 0);
    while (!stack.empty()) {
        auto& [u, next] = stack.back();
        const auto& edges = g.neighbors(u);
        if (next >= edges.size()) {
            stack.pop_back();
            continue;
        }
        const auto& e = edges[next++];
        if (visited[static_cast<std::size_t>(e.to)]) continue;
        visited[static_cast<std::size_t>(e.to)] = 1;
        out.values[static_cast<std::size_t>(e.to)] =
            out.values[static_cast<std::size_t>(u)] * e.weight;
        stack.emplace_back(e.to, 0);
    }
    return out;
}

/// DFS variant that presets every target's value to 1 and runs one combined
/// search: started at the lowest-index target, then restarted only at targets
/// the earlier searches did not reach. A discovered target keeps its preset
/// value, so downstream products restart at 1 there. The result mixes all
/// targets' dependence in one vector, which is why this variant cannot be
/// combined with per-target coefficient scaling.
inline OICVector search_modified_dfs(const InteractionGraph& g, const std::vector<int>& targets) {
    if (targets.empty()) throw Error("modified DFS requires at least one target");
    std::vector<int> roots = targets;
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    for (int t : roots) detail::check_target(g, t);

    OICVector out{roots.front(), std::vector<double>(static_cast<std::size_t>(g.n), 0.0),
                  Algorithm::modified_dfs, {}};
    std::vector<char> is_target(static_cast<std::size_t>(g.n), 0);
    for (int t : roots) {
        is_target[static_cast<std::size_t>(t)] = 1;
        out.values[static_cast<std::size_t>(t)] = 1.0;
    }

    std::vector<char> visited(static_cast<std::size_t>(g.n), 0);
    std::vector<std::pair<int, std::size_t>> stack;
    for (int root : roots) {
        if (visited[static_cast<std::size_t>(root)]) continue;
        visited[static_cast<std::size_t>(root)] = 1;
        stack.emplace_back(root, 0);
        while (!stack.empty()) {
            auto& [u, next] = stack.back();
            const auto& edges = g.neighbors(u);
            if (next >= edges.size()) {
                stack.pop_back();
                continue;
            }
            const auto& e = edges[next++];
            if (visited[static_cast<std::size_t>(e.to)]) continue;
            visited[static_cast<std::size_t>(e.to)] = 1;
            if (!is_target[static_cast<std::size_t>(e.to)])
                out.values[static_cast<std::size_t>(e.to)] =
                    out.values[static_cast<std::size_t>(u)] * e.weight;
            stack.emplace_back(e.to, 0);
        }
    }
    return out;
}

/// Breadth-first search. Values are assigned at first discovery only, so the
/// value reflects the path with the fewest intermediate nodes, not the
/// strongest one. Neighbors are enqueued in ascending species index.
inline OICVector search_bfs(const InteractionGraph& g, int target) {
    detail::check_target(g, target);
    OICVector out{target, std::vector<double>(static_cast<std::size_t>(g.n), 0.0), Algorithm::bfs, {}};
    std::vector<char> visited(static_cast<std::size_t>(g.n), 0);
    visited[static_cast<std::size_t>(target)] = 1;
    out.values[static_cast<std::size_t>(target)] = 1.0;

    std::deque<int> queue{target};
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        for (const auto& e : g.neighbors(u)) {
            if (visited[static_cast<std::size_t>(e.to)]) continue;
            visited[static_cast<std::size_t>(e.to)] = 1;
            out.values[static_cast<std::size_t>(e.to)] =
                out.values[static_cast<std::size_t>(u)] * e.weight;
            queue.push_back(e.to);
        }
    }
    return out;
}

/// R-value-based BFS: label-correcting breadth-first search that prunes path
/// products below epsilon. A candidate R(u) * r_uv is applied, and v
/// re-enqueued, whenever it both improves R(v) and reaches epsilon. Values
/// strictly increase per update and are bounded, so the search terminates.
/// Wherever the true OIC is >= epsilon the result equals Dijkstra's; below
/// epsilon it is 0.
inline OICVector search_rbfs(const InteractionGraph& g, int target, double epsilon) {
    detail::check_target(g, target);
    if (!(epsilon > 0.0) || epsilon > 1.0) throw Error("RBFS threshold must lie in (0, 1]");
    OICVector out{target, std::vector<double>(static_cast<std::size_t>(g.n), 0.0), Algorithm::rbfs, epsilon};
    out.values[static_cast<std::size_t>(target)] = 1.0;

    std::vector<char> queued(static_cast<std::size_t>(g.n), 0);
    std::deque<int> queue{target};
    queued[static_cast<std::size_t>(target)] = 1;
    while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        queued[static_cast<std::size_t>(u)] = 0;
        const double base = out.values[static_cast<std::size_t>(u)];
        for (const auto& e : g.neighbors(u)) {
            const double candidate = base * e.weight;
            if (candidate < epsilon) continue;
            if (candidate <= out.values[static_cast<std::size_t>(e.to)]) continue;
            out.values[static_cast<std::size_t>(e.to)] = candidate;
            if (!queued[static_cast<std::size_t>(e.to)]) {
                queued[static_cast<std::size_t>(e.to)] = 1;
                queue.push_back(e.to);
            }
        }
    }
    return out;
}

struct DijkstraOptions {
    QueueKind queue = QueueKind::binary_heap;
    bool use_adjacency = true;
    std::optional<double> prune_epsilon;  // skip relaxations below this value
};

namespace detail {

template <class Queue, class ForEachNeighbor>
void dijkstra_core(std::vector<double>& values, Queue& queue, ForEachNeighbor&& for_each_neighbor,
                   std::optional<double> prune_epsilon) {
    const double floor = prune_epsilon.value_or(0.0);
    // The queue drains completely, unreachable nodes included; their key 0
    // never improves a neighbor.
    while (!queue.empty()) {
        const auto [u, key] = queue.extract_max();
        for_each_neighbor(u, [&](int v, double weight) {
            const double candidate = key * weight;
            if (candidate <= values[static_cast<std::size_t>(v)]) return;
            if (prune_epsilon && candidate < floor) return;
            values[static_cast<std::size_t>(v)] = candidate;
            queue.increase_key(v, candidate);
        });
    }
}

template <class Queue>
OICVector dijkstra_with_queue(const InteractionGraph& g, const DenseGraph* dense, int target,
                              const DijkstraOptions& opts) {
    OICVector out{target, std::vector<double>(static_cast<std::size_t>(g.n), 0.0), Algorithm::dijkstra,
                  opts.prune_epsilon};
    out.values[static_cast<std::size_t>(target)] = 1.0;
    Queue queue(out.values);
    if (opts.use_adjacency) {
        dijkstra_core(out.values, queue,
                      [&](int u, auto&& relax) {
                          for (const auto& e : g.neighbors(u)) relax(e.to, e.weight);
                      },
                      opts.prune_epsilon);
    } else {
        const DenseGraph local = dense ? DenseGraph{} : DenseGraph::from(g);
        const DenseGraph& m = dense ? *dense : local;
        const int n = g.n;
        dijkstra_core(out.values, queue,
                      [&](int u, auto&& relax) {
                          const double* row = m.weights.data() + static_cast<std::size_t>(u) * static_cast<std::size_t>(n);
                          for (int v = 0; v < n; ++v)
                              if (row[v] > 0.0) relax(v, row[v]);
                      },
                      opts.prune_epsilon);
    }
    return out;
}

inline OICVector dijkstra_dispatch(const InteractionGraph& g, const DenseGraph* dense, int target,
                                   const DijkstraOptions& opts) {
    check_target(g, target);
    switch (opts.queue) {
        case QueueKind::naive: return dijkstra_with_queue<NaiveMaxQueue>(g, dense, target, opts);
        case QueueKind::binary_heap: return dijkstra_with_queue<BinaryMaxHeap>(g, dense, target, opts);
        case QueueKind::fibonacci_heap: return dijkstra_with_queue<FibonacciMaxHeap>(g, dense, target, opts);
    }
    throw Error("unknown queue kind");
}

}  // namespace detail

/// Dijkstra's algorithm on the max-product order: the queue starts with all
/// nodes, the node with the highest value is settled next, and neighbors are
/// relaxed with R_tmp = R(u) * r_uv whenever that improves them. Exact OIC
/// for every node, identical across queue kinds and adjacency/dense
/// iteration. Weights <= 1 guarantee settled nodes are never improved.
inline OICVector search_dijkstra(const InteractionGraph& g, int target, const DijkstraOptions& opts = {}) {
    return detail::dijkstra_dispatch(g, nullptr, target, opts);
}

/// Same search against a prebuilt dense matrix, for benchmarking the naive
/// implementation without paying matrix construction inside the timed region.
inline OICVector search_dijkstra_dense(const InteractionGraph& g, const DenseGraph& dense, int target,
                                       QueueKind queue = QueueKind::naive,
                                       std::optional<double> prune_epsilon = {}) {
    if (dense.n != g.n) throw Error("dense matrix size does not match graph");
    DijkstraOptions opts{queue, false, prune_epsilon};
    return detail::dijkstra_dispatch(g, &dense, target, opts);
}

/// Test oracle: enumerates every simple path from the target and takes the
/// per-node maximum path product. Simple paths suffice because weights <= 1
/// make node repetition non-improving. Factorial cost; refuses graphs larger
/// than node_limit.
inline OICVector brute_force_oic(const InteractionGraph& g, int target, int node_limit = 12) {
    detail::check_target(g, target);
    if (g.n > node_limit)
        throw Error("brute_force_oic limited to " + std::to_string(node_limit) + " nodes");
    OICVector out{target, std::vector<double>(static_cast<std::size_t>(g.n), 0.0), Algorithm::dijkstra, {}};
    out.values[static_cast<std::size_t>(target)] = 1.0;

    std::vector<char> on_path(static_cast<std::size_t>(g.n), 0);
    on_path[static_cast<std::size_t>(target)] = 1;
    auto explore = [&](auto&& self, int u, double product) -> void {
        for (const auto& e : g.neighbors(u)) {
            if (on_path[static_cast<std::size_t>(e.to)]) continue;
            const double path_product = product * e.weight;
            if (path_product > out.values[static_cast<std::size_t>(e.to)])
                out.values[static_cast<std::size_t>(e.to)] = path_product;
            on_path[static_cast<std::size_t>(e.to)] = 1;
            self(self, e.to, path_product);
            on_path[static_cast<std::size_t>(e.to)] = 0;
        }
    };
    explore(explore, target, 1.0);
    return out;
}

}  // namespace drgep
