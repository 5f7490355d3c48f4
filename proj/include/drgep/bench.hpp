#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "drgep/common.hpp"
#include "drgep/graph.hpp"
#include "drgep/search.hpp"

namespace drgep {

/// One benchmarkable search configuration.
struct BenchAlgorithm {
    Algorithm algorithm = Algorithm::dijkstra;
    QueueKind queue = QueueKind::naive;
    bool use_adjacency = true;
    std::optional<double> epsilon;  // rbfs and threshold-pruned dijkstra

    std::string label() const {
        switch (algorithm) {
            case Algorithm::dfs: return "dfs";
            case Algorithm::modified_dfs: return "modified-dfs";
            case Algorithm::bfs: return "bfs";
            case Algorithm::rbfs: return "rbfs";
            case Algorithm::dijkstra: break;
        }
        if (!use_adjacency) return "dijkstra-naive";
        switch (queue) {
            case QueueKind::naive: return "dijkstra-adjacency";
            case QueueKind::binary_heap: return "dijkstra-binary-heap";
            case QueueKind::fibonacci_heap: return "dijkstra-fibonacci-heap";
        }
        return "?";
    }
};

inline std::optional<BenchAlgorithm> parse_bench_algorithm(std::string_view name) {
    if (name == "dfs") return BenchAlgorithm{Algorithm::dfs, QueueKind::naive, true, {}};
    if (name == "modified-dfs") return BenchAlgorithm{Algorithm::modified_dfs, QueueKind::naive, true, {}};
    if (name == "bfs") return BenchAlgorithm{Algorithm::bfs, QueueKind::naive, true, {}};
    if (name == "rbfs") return BenchAlgorithm{Algorithm::rbfs, QueueKind::naive, true, {}};
    if (name == "dijkstra-naive") return BenchAlgorithm{Algorithm::dijkstra, QueueKind::naive, false, {}};
    if (name == "dijkstra-adjacency") return BenchAlgorithm{Algorithm::dijkstra, QueueKind::naive, true, {}};
    if (name == "dijkstra-binary-heap") return BenchAlgorithm{Algorithm::dijkstra, QueueKind::binary_heap, true, {}};
    if (name == "dijkstra-fibonacci-heap")
        return BenchAlgorithm{Algorithm::dijkstra, QueueKind::fibonacci_heap, true, {}};
    return std::nullopt;
}

/// The full comparison set: both DFS variants, BFS, and the four Dijkstra
/// implementations. RBFS is threshold-bound and belongs to the sweep.
inline std::vector<BenchAlgorithm> default_bench_algorithms() {
    return {*parse_bench_algorithm("dfs"),
            *parse_bench_algorithm("modified-dfs"),
            *parse_bench_algorithm("bfs"),
            *parse_bench_algorithm("dijkstra-naive"),
            *parse_bench_algorithm("dijkstra-adjacency"),
            *parse_bench_algorithm("dijkstra-binary-heap"),
            *parse_bench_algorithm("dijkstra-fibonacci-heap")};
}

struct BenchResult {
    std::string algorithm;
    int nodes = 0;
    std::int64_t edges = 0;
    int repetitions = 0;
    double mean_seconds = 0.0;
    double stddev_seconds = 0.0;
    std::optional<double> normalized_cost;  // relative to dijkstra-naive in the same run
    std::optional<double> epsilon;
};

namespace detail {

inline void do_not_optimize(const void* p) { asm volatile("" : : "g"(p) : "memory"); }

inline double run_bench_algorithm(const InteractionGraph& graph, const DenseGraph& dense,
                                  const std::vector<int>& targets, const BenchAlgorithm& spec) {
    double sink = 0.0;
    auto consume = [&](const OICVector& oic) {
        sink += oic.values.empty() ? 0.0 : oic.values.back();
        do_not_optimize(oic.values.data());
    };
    switch (spec.algorithm) {
        case Algorithm::dfs:
            for (int t : targets) consume(search_dfs(graph, t));
            break;
        case Algorithm::modified_dfs:
            consume(search_modified_dfs(graph, targets));
            break;
        case Algorithm::bfs:
            for (int t : targets) consume(search_bfs(graph, t));
            break;
        case Algorithm::rbfs:
            for (int t : targets) consume(search_rbfs(graph, t, *spec.epsilon));
            break;
        case Algorithm::dijkstra:
            if (spec.use_adjacency) {
                for (int t : targets)
                    consume(search_dijkstra(graph, t, DijkstraOptions{spec.queue, true, spec.epsilon}));
            } else {
                for (int t : targets) consume(search_dijkstra_dense(graph, dense, t, spec.queue, spec.epsilon));
            }
            break;
    }
    return sink;
}

inline bool same_values(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

// All four Dijkstra configurations must agree exactly before anything is
// timed; benchmarking wrong code is worse than no benchmark.
inline void verify_dijkstra_variants(const InteractionGraph& graph, const DenseGraph& dense,
                                     const std::vector<int>& targets, std::optional<double> epsilon) {
    for (int t : targets) {
        const OICVector reference =
            search_dijkstra(graph, t, DijkstraOptions{QueueKind::binary_heap, true, epsilon});
        const OICVector variants[] = {
            search_dijkstra(graph, t, DijkstraOptions{QueueKind::naive, true, epsilon}),
            search_dijkstra(graph, t, DijkstraOptions{QueueKind::fibonacci_heap, true, epsilon}),
            search_dijkstra_dense(graph, dense, t, QueueKind::naive, epsilon),
        };
        for (const auto& v : variants)
            if (!same_values(reference.values, v.values))
                throw Error("Dijkstra variant verification failed at target " + std::to_string(t));
    }
}

struct TimedSeries {
    double mean = 0.0;
    double stddev = 0.0;
};

template <class Fn>
TimedSeries time_repetitions(Fn&& fn, int repetitions) {
    using clock = std::chrono::steady_clock;
    fn();  // warm-up pass, excluded from statistics
    std::vector<double> seconds;
    seconds.reserve(static_cast<std::size_t>(repetitions));
    for (int rep = 0; rep < repetitions; ++rep) {
        const auto t0 = clock::now();
        fn();
        seconds.push_back(std::chrono::duration<double>(clock::now() - t0).count());
    }
    TimedSeries series;
    for (double s : seconds) series.mean += s;
    series.mean /= static_cast<double>(seconds.size());
    double accum = 0.0;
    for (double s : seconds) accum += (s - series.mean) * (s - series.mean);
    series.stddev = std::sqrt(accum / static_cast<double>(seconds.size() - 1));
    return series;
}

}  // namespace detail

/// Times each algorithm's complete per-target search over each graph: one
/// discarded warm-up pass, then `repetitions` timed passes. Runs
/// single-threaded. Costs are normalized by the dijkstra-naive mean measured
/// in the same run when that variant is included.
inline std::vector<BenchResult> run_benchmark(const std::vector<InteractionGraph>& graphs,
                                              const std::vector<int>& targets,
                                              const std::vector<BenchAlgorithm>& algorithms,
                                              int repetitions) {
    if (graphs.empty()) throw Error("no graphs to benchmark");
    if (targets.empty()) throw Error("no targets to benchmark");
    if (repetitions < 3) throw Error("benchmark needs at least 3 repetitions");
    for (const auto& spec : algorithms)
        if (spec.algorithm == Algorithm::rbfs && !spec.epsilon)
            throw Error("rbfs benchmark requires an epsilon");

    std::vector<BenchResult> results;
    for (const auto& graph : graphs) {
        for (int t : targets) detail::check_target(graph, t);
        const DenseGraph dense = DenseGraph::from(graph);
        detail::verify_dijkstra_variants(graph, dense, targets, {});

        const std::size_t first_result = results.size();
        std::optional<double> naive_mean;
        for (const auto& spec : algorithms) {
            const auto series = detail::time_repetitions(
                [&] { detail::run_bench_algorithm(graph, dense, targets, spec); }, repetitions);
            BenchResult result;
            result.algorithm = spec.label();
            result.nodes = graph.n;
            result.edges = graph.edge_count;
            result.repetitions = repetitions;
            result.mean_seconds = series.mean;
            result.stddev_seconds = series.stddev;
            result.epsilon = spec.epsilon;
            if (spec.algorithm == Algorithm::dijkstra && !spec.use_adjacency) naive_mean = series.mean;
            results.push_back(std::move(result));
        }
        if (naive_mean)
            for (std::size_t i = first_result; i < results.size(); ++i)
                results[i].normalized_cost = results[i].mean_seconds / *naive_mean;
    }
    return results;
}

/// Cost versus threshold: RBFS against the four threshold-pruned Dijkstra
/// variants at each epsilon. Before timing, RBFS and pruned Dijkstra are
/// checked to agree exactly on every value at or above the threshold.
inline std::vector<BenchResult> threshold_sweep_benchmark(const std::vector<InteractionGraph>& graphs,
                                                          const std::vector<int>& targets,
                                                          const std::vector<double>& epsilons,
                                                          int repetitions) {
    if (graphs.empty()) throw Error("no graphs to benchmark");
    if (targets.empty()) throw Error("no targets to benchmark");
    if (repetitions < 3) throw Error("benchmark needs at least 3 repetitions");
    if (epsilons.empty()) throw Error("no epsilons to sweep");
    for (double e : epsilons)
        if (!(e > 0.0) || e > 1.0) throw Error("sweep epsilons must lie in (0, 1]");
    if (!std::is_sorted(epsilons.begin(), epsilons.end())) throw Error("sweep epsilons must be sorted");

    std::vector<BenchResult> results;
    for (const auto& graph : graphs) {
        for (int t : targets) detail::check_target(graph, t);
        const DenseGraph dense = DenseGraph::from(graph);
        for (double epsilon : epsilons) {
            detail::verify_dijkstra_variants(graph, dense, targets, epsilon);
            for (int t : targets) {
                const OICVector rbfs = search_rbfs(graph, t, epsilon);
                const OICVector pruned =
                    search_dijkstra(graph, t, DijkstraOptions{QueueKind::binary_heap, true, epsilon});
                if (!detail::same_values(rbfs.values, pruned.values))
                    throw Error("RBFS and threshold-pruned Dijkstra disagree at epsilon " +
                                format_double(epsilon));
            }

            std::vector<BenchAlgorithm> algorithms = {
                BenchAlgorithm{Algorithm::rbfs, QueueKind::naive, true, epsilon},
                BenchAlgorithm{Algorithm::dijkstra, QueueKind::naive, false, epsilon},
                BenchAlgorithm{Algorithm::dijkstra, QueueKind::naive, true, epsilon},
                BenchAlgorithm{Algorithm::dijkstra, QueueKind::binary_heap, true, epsilon},
                BenchAlgorithm{Algorithm::dijkstra, QueueKind::fibonacci_heap, true, epsilon},
            };
            const std::size_t first_result = results.size();
            std::optional<double> naive_mean;
            for (const auto& spec : algorithms) {
                const auto series = detail::time_repetitions(
                    [&] { detail::run_bench_algorithm(graph, dense, targets, spec); }, repetitions);
                BenchResult result;
                result.algorithm = spec.label();
                result.nodes = graph.n;
                result.edges = graph.edge_count;
                result.repetitions = repetitions;
                result.mean_seconds = series.mean;
                result.stddev_seconds = series.stddev;
                result.epsilon = epsilon;
                if (spec.algorithm == Algorithm::dijkstra && !spec.use_adjacency) naive_mean = series.mean;
                results.push_back(std::move(result));
            }
            if (naive_mean)
                for (std::size_t i = first_result; i < results.size(); ++i)
                    results[i].normalized_cost = results[i].mean_seconds / *naive_mean;
        }
    }
    return results;
}

/// Plot-ready CSV. Column set is stable; the sweep adds a trailing epsilon
/// column.
inline std::string bench_csv(const std::vector<BenchResult>& results, bool include_epsilon) {
    std::ostringstream out;
    out << "algorithm,nodes,edges,repetitions,mean_seconds,stddev_seconds,normalized_cost";
    if (include_epsilon) out << ",epsilon";
    out << '\n';
    for (const auto& r : results) {
        out << r.algorithm << ',' << r.nodes << ',' << r.edges << ',' << r.repetitions << ','
            << format_double(r.mean_seconds) << ',' << format_double(r.stddev_seconds) << ',';
        if (r.normalized_cost) out << format_double(*r.normalized_cost);
        if (include_epsilon) {
            out << ',';
            if (r.epsilon) out << format_double(*r.epsilon);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace drgep
