#pragma once

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "drgep/common.hpp"
#include "drgep/graph.hpp"
#include "drgep/kinetics.hpp"
#include "drgep/mechanism.hpp"
#include "drgep/search.hpp"

namespace drgep {

struct ReductionConfig {
    std::vector<std::string> targets;
    std::optional<double> threshold;    // epsilon_EP; required for rbfs and reduce_at_threshold
    std::optional<double> error_limit;  // percent, for oracle-driven selection
    bool scaling = false;
    Algorithm algorithm = Algorithm::dijkstra;
    QueueKind queue = QueueKind::binary_heap;
    bool use_adjacency = true;
    int jobs = 1;
};

inline std::vector<int> resolve_targets(const Mechanism& mech, const std::vector<std::string>& names) {
    if (names.empty()) throw Error("at least one target species is required");
    std::vector<int> indices;
    indices.reserve(names.size());
    for (const auto& name : names) {
        auto idx = mech.find_species(name);
        if (!idx) throw Error("target species '" + to_upper(name) + "' not found in mechanism");
        indices.push_back(*idx);
    }
    std::vector<int> dedup = indices;
    std::sort(dedup.begin(), dedup.end());
    if (std::adjacent_find(dedup.begin(), dedup.end()) != dedup.end())
        throw Error("duplicate target species");
    return indices;
}

inline void validate_config(const ReductionConfig& config) {
    if (config.scaling && config.algorithm == Algorithm::modified_dfs)
        throw Error("coefficient scaling cannot be combined with modified DFS: its combined "
                    "vector has no per-target activity to scale");
    if (config.algorithm == Algorithm::rbfs && !config.threshold)
        throw Error("RBFS requires the threshold up front (--epsilon)");
    if (config.threshold && (!(*config.threshold > 0.0) || *config.threshold > 1.0))
        throw Error("threshold must lie in (0, 1]");
    if (config.jobs < 1) throw Error("jobs must be >= 1");
}

/// Per-sample scaling coefficients. alpha_element is the per-element
/// coefficient N_{a,T} |P_T - C_T| / P_a; alpha normalizes each element by
/// its maximum over all samples of all datasets and takes the per-target
/// maximum over elements. Elements never produced are excluded; samples with
/// P_a = 0 contribute 0.
struct ScalingSeries {
    std::size_t sample_count = 0;
    std::size_t element_count = 0;
    std::size_t target_count = 0;
    std::vector<double> alpha_element;  // [sample][element][target]
    std::vector<double> alpha;          // [sample][target]

    double element_at(std::size_t sample, std::size_t element, std::size_t target) const {
        return alpha_element[(sample * element_count + element) * target_count + target];
    }
    double at(std::size_t sample, std::size_t target) const {
        return alpha[sample * target_count + target];
    }
};

inline ScalingSeries scaling_coefficients(const Mechanism& mech, const RateSampleSet& samples,
                                          const std::vector<int>& targets) {
    ScalingSeries series;
    series.sample_count = samples.samples.size();
    series.element_count = mech.elements.size();
    series.target_count = targets.size();
    series.alpha_element.assign(series.sample_count * series.element_count * series.target_count, 0.0);
    series.alpha.assign(series.sample_count * series.target_count, 0.0);

    // Pass 1: raw element coefficients and their per-(element, target) maxima
    // over every sample of every dataset.
    std::vector<double> time_max(series.element_count * series.target_count, 0.0);
    for (std::size_t s = 0; s < series.sample_count; ++s) {
        const SpeciesFlux flux = species_flux(mech, samples.samples[s]);
        for (std::size_t e = 0; e < series.element_count; ++e) {
            const double element_production = element_pseudo_production(mech, flux, mech.elements[e]);
            for (std::size_t t = 0; t < series.target_count; ++t) {
                const auto target = static_cast<std::size_t>(targets[t]);
                const int atoms = mech.species[target].atom_count(mech.elements[e]);
                double value = 0.0;
                if (element_production > 0.0 && atoms > 0) {
                    const double net = std::abs(flux.production[target] - flux.consumption[target]);
                    value = static_cast<double>(atoms) * net / element_production;
                }
                series.alpha_element[(s * series.element_count + e) * series.target_count + t] = value;
                auto& peak = time_max[e * series.target_count + t];
                if (value > peak) peak = value;
            }
        }
    }

    // Pass 2: normalize by the time maximum and take the max over elements.
    for (std::size_t s = 0; s < series.sample_count; ++s) {
        for (std::size_t t = 0; t < series.target_count; ++t) {
            double best = 0.0;
            for (std::size_t e = 0; e < series.element_count; ++e) {
                const double peak = time_max[e * series.target_count + t];
                if (peak <= 0.0) continue;
                const double scaled = series.element_at(s, e, t) / peak;
                if (scaled > best) best = scaled;
            }
            series.alpha[s * series.target_count + t] = best;
        }
    }
    return series;
}

/// Where a species' overall importance came from: the sample and target-list
/// position achieving the max. target -1 marks the modified-DFS combined
/// vector; sample -1 marks a species that never scored above zero.
struct ImportanceProvenance {
    int sample = -1;
    int target = -1;
};

/// Overall importance per species: max over targets, datasets, and samples of
/// alpha_T * R_TS.
struct ImportanceVector {
    std::vector<double> values;
    std::vector<ImportanceProvenance> provenance;
    std::int64_t clamp_count = 0;
    std::vector<std::pair<std::string, double>> timings;  // phase -> wall seconds
};

namespace detail {

inline OICVector run_search(const InteractionGraph& graph, const std::vector<int>& targets,
                            std::size_t target_pos, const ReductionConfig& config) {
    switch (config.algorithm) {
        case Algorithm::dfs: return search_dfs(graph, targets[target_pos]);
        case Algorithm::modified_dfs: return search_modified_dfs(graph, targets);
        case Algorithm::bfs: return search_bfs(graph, targets[target_pos]);
        case Algorithm::rbfs: return search_rbfs(graph, targets[target_pos], *config.threshold);
        case Algorithm::dijkstra:
            return search_dijkstra(graph, targets[target_pos],
                                   DijkstraOptions{config.queue, config.use_adjacency, {}});
    }
    throw Error("unknown algorithm");
}

}  // namespace detail

inline ImportanceVector overall_importance(const Mechanism& mech, const RateSampleSet& samples,
                                           const ReductionConfig& config) {
    validate_config(config);
    const std::vector<int> targets = resolve_targets(mech, config.targets);
    if (samples.samples.empty()) throw Error("no rate samples");
    const auto n = static_cast<std::size_t>(mech.species_count());
    const std::size_t n_samples = samples.samples.size();
    const bool combined = config.algorithm == Algorithm::modified_dfs;

    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    auto seconds_since = [](clock::time_point from) {
        return std::chrono::duration<double>(clock::now() - from).count();
    };

    ScalingSeries scaling;
    const auto t_scaling = clock::now();
    if (config.scaling) scaling = scaling_coefficients(mech, samples, targets);
    const double scaling_seconds = seconds_since(t_scaling);

    // Per-sample best contribution and the target achieving it. Filled in
    // parallel over samples; slots are disjoint, so no synchronization.
    std::vector<std::vector<double>> contribution(n_samples);
    std::vector<std::vector<int>> arg_target(n_samples);
    std::vector<std::int64_t> clamp_counts(n_samples, 0);

    const auto t_samples = clock::now();
    auto process_sample = [&](std::size_t s) {
        const RateSample& sample = samples.samples[s];
        const SpeciesFlux flux = species_flux(mech, sample);
        const InteractionGraph graph = build_graph(mech, sample, flux);
        clamp_counts[s] = graph.clamp_count;

        auto& best = contribution[s];
        auto& arg = arg_target[s];
        best.assign(n, 0.0);
        arg.assign(n, -1);
        if (combined) {
            const OICVector oic = detail::run_search(graph, targets, 0, config);
            best = oic.values;
        } else {
            for (std::size_t t = 0; t < targets.size(); ++t) {
                const OICVector oic = detail::run_search(graph, targets, t, config);
                const double alpha = config.scaling ? scaling.at(s, t) : 1.0;
                if (alpha == 0.0) continue;
                for (std::size_t sp = 0; sp < n; ++sp) {
                    const double value = alpha * oic.values[sp];
                    if (value > best[sp]) {
                        best[sp] = value;
                        arg[sp] = static_cast<int>(t);
                    }
                }
            }
        }
    };
    if (config.jobs <= 1 || n_samples <= 1) {
        for (std::size_t s = 0; s < n_samples; ++s) process_sample(s);
    } else {
        const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), n_samples);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t s = w; s < n_samples; s += workers) process_sample(s);
            });
        for (auto& th : pool) th.join();
    }
    const double samples_seconds = seconds_since(t_samples);

    // Deterministic reduction in sample order: strict improvement keeps the
    // earliest (sample, target) pair on ties.
    const auto t_combine = clock::now();
    ImportanceVector importance;
    importance.values.assign(n, 0.0);
    importance.provenance.assign(n, ImportanceProvenance{});
    for (std::size_t s = 0; s < n_samples; ++s) {
        importance.clamp_count += clamp_counts[s];
        for (std::size_t sp = 0; sp < n; ++sp) {
            if (contribution[s][sp] > importance.values[sp]) {
                importance.values[sp] = contribution[s][sp];
                importance.provenance[sp] = {static_cast<int>(s), arg_target[s][sp]};
            }
        }
    }
    const double combine_seconds = seconds_since(t_combine);

    importance.timings = {{"scaling_seconds", scaling_seconds},
                          {"samples_seconds", samples_seconds},
                          {"combine_seconds", combine_seconds},
                          {"total_seconds", seconds_since(t_start)}};
    return importance;
}

struct ReductionReport {
    double threshold = 0.0;
    std::vector<int> retained_indices;        // original mechanism order
    std::vector<std::string> retained_names;  // same order
    int retained_reaction_count = 0;
    ImportanceVector importance;
    std::int64_t clamp_count = 0;
    std::vector<std::pair<std::string, double>> timings;
};

/// Applies the cutoff: retained = {S : importance >= epsilon} plus all
/// targets (targets are kept unconditionally).
inline ReductionReport reduce_at_threshold(const Mechanism& mech, const ImportanceVector& importance,
                                           double epsilon, const std::vector<int>& targets) {
    if (!(epsilon > 0.0) || epsilon > 1.0) throw Error("threshold must lie in (0, 1]");
    if (importance.values.size() != static_cast<std::size_t>(mech.species_count()))
        throw Error("importance vector size does not match mechanism");

    ReductionReport report;
    report.threshold = epsilon;
    report.importance = importance;
    report.clamp_count = importance.clamp_count;
    report.timings = importance.timings;

    std::vector<bool> keep(importance.values.size(), false);
    for (std::size_t sp = 0; sp < importance.values.size(); ++sp)
        if (importance.values[sp] >= epsilon) keep[sp] = true;
    for (int t : targets) keep[static_cast<std::size_t>(t)] = true;

    for (std::size_t sp = 0; sp < keep.size(); ++sp) {
        if (!keep[sp]) continue;
        report.retained_indices.push_back(static_cast<int>(sp));
        report.retained_names.push_back(mech.species[sp].name);
    }
    report.retained_reaction_count = static_cast<int>(surviving_reactions(mech, keep).size());
    return report;
}

struct ThresholdCandidate {
    double epsilon = 0.0;
    double error_percent = 0.0;
    std::size_t retained_species = 0;
};

struct SelectionResult {
    ReductionReport report;
    std::vector<ThresholdCandidate> candidates;
};

namespace detail {

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

/// Runs `<oracle> <skeletal> <detailed>` and parses the single decimal number
/// (max error, percent) it must print on stdout.
inline double invoke_error_oracle(const std::string& oracle, const std::string& skeletal_path,
                                  const std::string& detailed_path) {
    const std::string cmd =
        shell_quote(oracle) + ' ' + shell_quote(skeletal_path) + ' ' + shell_quote(detailed_path);
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw OracleError("failed to launch error oracle: " + oracle);
    std::string output;
    char buf[256];
    std::size_t got;
    while ((got = ::fread(buf, 1, sizeof(buf), pipe)) > 0) output.append(buf, got);
    const int status = ::pclose(pipe);
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw OracleError("error oracle exited with status " +
                          std::to_string(WIFEXITED(status) ? WEXITSTATUS(status) : -1));
    double value = 0.0;
    if (!parse_double(trim(output), value))
        throw OracleError("error oracle printed unparseable output: '" + std::string(trim(output)) + "'");
    return value;
}

}  // namespace detail

/// Sweeps the realized importance values in ascending order as candidate
/// thresholds, asks the external oracle for the error of each skeletal
/// mechanism, and returns the largest threshold whose error stays within
/// error_limit. The smallest candidate retains every reachable species, so
/// the sweep is exhaustive over achievable reductions.
inline SelectionResult select_threshold(const Mechanism& mech, const RateSampleSet& samples,
                                        const ReductionConfig& config, const std::string& oracle_path,
                                        double error_limit, const std::string& detailed_path,
                                        const std::string& work_dir) {
    if (!(error_limit > 0.0)) throw Error("error limit must be positive");
    if (config.algorithm == Algorithm::rbfs)
        throw Error("threshold selection needs a threshold-free search; RBFS requires the "
                    "threshold a priori (use --epsilon instead of --error-limit)");
    const std::vector<int> targets = resolve_targets(mech, config.targets);
    const ImportanceVector importance = overall_importance(mech, samples, config);

    std::vector<double> candidates;
    for (double v : importance.values)
        if (v > 0.0 && v <= 1.0) candidates.push_back(v);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.empty()) throw Error("no positive importance values; nothing to select");

    namespace fs = std::filesystem;
    fs::create_directories(work_dir);
    const std::string skeletal_path = (fs::path(work_dir) / "candidate.mech").string();

    SelectionResult result;
    std::optional<double> best_pass;
    for (double epsilon : candidates) {
        const ReductionReport report = reduce_at_threshold(mech, importance, epsilon, targets);
        {
            std::ofstream out(skeletal_path, std::ios::trunc);
            if (!out) throw Error("cannot write candidate mechanism to " + skeletal_path);
            out << emit_skeletal_mechanism(mech, report.retained_indices);
        }
        double error = 0.0;
        try {
            error = detail::invoke_error_oracle(oracle_path, skeletal_path, detailed_path);
        } catch (const OracleError& e) {
            throw OracleError(std::string(e.what()) + " (candidate threshold " + format_double(epsilon) + ")");
        }
        result.candidates.push_back({epsilon, error, report.retained_names.size()});
        if (error <= error_limit) best_pass = epsilon;
    }

    if (!best_pass) {
        const auto best = std::min_element(
            result.candidates.begin(), result.candidates.end(),
            [](const ThresholdCandidate& a, const ThresholdCandidate& b) { return a.error_percent < b.error_percent; });
        throw Error("no candidate threshold meets the error limit of " + format_double(error_limit) +
                    "%; best was threshold " + format_double(best->epsilon) + " with error " +
                    format_double(best->error_percent) + "%");
    }
    result.report = reduce_at_threshold(mech, importance, *best_pass, targets);
    return result;
}

struct OrderIndependenceReport {
    Algorithm algorithm = Algorithm::dijkstra;
    bool values_checked = false;  // value comparison gates the verdict (Dijkstra/RBFS)
    bool independent = false;
    std::vector<std::string> baseline_retained;  // sorted names
    struct SeedOutcome {
        std::uint64_t seed = 0;
        bool retained_match = false;
        bool values_match = false;
    };
    std::vector<SeedOutcome> seeds;
};

/// Shuffles the species order with each seed, reruns the whole reduction, and
/// compares against the unshuffled run: retained name sets always, and exact
/// importance values under the inverse permutation for Dijkstra and RBFS.
/// Rates are indexed by reaction, and reaction order is preserved by the
/// shuffle, so the sample set is reused as is.
inline OrderIndependenceReport check_order_independence(const Mechanism& mech, const RateSampleSet& samples,
                                                        const ReductionConfig& config,
                                                        const std::vector<std::uint64_t>& seeds) {
    if (seeds.empty()) throw Error("at least one shuffle seed is required");
    if (!config.threshold) throw Error("order-independence check requires a threshold");
    validate_config(config);

    const std::vector<int> base_targets = resolve_targets(mech, config.targets);
    const ImportanceVector base_importance = overall_importance(mech, samples, config);
    const ReductionReport base_report =
        reduce_at_threshold(mech, base_importance, *config.threshold, base_targets);

    OrderIndependenceReport report;
    report.algorithm = config.algorithm;
    report.values_checked =
        config.algorithm == Algorithm::dijkstra || config.algorithm == Algorithm::rbfs;
    report.baseline_retained = base_report.retained_names;
    std::sort(report.baseline_retained.begin(), report.baseline_retained.end());

    report.independent = true;
    for (std::uint64_t seed : seeds) {
        const ShuffleResult shuffled = shuffle_species(mech, seed);
        const std::vector<int> targets = resolve_targets(shuffled.mechanism, config.targets);
        const ImportanceVector importance = overall_importance(shuffled.mechanism, samples, config);
        const ReductionReport shuffled_report =
            reduce_at_threshold(shuffled.mechanism, importance, *config.threshold, targets);

        std::vector<std::string> retained = shuffled_report.retained_names;
        std::sort(retained.begin(), retained.end());

        OrderIndependenceReport::SeedOutcome outcome;
        outcome.seed = seed;
        outcome.retained_match = retained == report.baseline_retained;
        outcome.values_match = true;
        for (std::size_t sp = 0; sp < base_importance.values.size(); ++sp) {
            const auto mapped = static_cast<std::size_t>(shuffled.permutation[sp]);
            if (importance.values[mapped] != base_importance.values[sp]) {
                outcome.values_match = false;
                break;
            }
        }
        if (!outcome.retained_match || (report.values_checked && !outcome.values_match))
            report.independent = false;
        report.seeds.push_back(outcome);
    }
    return report;
}

}  // namespace drgep
