// Command-line front end for the DRGEP mechanism-reduction toolkit.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "drgep/drgep.hpp"
#include "drgep/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "drgep 1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw drgep::Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw drgep::Error("cannot write '" + path + "'");
    out << content;
}

std::string file_stem(const std::string& path) { return fs::path(path).stem().string(); }

/// Every output location gets a manifest recording the exact invocation, so
/// any run can be reproduced with `drgep rerun --manifest <file>`.
void write_manifest(const std::string& manifest_path, const std::vector<std::string>& argv,
                    const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
    json manifest;
    manifest["command"] = argv.empty() ? "" : argv.front();
    manifest["argv"] = argv;
    manifest["inputs"] = inputs;
    manifest["outputs"] = outputs;
    manifest["version"] = kToolVersion;
    write_file(manifest_path, manifest.dump(2) + "\n");
}

drgep::Algorithm parse_algorithm_flag(const std::string& name) {
    auto alg = drgep::parse_algorithm(name);
    if (!alg)
        throw drgep::Error("unknown algorithm '" + name +
                           "'; expected dfs, modified-dfs, bfs, rbfs, or dijkstra");
    return *alg;
}

drgep::QueueKind parse_queue_flag(const std::string& name) {
    auto kind = drgep::parse_queue_kind(name);
    if (!kind)
        throw drgep::Error("unknown queue '" + name + "'; expected naive, binary-heap, or fibonacci-heap");
    return *kind;
}

drgep::RateSampleSet load_rates_files(const std::vector<std::string>& paths, const drgep::Mechanism& mech) {
    std::vector<drgep::RateSampleSet> sets;
    sets.reserve(paths.size());
    for (const auto& path : paths) {
        try {
            sets.push_back(drgep::load_rate_samples(read_file(path), mech, file_stem(path)));
        } catch (const drgep::ParseError& e) {
            throw drgep::Error(std::string(e.what()) + " in '" + path + "'");
        }
    }
    return drgep::merge_rate_sample_sets(sets);
}

struct CommonSearchFlags {
    std::string mech_path;
    std::vector<std::string> targets;
    std::string algorithm;
    std::string queue = "binary-heap";
    bool dense = false;
    bool scaling = false;
    std::optional<double> epsilon;
    int jobs = 1;
};

void add_algorithm_flags(CLI::App* cmd, CommonSearchFlags& flags, bool with_scaling) {
    cmd->add_option("--mech", flags.mech_path, "Mechanism file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--targets", flags.targets, "Target species names (comma separated)")
        ->required()
        ->delimiter(',');
    cmd->add_option("--algorithm", flags.algorithm,
                    "Search algorithm: dfs, modified-dfs, bfs, rbfs, dijkstra")
        ->required();
    cmd->add_option("--queue", flags.queue,
                    "Dijkstra priority queue: naive, binary-heap, fibonacci-heap (default binary-heap)");
    cmd->add_flag("--dense", flags.dense,
                  "Scan a dense weight matrix instead of adjacency lists (naive Dijkstra)");
    if (with_scaling)
        cmd->add_flag("--scaling", flags.scaling, "Apply target-based coefficient scaling");
}

drgep::ReductionConfig make_config(const CommonSearchFlags& flags) {
    drgep::ReductionConfig config;
    config.targets = flags.targets;
    config.threshold = flags.epsilon;
    config.scaling = flags.scaling;
    config.algorithm = parse_algorithm_flag(flags.algorithm);
    config.queue = parse_queue_flag(flags.queue);
    config.use_adjacency = !flags.dense;
    config.jobs = flags.jobs;
    return config;
}

std::vector<drgep::InteractionGraph> load_graph_files(const std::vector<std::string>& paths) {
    std::vector<drgep::InteractionGraph> graphs;
    graphs.reserve(paths.size());
    for (const auto& path : paths) {
        try {
            graphs.push_back(drgep::parse_edge_list(read_file(path)).graph);
        } catch (const drgep::ParseError& e) {
            throw drgep::Error(std::string(e.what()) + " in '" + path + "'");
        }
    }
    return graphs;
}

int run(const std::vector<std::string>& args);

// ---------------------------------------------------------------------------
// reduce

struct ReduceFlags {
    CommonSearchFlags common;
    std::vector<std::string> rates;
    double epsilon = 0.0;
    double error_limit = 0.0;
    std::string oracle;
    std::string out_dir;
};

void cmd_reduce(const ReduceFlags& flags, bool have_epsilon, bool have_error_limit,
                const std::vector<std::string>& argv) {
    if (have_epsilon == have_error_limit)
        throw drgep::Error("choose exactly one of --epsilon or --error-limit");
    if (have_error_limit && flags.oracle.empty())
        throw drgep::Error("--error-limit requires --oracle");

    drgep::Mechanism mech = drgep::parse_mechanism(read_file(flags.common.mech_path));
    mech.name = file_stem(flags.common.mech_path);
    const drgep::RateSampleSet samples = load_rates_files(flags.rates, mech);

    CommonSearchFlags common = flags.common;
    if (have_epsilon) common.epsilon = flags.epsilon;
    drgep::ReductionConfig config = make_config(common);

    fs::create_directories(flags.out_dir);
    drgep::ReductionReport report;
    if (have_epsilon) {
        const auto targets = drgep::resolve_targets(mech, config.targets);
        const auto importance = drgep::overall_importance(mech, samples, config);
        report = drgep::reduce_at_threshold(mech, importance, flags.epsilon, targets);
    } else {
        if (!(flags.error_limit > 0.0)) throw drgep::Error("--error-limit must be positive");
        config.error_limit = flags.error_limit;
        const auto selection =
            drgep::select_threshold(mech, samples, config, flags.oracle, flags.error_limit,
                                    flags.common.mech_path, (fs::path(flags.out_dir) / "work").string());
        for (const auto& candidate : selection.candidates)
            std::cout << "candidate threshold=" << drgep::format_double(candidate.epsilon)
                      << " error=" << drgep::format_double(candidate.error_percent)
                      << "% retained=" << candidate.retained_species << "\n";
        report = selection.report;
    }

    const std::string report_path = (fs::path(flags.out_dir) / "report.json").string();
    const std::string csv_path = (fs::path(flags.out_dir) / "importance.csv").string();
    const std::string skeletal_path = (fs::path(flags.out_dir) / "skeletal.mech").string();
    write_file(report_path, drgep::report_json(mech, report).dump(2) + "\n");
    write_file(csv_path, drgep::report_csv(mech, report));
    write_file(skeletal_path, drgep::emit_skeletal_mechanism(mech, report.retained_indices));
    write_manifest((fs::path(flags.out_dir) / "manifest.json").string(), argv,
                   [&] {
                       std::vector<std::string> inputs{flags.common.mech_path};
                       inputs.insert(inputs.end(), flags.rates.begin(), flags.rates.end());
                       return inputs;
                   }(),
                   {report_path, csv_path, skeletal_path});

    std::cout << "threshold " << drgep::format_double(report.threshold) << ": retained "
              << report.retained_names.size() << " of " << mech.species_count() << " species, "
              << report.retained_reaction_count << " of " << mech.reaction_count() << " reactions\n";
}

// ---------------------------------------------------------------------------
// search

struct SearchFlags {
    CommonSearchFlags common;
    std::string rates;
    int sample_index = 0;
    std::string out_dir;
};

void cmd_search(const SearchFlags& flags, const std::vector<std::string>& argv) {
    drgep::Mechanism mech = drgep::parse_mechanism(read_file(flags.common.mech_path));
    mech.name = file_stem(flags.common.mech_path);
    const drgep::RateSampleSet samples = load_rates_files({flags.rates}, mech);
    if (flags.sample_index < 0 || static_cast<std::size_t>(flags.sample_index) >= samples.samples.size())
        throw drgep::Error("--sample-index out of range; file has " +
                           std::to_string(samples.samples.size()) + " samples");

    const drgep::ReductionConfig config = make_config(flags.common);
    drgep::validate_config(config);
    const std::vector<int> targets = drgep::resolve_targets(mech, config.targets);
    const drgep::InteractionGraph graph =
        drgep::build_graph(mech, samples.samples[static_cast<std::size_t>(flags.sample_index)]);

    std::vector<drgep::OICVector> columns;
    std::vector<std::string> headers;
    if (config.algorithm == drgep::Algorithm::modified_dfs) {
        columns.push_back(drgep::search_modified_dfs(graph, targets));
        headers.push_back("combined");
    } else {
        for (std::size_t t = 0; t < targets.size(); ++t) {
            switch (config.algorithm) {
                case drgep::Algorithm::dfs: columns.push_back(drgep::search_dfs(graph, targets[t])); break;
                case drgep::Algorithm::bfs: columns.push_back(drgep::search_bfs(graph, targets[t])); break;
                case drgep::Algorithm::rbfs:
                    columns.push_back(drgep::search_rbfs(graph, targets[t], *config.threshold));
                    break;
                default:
                    columns.push_back(drgep::search_dijkstra(
                        graph, targets[t], drgep::DijkstraOptions{config.queue, config.use_adjacency, {}}));
                    break;
            }
            headers.push_back(config.targets[t]);
        }
    }

    std::ostringstream csv;
    csv << "species";
    for (const auto& h : headers) csv << ',' << drgep::to_upper(h);
    csv << '\n';
    for (int sp = 0; sp < mech.species_count(); ++sp) {
        csv << mech.species[static_cast<std::size_t>(sp)].name;
        for (const auto& column : columns)
            csv << ',' << drgep::format_double(column.values[static_cast<std::size_t>(sp)]);
        csv << '\n';
    }

    if (flags.out_dir.empty()) {
        std::cout << csv.str();
        return;
    }
    fs::create_directories(flags.out_dir);
    const std::string csv_path = (fs::path(flags.out_dir) / "oic.csv").string();
    write_file(csv_path, csv.str());
    write_manifest((fs::path(flags.out_dir) / "manifest.json").string(), argv,
                   {flags.common.mech_path, flags.rates}, {csv_path});
    std::cout << "wrote " << csv_path << "\n";
}

// ---------------------------------------------------------------------------
// shuffle-test

struct ShuffleTestFlags {
    CommonSearchFlags common;
    std::vector<std::string> rates;
    double epsilon = 0.0;
    std::vector<std::uint64_t> seeds;
    std::string out_dir;
};

void cmd_shuffle_test(const ShuffleTestFlags& flags, const std::vector<std::string>& argv) {
    drgep::Mechanism mech = drgep::parse_mechanism(read_file(flags.common.mech_path));
    mech.name = file_stem(flags.common.mech_path);
    const drgep::RateSampleSet samples = load_rates_files(flags.rates, mech);

    CommonSearchFlags common = flags.common;
    common.epsilon = flags.epsilon;
    const drgep::ReductionConfig config = make_config(common);
    const drgep::OrderIndependenceReport report =
        drgep::check_order_independence(mech, samples, config, flags.seeds);

    fs::create_directories(flags.out_dir);
    const std::string report_path = (fs::path(flags.out_dir) / "shuffle_report.json").string();
    write_file(report_path, drgep::order_independence_json(report).dump(2) + "\n");
    write_manifest((fs::path(flags.out_dir) / "manifest.json").string(), argv,
                   [&] {
                       std::vector<std::string> inputs{flags.common.mech_path};
                       inputs.insert(inputs.end(), flags.rates.begin(), flags.rates.end());
                       return inputs;
                   }(),
                   {report_path});
    std::cout << to_string(report.algorithm) << " over " << report.seeds.size()
              << " shuffles: " << (report.independent ? "order-independent" : "order-DEPENDENT") << "\n";
}

// ---------------------------------------------------------------------------
// generators and benchmarks

void cmd_gen_samples(const std::string& mech_path, std::uint64_t seed, int count,
                     const std::string& dataset_id, const std::string& out_file,
                     const std::vector<std::string>& argv) {
    const drgep::Mechanism mech = drgep::parse_mechanism(read_file(mech_path));
    const drgep::RateSampleSet set = drgep::generate_synthetic_samples(mech, seed, count);
    std::ostringstream out;
    out << "dataset=" << (dataset_id.empty() ? set.samples.front().dataset_id : dataset_id) << '\n';
    for (const auto& sample : set.samples) {
        out << drgep::format_double(sample.time);
        for (double w : sample.omega) out << ' ' << drgep::format_double(w);
        out << '\n';
    }
    write_file(out_file, out.str());
    write_manifest(out_file + ".manifest.json", argv, {mech_path}, {out_file});
    std::cout << "wrote " << out_file << " (" << set.samples.size() << " samples)\n";
}

void cmd_gen_graph(int nodes, std::int64_t edges, std::uint64_t seed, const std::string& out_file,
                   const std::vector<std::string>& argv) {
    const drgep::InteractionGraph graph = drgep::generate_random_graph(nodes, edges, seed);
    write_file(out_file, drgep::dump_edge_list(graph));
    write_manifest(out_file + ".manifest.json", argv, {}, {out_file});
    std::cout << "wrote " << out_file << " (" << graph.n << " nodes, " << graph.edge_count << " edges)\n";
}

void cmd_bench(const std::vector<std::string>& graph_files, const std::vector<int>& targets,
               const std::vector<std::string>& algorithm_names, int reps, std::optional<double> epsilon,
               const std::string& out_file, const std::vector<std::string>& argv) {
    const auto graphs = load_graph_files(graph_files);
    std::vector<drgep::BenchAlgorithm> algorithms;
    if (algorithm_names.empty()) {
        algorithms = drgep::default_bench_algorithms();
    } else {
        for (const auto& name : algorithm_names) {
            auto spec = drgep::parse_bench_algorithm(name);
            if (!spec)
                throw drgep::Error("unknown benchmark algorithm '" + name +
                                   "'; expected dfs, modified-dfs, bfs, rbfs, or dijkstra-{naive,"
                                   "adjacency,binary-heap,fibonacci-heap}");
            if (spec->algorithm == drgep::Algorithm::rbfs) spec->epsilon = epsilon;
            algorithms.push_back(*spec);
        }
    }
    const auto results = drgep::run_benchmark(graphs, targets, algorithms, reps);
    write_file(out_file, drgep::bench_csv(results, false));
    write_manifest(out_file + ".manifest.json", argv, graph_files, {out_file});
    std::cout << "wrote " << out_file << " (" << results.size() << " rows)\n";
}

void cmd_bench_sweep(const std::vector<std::string>& graph_files, const std::vector<int>& targets,
                     std::vector<double> epsilons, int reps, const std::string& out_file,
                     const std::vector<std::string>& argv) {
    const auto graphs = load_graph_files(graph_files);
    std::sort(epsilons.begin(), epsilons.end());
    const auto results = drgep::threshold_sweep_benchmark(graphs, targets, epsilons, reps);
    write_file(out_file, drgep::bench_csv(results, true));
    write_manifest(out_file + ".manifest.json", argv, graph_files, {out_file});
    std::cout << "wrote " << out_file << " (" << results.size() << " rows)\n";
}

void cmd_rerun(const std::string& manifest_path) {
    const json manifest = json::parse(read_file(manifest_path));
    if (!manifest.contains("argv") || !manifest["argv"].is_array())
        throw drgep::Error("manifest has no argv array: " + manifest_path);
    std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "rerun") throw drgep::Error("refusing to rerun a rerun manifest");
    const int code = run(argv);
    if (code != 0) throw drgep::Error("rerun exited with code " + std::to_string(code));
}

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args) {
    CLI::App app{"DRGEP skeletal mechanism reduction with selectable graph search back ends"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // reduce
    ReduceFlags reduce;
    auto* reduce_cmd = app.add_subcommand(
        "reduce", "Reduce a mechanism: compute overall importance, apply or select a threshold, "
                  "and emit the skeletal mechanism");
    add_algorithm_flags(reduce_cmd, reduce.common, true);
    reduce_cmd->add_option("--rates", reduce.rates, "Rates file, one dataset per file (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    auto* reduce_eps = reduce_cmd->add_option("--epsilon", reduce.epsilon, "Cutoff threshold in (0, 1]");
    auto* reduce_lim = reduce_cmd->add_option(
        "--error-limit", reduce.error_limit, "Max oracle error percent for threshold selection");
    reduce_cmd->add_option("--oracle", reduce.oracle,
                           "Error oracle: invoked as '<oracle> <skeletal> <detailed>', prints a "
                           "percent on stdout");
    reduce_cmd->add_option("--jobs", reduce.common.jobs, "Parallel sample workers (default 1)");
    reduce_cmd->add_option("--out", reduce.out_dir, "Output directory")->required();

    // search
    SearchFlags search;
    auto* search_cmd =
        app.add_subcommand("search", "Dump per-target OIC values for one rate sample as CSV");
    add_algorithm_flags(search_cmd, search.common, false);
    search_cmd->add_option("--rates", search.rates, "Rates file")->required()->check(CLI::ExistingFile);
    search_cmd->add_option("--sample-index", search.sample_index, "Row of the rates file to use (default 0)");
    auto* search_eps = search_cmd->add_option("--epsilon", search.common.epsilon, "RBFS pruning threshold");
    search_cmd->add_option("--out", search.out_dir, "Output directory (omit to print to stdout)");

    // shuffle-test
    ShuffleTestFlags shuffle;
    auto* shuffle_cmd = app.add_subcommand(
        "shuffle-test", "Rerun the reduction under seeded species shuffles and report whether "
                        "results depend on species order");
    add_algorithm_flags(shuffle_cmd, shuffle.common, true);
    shuffle_cmd->add_option("--rates", shuffle.rates, "Rates file (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    shuffle_cmd->add_option("--epsilon", shuffle.epsilon, "Cutoff threshold in (0, 1]")->required();
    shuffle_cmd->add_option("--seeds", shuffle.seeds, "Shuffle seeds (comma separated)")
        ->required()
        ->delimiter(',');
    shuffle_cmd->add_option("--jobs", shuffle.common.jobs, "Parallel sample workers (default 1)");
    shuffle_cmd->add_option("--out", shuffle.out_dir, "Output directory")->required();

    // gen-samples
    std::string gs_mech, gs_dataset, gs_out;
    std::uint64_t gs_seed = 0;
    int gs_count = 1;
    auto* gen_samples_cmd =
        app.add_subcommand("gen-samples", "Generate seeded synthetic rate samples for a mechanism");
    gen_samples_cmd->add_option("--mech", gs_mech, "Mechanism file")->required()->check(CLI::ExistingFile);
    gen_samples_cmd->add_option("--seed", gs_seed, "RNG seed")->required();
    gen_samples_cmd->add_option("--count", gs_count, "Number of samples")->required();
    gen_samples_cmd->add_option("--dataset-id", gs_dataset, "Dataset id (default synthetic-<seed>)");
    gen_samples_cmd->add_option("-o,--output", gs_out, "Output rates file")->required();

    // gen-graph
    int gg_nodes = 0;
    std::int64_t gg_edges = -1;
    std::uint64_t gg_seed = 0;
    std::string gg_out;
    auto* gen_graph_cmd =
        app.add_subcommand("gen-graph", "Generate a seeded random sparse graph as an edge list");
    gen_graph_cmd->add_option("--nodes", gg_nodes, "Node count")->required();
    gen_graph_cmd->add_option("--edges", gg_edges, "Edge count (default 10x nodes)");
    gen_graph_cmd->add_option("--seed", gg_seed, "RNG seed")->required();
    gen_graph_cmd->add_option("-o,--output", gg_out, "Output edge-list file")->required();

    // bench
    std::vector<std::string> b_graphs, b_algorithms;
    std::vector<int> b_targets{0};
    int b_reps = 10;
    double b_epsilon = 0.0;
    std::string b_out;
    auto* bench_cmd = app.add_subcommand(
        "bench", "Time the per-target search cost of each algorithm on edge-list graphs (CSV out)");
    bench_cmd->add_option("--graph", b_graphs, "Edge-list graph file (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--targets", b_targets, "Target node indices (default 0)")->delimiter(',');
    bench_cmd->add_option("--algorithms", b_algorithms,
                          "Algorithms to time (default: dfs, modified-dfs, bfs, and all four "
                          "dijkstra variants)")
        ->delimiter(',');
    bench_cmd->add_option("--reps", b_reps, "Timed repetitions after one warm-up (default 10, min 3)");
    auto* bench_eps = bench_cmd->add_option("--epsilon", b_epsilon, "Threshold for rbfs timing");
    bench_cmd->add_option("-o,--output", b_out, "Output CSV file")->required();

    // bench-sweep
    std::vector<std::string> bs_graphs;
    std::vector<int> bs_targets{0};
    std::vector<double> bs_epsilons;
    int bs_reps = 5;
    std::string bs_out;
    auto* sweep_cmd = app.add_subcommand(
        "bench-sweep", "Time RBFS and threshold-pruned Dijkstra across a threshold sweep (CSV out)");
    sweep_cmd->add_option("--graph", bs_graphs, "Edge-list graph file (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    sweep_cmd->add_option("--targets", bs_targets, "Target node indices (default 0)")->delimiter(',');
    sweep_cmd->add_option("--epsilons", bs_epsilons, "Thresholds to sweep (comma separated)")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--reps", bs_reps, "Timed repetitions after one warm-up (default 5, min 3)");
    sweep_cmd->add_option("-o,--output", bs_out, "Output CSV file")->required();

    // rerun
    std::string rr_manifest;
    auto* rerun_cmd =
        app.add_subcommand("rerun", "Re-execute the command recorded in a manifest file");
    rerun_cmd->add_option("--manifest", rr_manifest, "Manifest file written by a previous run")
        ->required()
        ->check(CLI::ExistingFile);

    std::vector<std::string> cli_args(args.rbegin(), args.rend());  // CLI11 wants reverse order
    try {
        app.parse(cli_args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (reduce_cmd->parsed())
        cmd_reduce(reduce, reduce_eps->count() > 0, reduce_lim->count() > 0, args);
    else if (search_cmd->parsed()) {
        if (search_eps->count() == 0) search.common.epsilon.reset();
        cmd_search(search, args);
    } else if (shuffle_cmd->parsed())
        cmd_shuffle_test(shuffle, args);
    else if (gen_samples_cmd->parsed())
        cmd_gen_samples(gs_mech, gs_seed, gs_count, gs_dataset, gs_out, args);
    else if (gen_graph_cmd->parsed())
        cmd_gen_graph(gg_nodes, gg_edges < 0 ? static_cast<std::int64_t>(gg_nodes) * 10 : gg_edges,
                      gg_seed, gg_out, args);
    else if (bench_cmd->parsed())
        cmd_bench(b_graphs, b_targets, b_algorithms, b_reps,
                  bench_eps->count() > 0 ? std::optional<double>(b_epsilon) : std::nullopt, b_out, args);
    else if (sweep_cmd->parsed())
        cmd_bench_sweep(bs_graphs, bs_targets, bs_epsilons, bs_reps, bs_out, args);
    else if (rerun_cmd->parsed())
        cmd_rerun(rr_manifest);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args);
    } catch (const drgep::OracleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
