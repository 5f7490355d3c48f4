#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "drgep/common.hpp"
#include "drgep/kinetics.hpp"
#include "drgep/mechanism.hpp"

namespace drgep {

/// Weighted digraph of direct interaction coefficients for one rate sample.
/// Nodes are species; an edge A->B with weight r_AB > 0 means A's net
/// production depends on B. Adjacency lists are sorted by target index, which
/// pins the exploration order of every search. Weights lie in (0, 1]; DIC
/// values above 1 are clamped and counted in clamp_count.
struct InteractionGraph {
    struct Edge {
        int to;
        double weight;
    };

    int n = 0;
    std::vector<std::vector<Edge>> adjacency;
    std::int64_t edge_count = 0;
    std::int64_t clamp_count = 0;

    const std::vector<Edge>& neighbors(int node) const {
        return adjacency[static_cast<std::size_t>(node)];
    }
};

/// Dense n*n weight matrix view of a graph; entry (u, v) is the edge weight
/// or 0. Backs the naive Dijkstra implementation that scans all nodes instead
/// of walking adjacency lists.
struct DenseGraph {
    int n = 0;
    std::vector<double> weights;  // row-major, weights[u * n + v]

    static DenseGraph from(const InteractionGraph& g) {
        DenseGraph d;
        d.n = g.n;
        d.weights.assign(static_cast<std::size_t>(g.n) * static_cast<std::size_t>(g.n), 0.0);
        for (int u = 0; u < g.n; ++u)
            for (const auto& e : g.neighbors(u))
                d.weights[static_cast<std::size_t>(u) * static_cast<std::size_t>(g.n) +
                          static_cast<std::size_t>(e.to)] = e.weight;
        return d;
    }

    double weight(int u, int v) const {
        return weights[static_cast<std::size_t>(u) * static_cast<std::size_t>(n) + static_cast<std::size_t>(v)];
    }
};

/// Direct interaction coefficient of species A on species B:
///
///   r_AB = |sum_i nu_Ai * omega_i * delta_Bi| / max(P_A, C_A)
///
/// clamped to at most 1. Returns 0 when max(P_A, C_A) = 0: a species with no
/// flux depends on nothing at this sample. flux must come from the same
/// sample. A == B is a contract violation.
inline double compute_dic(const Mechanism& mech, const RateSample& sample, const SpeciesFlux& flux,
                          int species_a, int species_b) {
    if (species_a == species_b) throw Error("compute_dic requires two distinct species");
    const auto a = static_cast<std::size_t>(species_a);
    const double denom = std::max(flux.production[a], flux.consumption[a]);
    if (denom <= 0.0) return 0.0;
    double numerator = 0.0;
    for (std::size_t i = 0; i < mech.reactions.size(); ++i) {
        const Reaction& rxn = mech.reactions[i];
        if (!rxn.involves(species_b)) continue;
        numerator += rxn.net_coefficient(species_a) * sample.omega[i];
    }
    const double r = std::abs(numerator) / denom;
    return r > 1.0 ? 1.0 : r;
}

/// Builds the full interaction graph for one sample by iterating reactions
/// rather than all species pairs: cost O(sum_i |participants_i|^2). Numerator
/// contributions accumulate in reaction order per pair, so weights are
/// bit-identical under species relabeling.
inline InteractionGraph build_graph(const Mechanism& mech, const RateSample& sample,
                                    const SpeciesFlux& flux) {
    const int n = mech.species_count();
    InteractionGraph g;
    g.n = n;
    g.adjacency.resize(static_cast<std::size_t>(n));

    // numerators[(A << 32) | B] = sum_i nu_Ai * omega_i * delta_Bi
    std::unordered_map<std::uint64_t, double> numerators;
    numerators.reserve(mech.reactions.size() * 8);
    for (std::size_t i = 0; i < mech.reactions.size(); ++i) {
        const Reaction& rxn = mech.reactions[i];
        const double omega = sample.omega[i];
        for (std::size_t t = 0; t < rxn.participants.size(); ++t) {
            const double contrib = rxn.net_coeff[t] * omega;
            if (contrib == 0.0) continue;
            const auto a = static_cast<std::uint64_t>(rxn.participants[t]);
            for (int b : rxn.participants) {
                if (b == rxn.participants[t]) continue;
                numerators[(a << 32) | static_cast<std::uint64_t>(b)] += contrib;
            }
        }
    }

    for (const auto& [key, numerator] : numerators) {
        const int a = static_cast<int>(key >> 32);
        const int b = static_cast<int>(key & 0xffffffffu);
        const auto ai = static_cast<std::size_t>(a);
        const double denom = std::max(flux.production[ai], flux.consumption[ai]);
        if (denom <= 0.0) continue;
        double w = std::abs(numerator) / denom;
        if (w == 0.0) continue;
        if (w > 1.0) {
            w = 1.0;
            ++g.clamp_count;
        }
        g.adjacency[ai].push_back({b, w});
    }
    for (auto& list : g.adjacency) {
        std::sort(list.begin(), list.end(),
                  [](const InteractionGraph::Edge& x, const InteractionGraph::Edge& y) { return x.to < y.to; });
        g.edge_count += static_cast<std::int64_t>(list.size());
    }
    return g;
}

inline InteractionGraph build_graph(const Mechanism& mech, const RateSample& sample) {
    return build_graph(mech, sample, species_flux(mech, sample));
}

/// Test and fixture helper: assemble a graph from explicit edges.
class GraphBuilder {
public:
    explicit GraphBuilder(int n) { graph_.n = n; graph_.adjacency.resize(static_cast<std::size_t>(n)); }

    GraphBuilder& edge(int from, int to, double weight) {
        if (from == to) throw Error("self edges are not allowed");
        if (from < 0 || from >= graph_.n || to < 0 || to >= graph_.n)
            throw Error("edge endpoint out of range");
        if (!(weight > 0.0) || weight > 1.0) throw Error("edge weight must lie in (0, 1]");
        graph_.adjacency[static_cast<std::size_t>(from)].push_back({to, weight});
        return *this;
    }

    InteractionGraph build() {
        InteractionGraph g = std::move(graph_);
        for (auto& list : g.adjacency) {
            std::sort(list.begin(), list.end(),
                      [](const InteractionGraph::Edge& x, const InteractionGraph::Edge& y) { return x.to < y.to; });
            for (std::size_t i = 1; i < list.size(); ++i)
                if (list[i].to == list[i - 1].to) throw Error("duplicate edge");
            g.edge_count += static_cast<std::int64_t>(list.size());
        }
        return g;
    }

private:
    InteractionGraph graph_;
};

/// Seeded random sparse digraph for benchmarking: `edges` distinct ordered
/// pairs, no self loops, weights log-uniform over (1e-3, 1].
inline InteractionGraph generate_random_graph(int nodes, std::int64_t edges, std::uint64_t seed) {
    if (nodes < 1) throw Error("graph must have at least one node");
    const std::int64_t max_edges = static_cast<std::int64_t>(nodes) * (nodes - 1);
    if (edges < 0 || edges > max_edges)
        throw Error("edge count must lie in [0, nodes*(nodes-1)]");
    Rng rng(seed);
    GraphBuilder builder(nodes);
    std::unordered_set<std::uint64_t> used;
    used.reserve(static_cast<std::size_t>(edges) * 2);
    while (static_cast<std::int64_t>(used.size()) < edges) {
        const auto u = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nodes)));
        const auto v = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(nodes)));
        if (u == v) continue;
        const std::uint64_t key = (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
        if (!used.insert(key).second) continue;
        builder.edge(u, v, std::pow(10.0, -3.0 * rng.next_double()));
    }
    return builder.build();
}

/// Edge-list dump, one "FROM TO WEIGHT" line per edge. With names the nodes
/// are written symbolically; otherwise a "NODES <n>" directive pins the node
/// count and endpoints are written as indices.
inline std::string dump_edge_list(const InteractionGraph& g, const std::vector<std::string>* names = nullptr) {
    if (names && static_cast<int>(names->size()) != g.n) throw Error("name table size mismatch");
    std::ostringstream out;
    if (!names) out << "NODES " << g.n << '\n';
    for (int u = 0; u < g.n; ++u) {
        for (const auto& e : g.neighbors(u)) {
            if (names)
                out << (*names)[static_cast<std::size_t>(u)] << ' ' << (*names)[static_cast<std::size_t>(e.to)];
            else
                out << u << ' ' << e.to;
            out << ' ' << format_double(e.weight) << '\n';
        }
    }
    return out.str();
}

struct NamedGraph {
    InteractionGraph graph;
    std::vector<std::string> names;
};

/// Parses the edge-list format produced by dump_edge_list. In named mode,
/// node ids are assigned by first appearance.
inline NamedGraph parse_edge_list(std::string_view text) {
    struct RawEdge {
        int from, to;
        double weight;
    };
    std::vector<RawEdge> edges;
    std::unordered_map<std::string, int> name_index;
    NamedGraph out;
    bool numeric_mode = false;
    int declared_nodes = -1;

    int line_no = 0;
    std::size_t pos = 0;
    bool first_line = true;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto tokens = detail::split_ws(line);
        if (first_line && tokens.size() == 2 && to_upper(tokens[0]) == "NODES") {
            long n = 0;
            if (!parse_int(tokens[1], n) || n < 1) throw ParseError("invalid NODES count", line_no);
            numeric_mode = true;
            declared_nodes = static_cast<int>(n);
            first_line = false;
            continue;
        }
        first_line = false;
        if (tokens.size() != 3) throw ParseError("expected 'FROM TO WEIGHT'", line_no);

        double w = 0.0;
        if (!parse_double(tokens[2], w) || !(w > 0.0) || w > 1.0)
            throw ParseError("edge weight must lie in (0, 1]", line_no);

        auto resolve = [&](std::string_view tok) -> int {
            if (numeric_mode) {
                long id = 0;
                if (!parse_int(tok, id) || id < 0 || id >= declared_nodes)
                    throw ParseError("node index out of range '" + std::string(tok) + "'", line_no);
                return static_cast<int>(id);
            }
            auto [it, inserted] = name_index.emplace(std::string(tok), static_cast<int>(out.names.size()));
            if (inserted) out.names.push_back(std::string(tok));
            return it->second;
        };
        const int u = resolve(tokens[0]);
        const int v = resolve(tokens[1]);
        if (u == v) throw ParseError("self edge", line_no);
        edges.push_back({u, v, w});
    }

    const int n = numeric_mode ? declared_nodes : static_cast<int>(out.names.size());
    if (n == 0) throw Error("edge list describes no nodes");
    GraphBuilder builder(n);
    for (const auto& e : edges) builder.edge(e.from, e.to, e.weight);
    out.graph = builder.build();
    if (numeric_mode) {
        out.names.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out.names[static_cast<std::size_t>(i)] = std::to_string(i);
    }
    return out;
}

}  // namespace drgep
