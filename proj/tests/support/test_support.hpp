#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "drgep/drgep.hpp"

namespace testsupport {

// ---------------------------------------------------------------------------
// Fixtures

inline const char* toy_chain_text() {
    return "# toy chain\n"
           "ELEMENTS\nX\nEND\n"
           "SPECIES\nA X:1\nB X:1\nC X:1\nEND\n"
           "REACTIONS\nA => B\nB => C\nEND\n";
}

/// A => B, B => C with rates (2, 1). DIC edges: A->B 1.0, B->A 1.0, B->C 0.5,
/// C->B 1.0. Dijkstra from A gives (1.0, 1.0, 0.5).
inline drgep::Mechanism toy_chain_mechanism() { return drgep::parse_mechanism(toy_chain_text()); }

inline drgep::RateSample toy_chain_sample() { return {"toy", 0.0, {2.0, 1.0}}; }

/// Weak direct edge, strong two-hop path. Species (T, X, Y) with reactions
/// T => X (9), T => Y (1), X => Y (8.1), so r_TX = 0.9, r_TY = 0.1,
/// r_XY = 0.9. DFS reaches Y at 0.81 in this order but at ~0.089 once X and
/// Y swap places, which flips the retained set at a 0.5 threshold.
inline drgep::Mechanism dfs_adversarial_mechanism() {
    return drgep::parse_mechanism(
        "ELEMENTS\nQ\nEND\n"
        "SPECIES\nT Q:1\nX Q:1\nY Q:1\nEND\n"
        "REACTIONS\nT => X\nT => Y\nX => Y\nEND\n");
}

inline drgep::RateSampleSet dfs_adversarial_samples() {
    drgep::RateSampleSet set;
    set.samples.push_back({"adversarial", 0.0, {9.0, 1.0, 8.1}});
    return set;
}

/// Swaps X and Y in the adversarial fixture.
inline std::vector<int> dfs_adversarial_swap() { return {0, 2, 1}; }

/// Diamond: T => A (9), T => B (5), A => C (8), B => C (4). Both A and B sit
/// one hop from T, so BFS assigns C from whichever is dequeued first:
/// (9/14)(8/9) = 0.571 via A, (5/14)(4/5) = 0.286 via B. At a 0.4 threshold
/// the retained set flips when A and B swap places.
inline drgep::Mechanism bfs_adversarial_mechanism() {
    return drgep::parse_mechanism(
        "ELEMENTS\nQ\nEND\n"
        "SPECIES\nT Q:1\nA Q:1\nB Q:1\nC Q:1\nEND\n"
        "REACTIONS\nT => A\nT => B\nA => C\nB => C\nEND\n");
}

inline drgep::RateSampleSet bfs_adversarial_samples() {
    drgep::RateSampleSet set;
    set.samples.push_back({"adversarial", 0.0, {9.0, 5.0, 8.0, 4.0}});
    return set;
}

inline std::vector<int> bfs_adversarial_swap() { return {0, 2, 1, 3}; }

/// Seeded random mechanism: 8 to 16 species over C/H/O, a connectivity
/// backbone of chain reactions, plus random two- and three-body reactions,
/// some reversible.
inline drgep::Mechanism synthetic_mechanism(std::uint64_t seed) {
    drgep::Rng rng(seed);
    const int n = 8 + static_cast<int>(rng.next_below(9));
    std::ostringstream text;
    text << "ELEMENTS\nC H O\nEND\nSPECIES\n";
    for (int i = 0; i < n; ++i) {
        text << "SP" << i << " C:" << 1 + rng.next_below(3);
        if (auto h = rng.next_below(9); h > 0) text << " H:" << h;
        if (auto o = rng.next_below(3); o > 0) text << " O:" << o;
        text << '\n';
    }
    text << "END\nREACTIONS\n";
    for (int i = 0; i + 1 < n; ++i) text << "SP" << i << " => SP" << i + 1 << '\n';
    const int extras = n;
    for (int i = 0; i < extras; ++i) {
        const auto a = rng.next_below(static_cast<std::uint64_t>(n));
        auto b = rng.next_below(static_cast<std::uint64_t>(n));
        auto c = rng.next_below(static_cast<std::uint64_t>(n));
        if (b == a) b = (b + 1) % static_cast<std::uint64_t>(n);
        if (c == a || c == b) c = (std::max(a, b) + 1) % static_cast<std::uint64_t>(n);
        const char* arrow = rng.next_below(4) == 0 ? " <=> " : " => ";
        switch (rng.next_below(3)) {
            case 0: text << "SP" << a << " + SP" << b << arrow << "SP" << c << '\n'; break;
            case 1: text << "SP" << a << arrow << "SP" << b << " + SP" << c << '\n'; break;
            default: text << "2 SP" << a << arrow << "SP" << b << '\n'; break;
        }
    }
    text << "END\n";
    drgep::Mechanism mech = drgep::parse_mechanism(text.str());
    mech.name = "synthetic-" + std::to_string(seed);
    return mech;
}

/// Integer-valued rate samples. All fluxes, DIC numerators, and scaling sums
/// stay exact in double arithmetic, so multiplying rates by 1000 is an exact
/// rescaling end to end.
inline drgep::RateSampleSet integer_rate_samples(const drgep::Mechanism& mech, std::uint64_t seed,
                                                 int count, double scale = 1.0) {
    drgep::Rng rng(seed);
    drgep::RateSampleSet set;
    for (int t = 0; t < count; ++t) {
        drgep::RateSample sample;
        sample.dataset_id = "int-" + std::to_string(seed);
        sample.time = t;
        for (const auto& rxn : mech.reactions) {
            double w = static_cast<double>(1 + rng.next_below(1u << 20));
            if (rxn.reversible && rng.next_bool()) w = -w;
            sample.omega.push_back(w * scale);
        }
        set.samples.push_back(std::move(sample));
    }
    return set;
}

/// Seeded random graph with 3..10 nodes, edge probability in {0.15, 0.25,
/// 0.35}, weights in (0, 1] with occasional exact 1.0.
inline drgep::InteractionGraph random_test_graph(std::uint64_t seed, int min_nodes = 3, int max_nodes = 10) {
    drgep::Rng rng(seed);
    const int n = min_nodes + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_nodes - min_nodes + 1)));
    const double p = 0.15 + 0.10 * static_cast<double>(rng.next_below(3));
    drgep::GraphBuilder builder(n);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v) {
            if (u == v) continue;
            if (rng.next_double() >= p) continue;
            const double w = rng.next_below(20) == 0 ? 1.0 : 1.0 - rng.next_double();
            builder.edge(u, v, w);
        }
    return builder.build();
}

// ---------------------------------------------------------------------------
// Filesystem helpers

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
}

class TempDir {
public:
    TempDir() {
        auto pattern = (std::filesystem::temp_directory_path() / "drgep-test-XXXXXX").string();
        std::vector<char> buf(pattern.begin(), pattern.end());
        buf.push_back('\0');
        if (!::mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
        path_ = buf.data();
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return (std::filesystem::path(path_) / name).string(); }

private:
    std::string path_;
};

// ---------------------------------------------------------------------------
// CLI runner

inline std::string cli_path() {
    if (const char* env = std::getenv("DRGEP_CLI"); env && *env) return env;
    return "./tools/drgep";
}

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr combined
};

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s)
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    out += '\'';
    return out;
}

inline CliResult run_cli(const std::vector<std::string>& args) {
    std::string cmd = shell_quote(cli_path());
    for (const auto& arg : args) cmd += ' ' + shell_quote(arg);
    cmd += " 2>&1";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    CliResult result;
    char buf[512];
    std::size_t got;
    while ((got = ::fread(buf, 1, sizeof(buf), pipe)) > 0) result.output.append(buf, got);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

}  // namespace testsupport
