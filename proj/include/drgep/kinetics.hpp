#pragma once

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "drgep/common.hpp"
#include "drgep/mechanism.hpp"

namespace drgep {

/// One sampled kinetics state: net reaction rates at a point in time.
/// omega[i] is the net rate of reaction i; sign is the net forward direction.
struct RateSample {
    std::string dataset_id;
    double time = 0.0;
    std::vector<double> omega;
};

struct RateSampleSet {
    std::vector<RateSample> samples;  // grouped by dataset, times increasing within each

    std::size_t size() const { return samples.size(); }
};

/// Per-species production and consumption rates, both nonnegative.
struct SpeciesFlux {
    std::vector<double> production;
    std::vector<double> consumption;
};

/// Parses a rates file: optional "dataset=<id>" header, then one row per
/// sample of time followed by n_R comma- or whitespace-separated net rates in
/// the mechanism's reaction order. One dataset per file.
inline RateSampleSet load_rate_samples(std::string_view text, const Mechanism& mech,
                                       std::string default_dataset_id = "default") {
    RateSampleSet set;
    std::string dataset_id = std::move(default_dataset_id);
    bool saw_row = false;
    double prev_time = 0.0;

    const std::size_t n_r = static_cast<std::size_t>(mech.reaction_count());
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view line = raw;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (!saw_row && line.substr(0, 8) == "dataset=") {
            dataset_id = std::string(trim(line.substr(8)));
            if (dataset_id.empty()) throw ParseError("empty dataset id", line_no);
            continue;
        }

        std::string cells(line);
        for (char& c : cells)
            if (c == ',') c = ' ';
        auto tokens = detail::split_ws(cells);
        if (tokens.size() != n_r + 1)
            throw ParseError("expected " + std::to_string(n_r + 1) + " columns (time + " +
                                 std::to_string(n_r) + " rates), got " + std::to_string(tokens.size()),
                             line_no);

        RateSample sample;
        sample.dataset_id = dataset_id;
        if (!parse_double(tokens[0], sample.time) || !std::isfinite(sample.time) || sample.time < 0.0)
            throw ParseError("invalid time value '" + std::string(tokens[0]) + "'", line_no);
        sample.omega.resize(n_r);
        for (std::size_t i = 0; i < n_r; ++i) {
            if (!parse_double(tokens[i + 1], sample.omega[i]) || !std::isfinite(sample.omega[i]))
                throw ParseError("non-numeric rate cell '" + std::string(tokens[i + 1]) + "'", line_no);
        }
        if (saw_row && sample.time <= prev_time)
            throw ParseError("sample times must be strictly increasing", line_no);
        prev_time = sample.time;
        saw_row = true;
        set.samples.push_back(std::move(sample));
    }
    if (!saw_row) throw ParseError("rates file contains no samples", line_no);
    return set;
}

/// Concatenates per-file sample sets. Dataset ids must be distinct.
inline RateSampleSet merge_rate_sample_sets(const std::vector<RateSampleSet>& sets) {
    RateSampleSet merged;
    std::unordered_set<std::string> ids;
    for (const auto& set : sets) {
        if (set.samples.empty()) continue;
        const std::string& id = set.samples.front().dataset_id;
        if (!ids.insert(id).second)
            throw Error("duplicate dataset id '" + id + "' across rates files");
        merged.samples.insert(merged.samples.end(), set.samples.begin(), set.samples.end());
    }
    if (merged.samples.empty()) throw Error("no rate samples loaded");
    return merged;
}

/// P_A = sum_i max(0, nu_Ai * omega_i), C_A = sum_i max(0, -nu_Ai * omega_i).
inline SpeciesFlux species_flux(const Mechanism& mech, const RateSample& sample) {
    if (sample.omega.size() != static_cast<std::size_t>(mech.reaction_count()))
        throw Error("rate sample length does not match reaction count");
    SpeciesFlux flux;
    flux.production.assign(mech.species.size(), 0.0);
    flux.consumption.assign(mech.species.size(), 0.0);
    for (std::size_t i = 0; i < mech.reactions.size(); ++i) {
        const Reaction& rxn = mech.reactions[i];
        const double omega = sample.omega[i];
        for (std::size_t t = 0; t < rxn.participants.size(); ++t) {
            const double rate = rxn.net_coeff[t] * omega;
            auto sp = static_cast<std::size_t>(rxn.participants[t]);
            if (rate > 0.0)
                flux.production[sp] += rate;
            else
                flux.consumption[sp] -= rate;
        }
    }
    return flux;
}

/// Pseudo-production rate of an element: sum over species of
/// N_{a,S} * max(0, P_S - C_S). Species are accumulated in name order so the
/// sum is bit-identical under any relabeling of species indices.
inline double element_pseudo_production(const Mechanism& mech, const SpeciesFlux& flux,
                                        const std::string& element) {
    std::string canon = to_upper(element);
    if (std::find(mech.elements.begin(), mech.elements.end(), canon) == mech.elements.end())
        throw Error("unknown element '" + canon + "'");
    double total = 0.0;
    for (int idx : mech.name_ordered_indices()) {
        auto i = static_cast<std::size_t>(idx);
        const int atoms = mech.species[i].atom_count(canon);
        if (atoms == 0) continue;
        const double net = flux.production[i] - flux.consumption[i];
        if (net > 0.0) total += static_cast<double>(atoms) * net;
    }
    return total;
}

/// Seeded synthetic rate samples for testing and benchmarking. Magnitudes are
/// log-uniform over [1e-6, 1e2]; reversible reactions get a random sign,
/// irreversible ones stay positive. Times are 0..count-1.
inline RateSampleSet generate_synthetic_samples(const Mechanism& mech, std::uint64_t seed, int count) {
    if (count < 1) throw Error("sample count must be >= 1");
    Rng rng(seed);
    RateSampleSet set;
    set.samples.reserve(static_cast<std::size_t>(count));
    const std::string id = "synthetic-" + std::to_string(seed);
    for (int t = 0; t < count; ++t) {
        RateSample sample;
        sample.dataset_id = id;
        sample.time = static_cast<double>(t);
        sample.omega.reserve(mech.reactions.size());
        for (const Reaction& rxn : mech.reactions) {
            double magnitude = std::pow(10.0, -6.0 + 8.0 * rng.next_double());
            double sign = (rxn.reversible && rng.next_bool()) ? -1.0 : 1.0;
            sample.omega.push_back(sign * magnitude);
        }
        set.samples.push_back(std::move(sample));
    }
    return set;
}

}  // namespace drgep
