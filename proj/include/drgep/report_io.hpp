#pragma once

#include <json.hpp>

#include <sstream>
#include <string>

#include "drgep/mechanism.hpp"
#include "drgep/reduction.hpp"
#include "drgep/search.hpp"

namespace drgep {

/// Report JSON: threshold, retained species names, retained reaction count,
/// per-species importance, DIC clamp count, and per-phase wall times. All
/// fields except timings are deterministic functions of the inputs.
inline nlohmann::json report_json(const Mechanism& mech, const ReductionReport& report) {
    nlohmann::json j;
    j["threshold"] = report.threshold;
    j["retained_species"] = report.retained_names;
    j["retained_reaction_count"] = report.retained_reaction_count;
    nlohmann::json importance = nlohmann::json::object();
    for (std::size_t sp = 0; sp < report.importance.values.size(); ++sp)
        importance[mech.species[sp].name] = report.importance.values[sp];
    j["importance"] = std::move(importance);
    j["clamp_count"] = report.clamp_count;
    nlohmann::json timings = nlohmann::json::object();
    for (const auto& [phase, seconds] : report.timings) timings[phase] = seconds;
    j["timings"] = std::move(timings);
    return j;
}

/// CSV table of (species, importance, retained), one row per species in
/// mechanism order.
inline std::string report_csv(const Mechanism& mech, const ReductionReport& report) {
    std::vector<bool> retained(mech.species.size(), false);
    for (int idx : report.retained_indices) retained[static_cast<std::size_t>(idx)] = true;
    std::ostringstream out;
    out << "species,importance,retained\n";
    for (std::size_t sp = 0; sp < mech.species.size(); ++sp)
        out << mech.species[sp].name << ',' << format_double(report.importance.values[sp]) << ','
            << (retained[sp] ? "true" : "false") << '\n';
    return out.str();
}

inline nlohmann::json order_independence_json(const OrderIndependenceReport& report) {
    nlohmann::json j;
    j["algorithm"] = to_string(report.algorithm);
    j["values_checked"] = report.values_checked;
    j["independent"] = report.independent;
    j["baseline_retained"] = report.baseline_retained;
    nlohmann::json seeds = nlohmann::json::array();
    for (const auto& outcome : report.seeds) {
        nlohmann::json s;
        s["seed"] = outcome.seed;
        s["retained_match"] = outcome.retained_match;
        s["values_match"] = outcome.values_match;
        seeds.push_back(std::move(s));
    }
    j["seeds"] = std::move(seeds);
    return j;
}

}  // namespace drgep
