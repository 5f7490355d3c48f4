#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "drgep/common.hpp"

namespace drgep {

struct Species {
    std::string name;                    // canonical upper case
    std::map<std::string, int> composition;  // element symbol -> atom count

    int atom_count(const std::string& element) const {
        auto it = composition.find(element);
        return it == composition.end() ? 0 : it->second;
    }

    friend bool operator==(const Species& a, const Species& b) {
        return a.name == b.name && a.composition == b.composition;
    }
};

/// One reaction with net stoichiometry. participants is the union of both
/// sides; a species with equal coefficients on both sides stays a participant
/// with net coefficient zero. participants and net_coeff are parallel arrays
/// sorted by species index.
struct Reaction {
    std::vector<int> participants;
    std::vector<double> net_coeff;  // products positive, reactants negative
    bool reversible = false;
    std::string source_text;        // original line, informational only

    bool involves(int species) const {
        return std::binary_search(participants.begin(), participants.end(), species);
    }

    double net_coefficient(int species) const {
        auto it = std::lower_bound(participants.begin(), participants.end(), species);
        if (it == participants.end() || *it != species) return 0.0;
        return net_coeff[static_cast<std::size_t>(it - participants.begin())];
    }

    friend bool operator==(const Reaction& a, const Reaction& b) {
        return a.participants == b.participants && a.net_coeff == b.net_coeff &&
               a.reversible == b.reversible;
    }
};

/// Static chemistry structure: elements, species, reactions. Immutable after
/// construction; share freely across threads.
struct Mechanism {
    std::string name;
    std::vector<std::string> elements;
    std::vector<Species> species;
    std::vector<Reaction> reactions;

    int species_count() const { return static_cast<int>(species.size()); }
    int reaction_count() const { return static_cast<int>(reactions.size()); }

    std::optional<int> find_species(std::string_view raw_name) const {
        std::string canon = to_upper(raw_name);
        for (std::size_t i = 0; i < species.size(); ++i)
            if (species[i].name == canon) return static_cast<int>(i);
        return std::nullopt;
    }

    /// Species indices ordered by name. Summations that must not depend on
    /// the species storage order (element pseudo-production in particular)
    /// iterate in this order so shuffled mechanisms reproduce sums bit for bit.
    std::vector<int> name_ordered_indices() const {
        std::vector<int> order(species.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return species[a].name < species[b].name; });
        return order;
    }

    friend bool operator==(const Mechanism& a, const Mechanism& b) {
        return a.elements == b.elements && a.species == b.species && a.reactions == b.reactions;
    }
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline bool valid_name_token(std::string_view t) {
    if (t.empty()) return false;
    char c = t.front();
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}

struct SideTerm {
    int species;
    double coeff;
};

// Parses "[coef] SP (+ [coef] SP)*". Coefficients default to 1.
inline std::vector<SideTerm> parse_side(std::string_view side, int line_no,
                                        const std::unordered_map<std::string, int>& index) {
    auto tokens = split_ws(side);
    if (tokens.empty()) throw ParseError("empty reaction side", line_no);

    std::vector<SideTerm> terms;
    std::size_t i = 0;
    while (i < tokens.size()) {
        double coeff = 1.0;
        double parsed;
        if (parse_double(tokens[i], parsed)) {
            if (!(parsed > 0.0)) throw ParseError("malformed coefficient '" + std::string(tokens[i]) + "': must be positive", line_no);
            coeff = parsed;
            ++i;
            if (i >= tokens.size()) throw ParseError("coefficient without species name", line_no);
        }
        std::string_view name_tok = tokens[i];
        if (name_tok == "+") throw ParseError("misplaced '+' in reaction", line_no);
        if (!valid_name_token(name_tok)) {
            // A bare number where a species name is expected reads as a bad coefficient.
            double dummy;
            if (parse_double(name_tok, dummy))
                throw ParseError("malformed coefficient near '" + std::string(name_tok) + "'", line_no);
            throw ParseError("invalid species token '" + std::string(name_tok) + "'", line_no);
        }
        std::string canon = to_upper(name_tok);
        auto it = index.find(canon);
        if (it == index.end())
            throw ParseError("unknown species '" + canon + "' in reaction", line_no);
        terms.push_back({it->second, coeff});
        ++i;
        if (i < tokens.size()) {
            if (tokens[i] != "+")
                throw ParseError("expected '+' between reaction terms, got '" + std::string(tokens[i]) + "'", line_no);
            ++i;
            if (i >= tokens.size()) throw ParseError("dangling '+' at end of reaction side", line_no);
        }
    }
    return terms;
}

}  // namespace detail

/// Parses the plain-text mechanism grammar:
///
///   ELEMENTS
///   C H O N
///   END
///   SPECIES
///   CH4 C:1 H:4
///   END
///   REACTIONS
///   CH4 + 2 O2 => CO2 + 2 H2O
///   END
///
/// '#' starts a comment, blank lines are ignored, names are canonicalized to
/// upper case. "<=>" marks a reversible reaction (informational; rates are
/// net). Net stoichiometry is product minus reactant coefficient per species.
inline Mechanism parse_mechanism(std::string_view text) {
    Mechanism mech;
    std::unordered_map<std::string, int> species_index;
    std::unordered_set<std::string> element_set;
    bool saw_elements = false, saw_species = false, saw_reactions = false;

    enum class Block { none, elements, species, reactions };
    Block block = Block::none;
    int species_block_line = 0;

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

        std::string upper_line = to_upper(line);
        if (block == Block::none) {
            if (upper_line == "ELEMENTS") {
                if (saw_elements) throw ParseError("duplicate ELEMENTS block", line_no);
                saw_elements = true;
                block = Block::elements;
            } else if (upper_line == "SPECIES") {
                if (saw_species) throw ParseError("duplicate SPECIES block", line_no);
                saw_species = true;
                species_block_line = line_no;
                block = Block::species;
            } else if (upper_line == "REACTIONS") {
                if (saw_reactions) throw ParseError("duplicate REACTIONS block", line_no);
                saw_reactions = true;
                block = Block::reactions;
            } else {
                throw ParseError("expected ELEMENTS, SPECIES, or REACTIONS, got '" + std::string(line) + "'", line_no);
            }
            continue;
        }
        if (upper_line == "END") {
            block = Block::none;
            continue;
        }

        switch (block) {
            case Block::elements: {
                for (auto tok : detail::split_ws(line)) {
                    std::string sym = to_upper(tok);
                    if (!element_set.insert(sym).second)
                        throw ParseError("duplicate element '" + sym + "'", line_no);
                    mech.elements.push_back(sym);
                }
                break;
            }
            case Block::species: {
                auto tokens = detail::split_ws(line);
                Species sp;
                if (!detail::valid_name_token(tokens[0]))
                    throw ParseError("invalid species name '" + std::string(tokens[0]) + "'", line_no);
                sp.name = to_upper(tokens[0]);
                if (species_index.count(sp.name))
                    throw ParseError("duplicate species declaration '" + sp.name + "'", line_no);
                int total_atoms = 0;
                for (std::size_t i = 1; i < tokens.size(); ++i) {
                    auto colon = tokens[i].find(':');
                    if (colon == std::string_view::npos)
                        throw ParseError("expected 'element:count' pair, got '" + std::string(tokens[i]) + "'", line_no);
                    std::string element = to_upper(tokens[i].substr(0, colon));
                    if (!element_set.count(element))
                        throw ParseError("element '" + element + "' not declared in ELEMENTS block", line_no);
                    long count = 0;
                    if (!parse_int(tokens[i].substr(colon + 1), count) || count < 0)
                        throw ParseError("invalid atom count in '" + std::string(tokens[i]) + "'", line_no);
                    if (sp.composition.count(element))
                        throw ParseError("repeated element '" + element + "' in composition", line_no);
                    sp.composition[element] = static_cast<int>(count);
                    total_atoms += static_cast<int>(count);
                }
                if (total_atoms <= 0)
                    throw ParseError("species '" + sp.name + "' has no atoms", line_no);
                species_index[sp.name] = static_cast<int>(mech.species.size());
                mech.species.push_back(std::move(sp));
                break;
            }
            case Block::reactions: {
                std::string_view lhs, rhs;
                bool reversible = false;
                if (auto arrow = line.find("<=>"); arrow != std::string_view::npos) {
                    reversible = true;
                    lhs = line.substr(0, arrow);
                    rhs = line.substr(arrow + 3);
                } else if (auto fwd = line.find("=>"); fwd != std::string_view::npos) {
                    lhs = line.substr(0, fwd);
                    rhs = line.substr(fwd + 2);
                } else {
                    throw ParseError("reaction line missing '=>' or '<=>'", line_no);
                }
                auto reactants = detail::parse_side(trim(lhs), line_no, species_index);
                auto products = detail::parse_side(trim(rhs), line_no, species_index);

                std::map<int, double> net;
                for (const auto& t : reactants) net[t.species] -= t.coeff;
                for (const auto& t : products) net[t.species] += t.coeff;

                Reaction rxn;
                rxn.reversible = reversible;
                rxn.source_text = std::string(line);
                for (const auto& [sp, coeff] : net) {
                    rxn.participants.push_back(sp);
                    rxn.net_coeff.push_back(coeff);
                }
                mech.reactions.push_back(std::move(rxn));
                break;
            }
            case Block::none:
                break;
        }
    }
    if (block != Block::none) throw ParseError("unterminated block, missing END", line_no);
    if (!saw_species) throw ParseError("missing SPECIES block", 1);
    if (mech.species.empty()) throw ParseError("empty SPECIES block", species_block_line);
    return mech;
}

/// Indices of reactions whose participants are all retained. A reaction is
/// eliminated as soon as any participating species is removed.
inline std::vector<int> surviving_reactions(const Mechanism& mech, const std::vector<bool>& keep_mask) {
    std::vector<int> out;
    for (std::size_t i = 0; i < mech.reactions.size(); ++i) {
        const Reaction& rxn = mech.reactions[i];
        if (std::all_of(rxn.participants.begin(), rxn.participants.end(),
                        [&](int sp) { return keep_mask[static_cast<std::size_t>(sp)]; }))
            out.push_back(static_cast<int>(i));
    }
    return out;
}

namespace detail {

inline void emit_side(std::ostringstream& out, const std::vector<std::pair<int, double>>& terms,
                      const std::vector<std::string>& names) {
    bool first = true;
    for (const auto& [sp, coeff] : terms) {
        if (!first) out << " + ";
        first = false;
        if (coeff != 1.0) out << format_double(coeff) << ' ';
        out << names[static_cast<std::size_t>(sp)];
    }
}

}  // namespace detail

/// Emits the skeletal mechanism containing exactly the retained species (in
/// their original relative order) and the reactions all of whose participants
/// are retained. Reactions are written in canonical form: reactants are
/// species with negative net coefficient, products positive, and a zero-net
/// participant appears on both sides with coefficient 1.
inline std::string emit_skeletal_mechanism(const Mechanism& mech, const std::vector<int>& retained) {
    if (retained.empty()) throw Error("cannot emit a mechanism with no species");
    std::vector<int> keep = retained;
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    for (int idx : keep)
        if (idx < 0 || idx >= mech.species_count())
            throw Error("retained species index " + std::to_string(idx) + " out of range");

    std::vector<bool> keep_mask(mech.species.size(), false);
    for (int idx : keep) keep_mask[static_cast<std::size_t>(idx)] = true;

    std::vector<std::string> names(mech.species.size());
    for (std::size_t i = 0; i < mech.species.size(); ++i) names[i] = mech.species[i].name;

    std::ostringstream out;
    out << "ELEMENTS\n";
    for (std::size_t i = 0; i < mech.elements.size(); ++i)
        out << mech.elements[i] << (i + 1 < mech.elements.size() ? " " : "");
    out << "\nEND\n";

    out << "SPECIES\n";
    for (int idx : keep) {
        const Species& sp = mech.species[static_cast<std::size_t>(idx)];
        out << sp.name;
        for (const auto& element : mech.elements) {
            int count = sp.atom_count(element);
            if (count > 0) out << ' ' << element << ':' << count;
        }
        out << '\n';
    }
    out << "END\n";

    out << "REACTIONS\n";
    for (int rxn_idx : surviving_reactions(mech, keep_mask)) {
        const Reaction& rxn = mech.reactions[static_cast<std::size_t>(rxn_idx)];
        std::vector<std::pair<int, double>> lhs, rhs;
        for (std::size_t i = 0; i < rxn.participants.size(); ++i) {
            int sp = rxn.participants[i];
            double nu = rxn.net_coeff[i];
            if (nu < 0.0) {
                lhs.emplace_back(sp, -nu);
            } else if (nu > 0.0) {
                rhs.emplace_back(sp, nu);
            } else {
                lhs.emplace_back(sp, 1.0);
                rhs.emplace_back(sp, 1.0);
            }
        }
        detail::emit_side(out, lhs, names);
        out << (rxn.reversible ? " <=> " : " => ");
        detail::emit_side(out, rhs, names);
        out << '\n';
    }
    out << "END\n";
    return out.str();
}

/// Relabels species by perm (old index -> new index). Chemistry is unchanged:
/// reaction order is preserved and stoichiometry follows the relabeling.
inline Mechanism permute_species(const Mechanism& mech, const std::vector<int>& perm) {
    if (perm.size() != mech.species.size()) throw Error("permutation size mismatch");
    std::vector<bool> seen(perm.size(), false);
    for (int p : perm) {
        if (p < 0 || p >= mech.species_count() || seen[static_cast<std::size_t>(p)])
            throw Error("invalid species permutation");
        seen[static_cast<std::size_t>(p)] = true;
    }

    Mechanism out;
    out.name = mech.name;
    out.elements = mech.elements;
    out.species.resize(mech.species.size());
    for (std::size_t i = 0; i < mech.species.size(); ++i)
        out.species[static_cast<std::size_t>(perm[i])] = mech.species[i];

    out.reactions.reserve(mech.reactions.size());
    for (const Reaction& rxn : mech.reactions) {
        Reaction mapped;
        mapped.reversible = rxn.reversible;
        mapped.source_text = rxn.source_text;
        std::vector<std::pair<int, double>> terms;
        terms.reserve(rxn.participants.size());
        for (std::size_t i = 0; i < rxn.participants.size(); ++i)
            terms.emplace_back(perm[static_cast<std::size_t>(rxn.participants[i])], rxn.net_coeff[i]);
        std::sort(terms.begin(), terms.end());
        for (const auto& [sp, nu] : terms) {
            mapped.participants.push_back(sp);
            mapped.net_coeff.push_back(nu);
        }
        out.reactions.push_back(std::move(mapped));
    }
    return out;
}

inline std::vector<int> invert_permutation(const std::vector<int>& perm) {
    std::vector<int> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
    return inv;
}

struct ShuffleResult {
    Mechanism mechanism;
    std::vector<int> permutation;  // old index -> new index
};

/// Seeded Fisher-Yates species shuffle. Same seed, same permutation.
inline ShuffleResult shuffle_species(const Mechanism& mech, std::uint64_t seed) {
    const std::size_t n = mech.species.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_below(i)]);
    // order[new] = old; invert to perm[old] = new
    std::vector<int> perm(n);
    for (std::size_t new_idx = 0; new_idx < n; ++new_idx)
        perm[static_cast<std::size_t>(order[new_idx])] = static_cast<int>(new_idx);
    return {permute_species(mech, perm), std::move(perm)};
}

}  // namespace drgep
