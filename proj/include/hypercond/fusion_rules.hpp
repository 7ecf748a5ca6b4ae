#pragma once
// Reference two-source combination rules (Dempster, conjunctive DSm Classic,
// PCR5, conflict-to-union DSmH) plus Shafer's conditioning rule and the
// closed-form conditional belief/plausibility it induces.

#include <cctype>
#include <map>
#include <optional>
#include <string_view>

#include "belief_state.hpp"

namespace hypercond {

enum class FusionRuleId { dempster, dsmc, pcr5, dsmh2 };

inline const char* to_string(FusionRuleId rule) {
    switch (rule) {
        case FusionRuleId::dempster: return "dempster";
        case FusionRuleId::dsmc: return "dsmc";
        case FusionRuleId::pcr5: return "pcr5";
        case FusionRuleId::dsmh2: return "dsmh2";
    }
    return "?";
}

inline std::optional<FusionRuleId> parse_fusion_rule(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : name)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "dempster") return FusionRuleId::dempster;
    if (lower == "dsmc") return FusionRuleId::dsmc;
    if (lower == "pcr5") return FusionRuleId::pcr5;
    if (lower == "dsmh2") return FusionRuleId::dsmh2;
    return std::nullopt;
}

// Combined masses plus the conjunctive conflict (the product mass that landed
// on the empty element). For dsmc the masses are the raw conjunctive values
// summing to 1 - conflict; for the other rules they already sum to 1 and the
// conflict is informational.
struct FusionResult {
    SpacePtr space;
    std::map<RegionSet, double> masses;
    double conflict = 0.0;

    // Masses rescaled to sum 1; fails when nothing survived the combination.
    Bba normalized() const {
        if (masses.empty())
            throw ComputationError("total conflict: no mass survives combination");
        double total = 0.0;
        for (const auto& [regions, value] : masses)
            total += value;
        std::map<RegionSet, double> scaled;
        for (const auto& [regions, value] : masses)
            scaled[regions] = value / total;
        return Bba::from_masses(space, scaled);
    }
};

inline FusionResult fuse(const Bba& m1, const Bba& m2, FusionRuleId rule) {
    require_compatible(m1.space(), m2.space());
    FusionResult out;
    out.space = m1.space();
    for (const auto& [k1, v1] : m1.masses()) {
        for (const auto& [k2, v2] : m2.masses()) {
            const RegionSet meet = k1 & k2;
            const double product = v1 * v2;
            if (meet != 0)
                out.masses[meet] += product;
            else
                out.conflict += product;
        }
    }
    switch (rule) {
        case FusionRuleId::dsmc:
            break;
        case FusionRuleId::dempster: {
            if (out.masses.empty())
                throw ComputationError("total conflict under Dempster's rule");
            double total = 0.0;
            for (const auto& [regions, value] : out.masses)
                total += value;
            for (auto& [regions, value] : out.masses)
                value /= total;
            break;
        }
        case FusionRuleId::pcr5:
            // Each conflicting product returns to its two parents,
            // proportionally to the masses they staked.
            for (const auto& [k1, v1] : m1.masses()) {
                for (const auto& [k2, v2] : m2.masses()) {
                    if ((k1 & k2) != 0)
                        continue;
                    const double denom = v1 + v2;
                    if (denom > 0.0) {
                        out.masses[k1] += v1 * v1 * v2 / denom;
                        out.masses[k2] += v2 * v2 * v1 / denom;
                    }
                }
            }
            break;
        case FusionRuleId::dsmh2:
            // Conflicting products fall back to the union of their parents.
            for (const auto& [k1, v1] : m1.masses()) {
                for (const auto& [k2, v2] : m2.masses()) {
                    if ((k1 & k2) != 0)
                        continue;
                    const RegionSet join = k1 | k2;
                    if (join != 0)
                        out.masses[join] += v1 * v2;
                    else
                        out.masses[out.space->allowed()] += v1 * v2;   // unreachable: parents are nonempty
                }
            }
            break;
    }
    return out;
}

// Shafer's conditioning rule: Dempster-combine with the categorical bba on a.
inline Bba scr_condition(const Bba& m, const Element& a) {
    require_compatible(m.space(), a.space());
    if (m.space()->model().kind != ModelKind::shafer)
        throw ValidationError("SCR requires Shafer's model");
    if (a.is_empty())
        throw ValidationError("conditioning on the empty element");
    if (pl(m, a) <= 0.0)
        throw ComputationError("conditioning event has zero plausibility");
    return fuse(m, Bba::categorical(m.space(), a), FusionRuleId::dempster).normalized();
}

struct BelPl {
    double bel;
    double pl;
};

// Closed forms of the conditional belief and plausibility induced by SCR:
//   Bel(x|a) = (Bel(x u ~a) - Bel(~a)) / (1 - Bel(~a))
//   Pl(x|a)  = Pl(x n a) / Pl(a)
// The complement ~a exists because the model is Shafer's (power-set algebra).
inline BelPl conditional_bel_pl(const Bba& m, const Element& a, const Element& x) {
    require_compatible(m.space(), a.space());
    require_compatible(m.space(), x.space());
    if (m.space()->model().kind != ModelKind::shafer)
        throw ValidationError("conditional Bel/Pl requires Shafer's model");
    if (a.is_empty())
        throw ValidationError("conditioning on the empty element");
    const double pl_a = pl(m, a);
    if (pl_a <= 0.0)
        throw ComputationError("conditioning event has zero plausibility");
    const Element complement(Element::trusted{}, m.space(), m.space()->allowed() & ~a.regions());
    const double bel_outside = bel(m, complement);
    BelPl out;
    out.bel = (bel(m, x | complement) - bel_outside) / (1.0 - bel_outside);
    out.pl = pl(m, x & a) / pl_a;
    return out;
}

}  // namespace hypercond
