#pragma once
// The D1/D2/D3 decomposition of a hyper-power set against a conditioning
// event, the candidate selectors, and the single parameterized redistribution
// engine realizing the belief conditioning rules BCR1..BCR31.

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "belief_state.hpp"

namespace hypercond {

// How a rule routes the mass of an element outside D1:
//   u - undifferentiated: into a pot later shared among D1 focal elements
//       proportionally to their prior masses;
//   p - partitioned equally among the selector's picks from the candidates
//       {X in D1 : X subset of the donor};
//   s - proportionally to the prior masses of the candidates (falling back to
//       the selector split when none of them carries mass).
enum class RouteMode { u, p, s };

enum class SelectorKind { largest, smallest, median, average, uniform, none };

struct RuleSpec {
    std::string name;        // "BCR1".."BCR31"
    RouteMode d2_mode;
    RouteMode d3_mode;
    SelectorKind selector;   // none only for BCR1, which never selects
};

// Registry of the 31 rules. BCR1 routes everything to the pot; the six
// five-rule blocks pair a (d2, d3) mode combination with the selector cycle
// largest, smallest, median, average, uniform.
inline const std::vector<RuleSpec>& bcr_rules() {
    static const std::vector<RuleSpec> rules = [] {
        std::vector<RuleSpec> out;
        out.push_back({"BCR1", RouteMode::u, RouteMode::u, SelectorKind::none});
        const SelectorKind cycle[5] = {SelectorKind::largest, SelectorKind::smallest,
                                       SelectorKind::median, SelectorKind::average,
                                       SelectorKind::uniform};
        const std::pair<RouteMode, RouteMode> blocks[6] = {
            {RouteMode::u, RouteMode::p}, {RouteMode::u, RouteMode::s},
            {RouteMode::p, RouteMode::p}, {RouteMode::s, RouteMode::s},
            {RouteMode::p, RouteMode::s}, {RouteMode::s, RouteMode::p}};
        int number = 2;
        for (const auto& [d2, d3] : blocks)
            for (SelectorKind selector : cycle)
                out.push_back({"BCR" + std::to_string(number++), d2, d3, selector});
        return out;
    }();
    return rules;
}

// Case-insensitive lookup; nullptr when the name is not BCR1..BCR31.
inline const RuleSpec* find_bcr(std::string_view name) {
    std::string upper;
    upper.reserve(name.size());
    for (char c : name)
        upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    for (const RuleSpec& rule : bcr_rules())
        if (rule.name == upper)
            return &rule;
    return nullptr;
}

// Partition of the nonempty hyper-power set elements against event a:
//   d1 - the nonempty parts of a;
//   d2 - elements built only from atoms outside s(a);
//   d3 - everything else (mixing atoms of a with outside atoms).
struct Decomposition {
    Element a;
    std::vector<Element> d1, d2, d3;
};

// Membership in d2 reduces to an atom test: a nonempty element lies in the
// sub-hyper-power set generated by the atoms outside s(a) iff its own
// canonical atoms are disjoint from s(a). Forward: such an element equals the
// value of its minimal form, a formula over outside atoms. Converse: a
// formula over outside atoms evaluates to a union of principal upsets of
// outside-atom intersections (a dead intersection kills its whole upset), so
// every minimal region is one of those intersections.
inline Decomposition decompose(const SpacePtr& space, const Element& a) {
    require_compatible(space, a.space());
    if (a.is_empty())
        throw ValidationError("conditioning on the empty element");
    Decomposition out{a, {}, {}, {}};
    const RegionMask a_atoms = atoms_of(a);
    for (const Element& x : enumerate_elements(space)) {
        if (is_subset(x, a))
            out.d1.push_back(x);
        else if ((atom_set_of(x.regions()) & a_atoms) == 0)
            out.d2.push_back(x);
        else
            out.d3.push_back(x);
    }
    return out;
}

inline Decomposition decompose(const Element& a) { return decompose(a.space(), a); }

namespace detail {

// Candidate sets arising in conditioning are always the nonempty upsets of a
// meet W = Z n a, a down-set with maximum W. This makes the selector picks
// computable directly on region sets:
//   largest  -> the maximum W itself;
//   smallest -> the principal upsets of W's maximal regions, which are the
//               one-region elements built on globally maximal allowed regions
//               (W is upward-closed, so its maximal regions have no allowed
//               strict supersets at all);
//   median/average/uniform -> cardinal-class picks over the enumerated list.
inline std::vector<RegionSet> selected_targets(const Space& space, RegionSet meet,
                                               SelectorKind selector) {
    std::vector<RegionSet> out;
    switch (selector) {
        case SelectorKind::largest:
            out.push_back(meet);
            return out;
        case SelectorKind::smallest:
            for (RegionMask r = 1; r < 64; ++r)
                if (((meet >> r) & 1) && (space.strict_supersets(r) & meet) == 0)
                    out.push_back(RegionSet{1} << r);
            return out;
        case SelectorKind::none:
            throw ValidationError("rule has no selector");
        default:
            break;
    }
    auto candidates = space.upsets_within(meet);   // sorted ascending (cardinal, value)
    const std::size_t n = candidates->size();
    if (selector == SelectorKind::uniform) {
        out = *candidates;
        return out;
    }
    if (selector == SelectorKind::median) {
        // Equal-cardinal classes; keep the class holding the middle position,
        // or both middle positions' classes for even counts.
        int c1, c2;
        if (n % 2 == 1) {
            c1 = c2 = popcount((*candidates)[n / 2]);
        } else {
            c1 = popcount((*candidates)[n / 2 - 1]);
            c2 = popcount((*candidates)[n / 2]);
        }
        for (RegionSet x : *candidates) {
            int c = popcount(x);
            if (c == c1 || c == c2)
                out.push_back(x);
        }
        return out;
    }
    // average: nearest present cardinal to the mean, ties toward the larger.
    double total = 0.0;
    for (RegionSet x : *candidates)
        total += popcount(x);
    const double avg = total / static_cast<double>(n);
    int best = popcount((*candidates)[0]);
    for (RegionSet x : *candidates) {
        const int c = popcount(x);
        const double dc = std::abs(c - avg), db = std::abs(best - avg);
        if (dc < db || (dc == db && c > best))
            best = c;
    }
    for (RegionSet x : *candidates)
        if (popcount(x) == best)
            out.push_back(x);
    return out;
}

}  // namespace detail

// Selector procedures on an explicit candidate set. The candidates must be
// the D1 elements under some donor W, i.e. the nonempty upsets of a meet.
inline std::vector<Element> select(const std::vector<Element>& candidates, SelectorKind selector) {
    if (candidates.empty())
        throw ValidationError("empty candidate set");
    const SpacePtr& space = candidates.front().space();
    RegionSet meet = 0;
    for (const Element& x : candidates) {
        require_compatible(space, x.space());
        meet |= x.regions();
    }
    std::vector<RegionSet> picked;
    switch (selector) {
        case SelectorKind::largest:
            // maximal under inclusion
            for (const Element& x : candidates) {
                bool dominated = false;
                for (const Element& y : candidates)
                    if (x.regions() != y.regions() && (x.regions() & ~y.regions()) == 0)
                        dominated = true;
                if (!dominated)
                    picked.push_back(x.regions());
            }
            break;
        case SelectorKind::smallest:
            // minimal under inclusion
            for (const Element& x : candidates) {
                bool dominates = false;
                for (const Element& y : candidates)
                    if (x.regions() != y.regions() && (y.regions() & ~x.regions()) == 0)
                        dominates = true;
                if (!dominates)
                    picked.push_back(x.regions());
            }
            break;
        case SelectorKind::uniform:
        case SelectorKind::median:
        case SelectorKind::average:
            picked = detail::selected_targets(*space, meet, selector);
            break;
        case SelectorKind::none:
            throw ValidationError("rule has no selector");
    }
    std::vector<Element> out;
    out.reserve(picked.size());
    for (RegionSet regions : picked)
        out.emplace_back(Element::trusted{}, space, regions);
    sort_canonical(out);
    return out;
}

// The conditioning engine. All redistribution shares are computed from the
// prior masses, so the processing order of donors is irrelevant. Output mass
// lives on D1 only and sums to 1.
inline Bba condition(const Bba& m, const Element& a, const RuleSpec& rule) {
    require_compatible(m.space(), a.space());
    if (a.is_empty())
        throw ValidationError("conditioning on the empty element");
    const Space& space = *m.space();
    const RegionSet amask = a.regions();
    const auto& masses = m.masses();

    double t = 0.0;   // prior mass inside D1
    for (const auto& [k, v] : masses)
        if ((k & ~amask) == 0)
            t += v;
    if (t == 0.0)
        return Bba::categorical(m.space(), a);   // fully wrong prior: m(a|a) = 1

    std::map<RegionSet, double> result;
    for (const auto& [k, v] : masses)
        if ((k & ~amask) == 0)
            result[k] = v;

    const RegionMask a_atoms = atom_set_of(amask);
    double pot = 0.0;
    for (const auto& [k, v] : masses) {
        if ((k & ~amask) == 0)
            continue;
        const bool in_d2 = (atom_set_of(k) & a_atoms) == 0;
        const RouteMode mode = in_d2 ? rule.d2_mode : rule.d3_mode;
        const RegionSet meet = k & amask;
        switch (mode) {
            case RouteMode::u:
                pot += v;
                break;
            case RouteMode::p: {
                if (meet == 0) {
                    pot += v;
                    break;
                }
                const auto targets = detail::selected_targets(space, meet, rule.selector);
                const double share = v / static_cast<double>(targets.size());
                for (RegionSet x : targets)
                    result[x] += share;
                break;
            }
            case RouteMode::s: {
                double inside = 0.0;   // S(k): prior mass of D1 elements inside the donor
                for (const auto& [x, mx] : masses)
                    if ((x & ~meet) == 0)
                        inside += mx;
                if (inside > 0.0) {
                    for (const auto& [x, mx] : masses)
                        if ((x & ~meet) == 0)
                            result[x] += v * mx / inside;
                } else if (meet != 0) {
                    const auto targets = detail::selected_targets(space, meet, rule.selector);
                    const double share = v / static_cast<double>(targets.size());
                    for (RegionSet x : targets)
                        result[x] += share;
                } else {
                    pot += v;
                }
                break;
            }
        }
    }

    if (pot > 0.0) {
        for (const auto& [k, v] : masses)
            if ((k & ~amask) == 0)
                result[k] += v * pot / t;
    }
    return Bba::from_masses(m.space(), result);
}

inline Bba condition(const Bba& m, const Element& a, std::string_view rule_name) {
    const RuleSpec* rule = find_bcr(rule_name);
    if (!rule)
        throw ValidationError("unknown conditioning rule '" + std::string(rule_name) + "'");
    return condition(m, a, *rule);
}

}  // namespace hypercond
