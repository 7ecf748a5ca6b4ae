#pragma once
// Shared helpers for the test suites: independent reference implementations
// (closure-based enumeration, a second conditioning engine, generic
// selectors) and seeded random generators. The references deliberately avoid
// the library's fast paths so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <hypercond/hypercond.hpp>

namespace testsupport {

using namespace hypercond;

// Brute-force oracle: close the atom elements under union/intersection to a
// fixed point, then adjoin the empty element. Counts the whole hyper-power
// set without ever touching the library's upset enumerator.
inline std::set<RegionSet> closure_from_atoms(const SpacePtr& space) {
    std::set<RegionSet> known;
    for (int i = 0; i < space->atom_count(); ++i)
        known.insert(space->atom_regions(i));
    bool grew = true;
    while (grew) {
        grew = false;
        const std::vector<RegionSet> snapshot(known.begin(), known.end());
        for (RegionSet a : snapshot) {
            for (RegionSet b : snapshot) {
                grew = known.insert(a | b).second || grew;
                grew = known.insert(a & b).second || grew;
            }
        }
    }
    known.insert(0);
    return known;
}

// Generic selector on explicit candidate lists, by the book: inclusion scans
// for largest/smallest, position-based cardinal classes for median, nearest
// present cardinal (ties up) for average.
inline std::vector<RegionSet> reference_select(std::vector<RegionSet> candidates,
                                               SelectorKind selector) {
    std::sort(candidates.begin(), candidates.end(), [](RegionSet a, RegionSet b) {
        const int pa = popcount(a), pb = popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    const std::size_t n = candidates.size();
    std::vector<RegionSet> out;
    switch (selector) {
        case SelectorKind::largest:
            for (RegionSet x : candidates) {
                bool dominated = false;
                for (RegionSet y : candidates)
                    dominated = dominated || (x != y && (x & ~y) == 0);
                if (!dominated)
                    out.push_back(x);
            }
            break;
        case SelectorKind::smallest:
            for (RegionSet x : candidates) {
                bool dominates = false;
                for (RegionSet y : candidates)
                    dominates = dominates || (x != y && (y & ~x) == 0);
                if (!dominates)
                    out.push_back(x);
            }
            break;
        case SelectorKind::uniform:
            out = candidates;
            break;
        case SelectorKind::median: {
            int c1, c2;
            if (n % 2 == 1) {
                c1 = c2 = popcount(candidates[n / 2]);
            } else {
                c1 = popcount(candidates[n / 2 - 1]);
                c2 = popcount(candidates[n / 2]);
            }
            for (RegionSet x : candidates)
                if (popcount(x) == c1 || popcount(x) == c2)
                    out.push_back(x);
            break;
        }
        case SelectorKind::average: {
            double total = 0.0;
            for (RegionSet x : candidates)
                total += popcount(x);
            const double avg = total / static_cast<double>(n);
            int best = popcount(candidates.front());
            for (RegionSet x : candidates) {
                const int c = popcount(x);
                const double dc = std::abs(c - avg), db = std::abs(best - avg);
                if (dc < db || (dc == db && c > best))
                    best = c;
            }
            for (RegionSet x : candidates)
                if (popcount(x) == best)
                    out.push_back(x);
            break;
        }
        case SelectorKind::none:
            throw ValidationError("rule has no selector");
    }
    return out;
}

// Second conditioning engine: same redistribution semantics, but classifies
// donors from a full enumeration, finds candidates by scanning that list,
// uses reference_select, and walks the focal elements in reverse order.
inline Bba reference_condition(const Bba& m, const Element& a, const RuleSpec& rule) {
    const SpacePtr& space = m.space();
    if (a.is_empty())
        throw ValidationError("conditioning on the empty element");
    std::vector<RegionSet> universe;
    for (const Element& x : enumerate_elements(space))
        universe.push_back(x.regions());
    const RegionSet amask = a.regions();
    const RegionMask a_atoms = atoms_of(a);

    const std::vector<std::pair<RegionSet, double>> focals(m.masses().begin(), m.masses().end());
    double t = 0.0;
    for (const auto& [k, v] : focals)
        if ((k & ~amask) == 0)
            t += v;
    if (t == 0.0)
        return Bba::categorical(space, a);

    std::map<RegionSet, double> result;
    for (const auto& [k, v] : focals)
        if ((k & ~amask) == 0)
            result[k] = v;
    double pot = 0.0;
    for (auto it = focals.rbegin(); it != focals.rend(); ++it) {
        const auto& [k, v] = *it;
        if ((k & ~amask) == 0)
            continue;
        const bool in_d2 = (atom_set_of(k) & a_atoms) == 0;
        const RouteMode mode = in_d2 ? rule.d2_mode : rule.d3_mode;
        std::vector<RegionSet> candidates;
        for (RegionSet x : universe)
            if ((x & ~k) == 0 && (x & ~amask) == 0)
                candidates.push_back(x);
        if (mode == RouteMode::u) {
            pot += v;
            continue;
        }
        if (candidates.empty()) {
            pot += v;
            continue;
        }
        bool proportional_done = false;
        if (mode == RouteMode::s) {
            double inside = 0.0;
            for (const auto& [x, mx] : focals)
                if (std::find(candidates.begin(), candidates.end(), x) != candidates.end())
                    inside += mx;
            if (inside > 0.0) {
                for (const auto& [x, mx] : focals)
                    if (std::find(candidates.begin(), candidates.end(), x) != candidates.end())
                        result[x] += v * mx / inside;
                proportional_done = true;
            }
        }
        if (!proportional_done) {
            const std::vector<RegionSet> picks = reference_select(candidates, rule.selector);
            for (RegionSet x : picks)
                result[x] += v / static_cast<double>(picks.size());
        }
    }
    if (pot > 0.0) {
        for (const auto& [k, v] : focals)
            if ((k & ~amask) == 0)
                result[k] += v * pot / t;
    }
    return Bba::from_masses(space, result);
}

inline std::vector<std::string> atom_names(int n) {
    const char* pool[] = {"A", "B", "C", "D", "E", "F"};
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i)
        names.push_back(pool[i]);
    return names;
}

inline SpacePtr make_space(int n, ModelKind kind, std::vector<RegionMask> constraints = {}) {
    Model model;
    switch (kind) {
        case ModelKind::free: model = Model::make_free(); break;
        case ModelKind::shafer: model = Model::make_shafer(); break;
        case ModelKind::hybrid: model = Model::make_hybrid(std::move(constraints)); break;
    }
    return Space::make(Frame::make(atom_names(n)), std::move(model));
}

inline SpacePtr random_space(std::mt19937& rng, int n, ModelKind kind) {
    if (kind != ModelKind::hybrid)
        return make_space(n, kind);
    std::vector<RegionMask> constraints;
    const RegionMask full = static_cast<RegionMask>((1u << n) - 1u);
    for (RegionMask c = 3; c <= full; ++c)
        if (popcount(c) >= 2 && rng() % 4 == 0)
            constraints.push_back(c);
    return make_space(n, kind, std::move(constraints));
}

// Random upward-closed region set over the allowed regions.
inline Element random_element(std::mt19937& rng, const SpacePtr& space, bool allow_empty) {
    const RegionSet allowed = space->allowed();
    std::vector<RegionMask> regions;
    for (RegionMask r = 1; r < 64; ++r)
        if ((allowed >> r) & 1)
            regions.push_back(r);
    RegionSet seed = 0;
    for (RegionMask r : regions)
        if (rng() % 4 == 0)
            seed |= RegionSet{1} << r;
    if (!allow_empty && seed == 0)
        seed |= RegionSet{1} << regions[rng() % regions.size()];
    bool grew = true;
    while (grew) {
        grew = false;
        for (RegionMask r : regions) {
            if (((seed >> r) & 1) && (space->strict_supersets(r) & ~seed) != 0) {
                seed |= space->strict_supersets(r);
                grew = true;
            }
        }
    }
    return Element(space, seed);   // validating constructor double-checks closure
}

inline Bba random_bba(std::mt19937& rng, const SpacePtr& space, int max_focals) {
    const int count = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_focals));
    std::map<RegionSet, double> masses;
    for (int i = 0; i < count; ++i) {
        const Element x = random_element(rng, space, false);
        masses[x.regions()] += 1.0 + static_cast<double>(rng() % 100);
    }
    double total = 0.0;
    for (const auto& [k, v] : masses)
        total += v;
    for (auto& [k, v] : masses)
        v /= total;
    return Bba::from_masses(space, masses);
}

inline Bba random_bayesian_bba(std::mt19937& rng, const SpacePtr& space) {
    std::map<RegionSet, double> masses;
    double total = 0.0;
    for (int i = 0; i < space->atom_count(); ++i) {
        const double w = static_cast<double>(rng() % 100);
        if (w > 0.0) {
            masses[space->atom_regions(i)] = w;
            total += w;
        }
    }
    if (masses.empty()) {
        masses[space->atom_regions(0)] = 1.0;
        total = 1.0;
    }
    for (auto& [k, v] : masses)
        v /= total;
    return Bba::from_masses(space, masses);
}

// Random formula tree rendered with random spacing and operator spellings,
// paired with the element it denotes (computed via the set operations).
inline std::pair<std::string, Element> random_formula(std::mt19937& rng, const SpacePtr& space,
                                                      int depth) {
    auto pad = [&rng]() { return rng() % 3 == 0 ? std::string(rng() % 2 + 1, ' ') : std::string(); };
    if (depth == 0 || rng() % 3 == 0) {
        if (rng() % 8 == 0)
            return {pad() + "0" + pad(), empty_element(space)};
        const int i = static_cast<int>(rng() % static_cast<unsigned>(space->atom_count()));
        return {pad() + space->frame().atoms[static_cast<std::size_t>(i)] + pad(),
                atom_element(space, i)};
    }
    auto [left_text, left] = random_formula(rng, space, depth - 1);
    auto [right_text, right] = random_formula(rng, space, depth - 1);
    const bool join = rng() % 2 == 0;
    const char* ascii_op = join ? "|" : "&";
    const char* unicode_op = join ? "∪" : "∩";
    const std::string op = rng() % 4 == 0 ? unicode_op : ascii_op;
    const std::string text = "(" + left_text + ")" + pad() + op + pad() + "(" + right_text + ")";
    return {text, join ? left | right : left & right};
}

// Compare a bba against expected (formula, value) pairs: identical focal
// sets, values within tol. Returns "" on match, else a description.
struct ExpectedMass {
    const char* formula;
    double value;
};

inline std::string bba_mismatch(const Bba& actual, const std::vector<ExpectedMass>& expected,
                                double tol) {
    std::map<RegionSet, double> want;
    for (const ExpectedMass& e : expected) {
        const Element x = parse_formula(actual.space(), e.formula);
        if (want.count(x.regions()))
            return std::string("expected list repeats '") + e.formula + "'";
        if (e.value > 0.0)
            want[x.regions()] = e.value;
    }
    for (const auto& [k, v] : want) {
        if (!actual.masses().count(k))
            return "missing focal element '" +
                   to_formula(Element(Element::trusted{}, actual.space(), k)) + "'";
    }
    for (const auto& [k, v] : actual.masses()) {
        const auto it = want.find(k);
        const Element x(Element::trusted{}, actual.space(), k);
        if (it == want.end())
            return "unexpected focal element '" + to_formula(x) + "' with mass " +
                   std::to_string(v);
        if (std::abs(v - it->second) > tol) {
            char buffer[160];
            std::snprintf(buffer, sizeof(buffer), "mass of '%s' is %.12g, expected %.12g (tol %g)",
                          to_formula(x).c_str(), v, it->second, tol);
            return buffer;
        }
    }
    return "";
}

// L1 distance between two bbas on the same space.
inline double bba_distance(const Bba& x, const Bba& y) {
    std::set<RegionSet> support;
    for (const auto& [k, v] : x.masses())
        support.insert(k);
    for (const auto& [k, v] : y.masses())
        support.insert(k);
    double distance = 0.0;
    for (RegionSet k : support) {
        const auto ix = x.masses().find(k), iy = y.masses().find(k);
        distance += std::abs((ix == x.masses().end() ? 0.0 : ix->second) -
                             (iy == y.masses().end() ? 0.0 : iy->second));
    }
    return distance;
}

}  // namespace testsupport
