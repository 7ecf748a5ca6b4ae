#pragma once
// Mass assignments over a hyper-power set, with the belief and plausibility
// functionals derived from them.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "frame_algebra.hpp"

namespace hypercond {

inline constexpr double mass_sum_tolerance = 1e-6;

// Basic belief assignment: finitely many focal elements with positive mass
// summing to 1. Keys are canonical region sets, so equal elements always
// merge; the empty element never carries mass.
class Bba {
public:
    // Low-level constructor from canonical region sets. Validates each key as
    // an element of the space, rejects negative mass and positive mass on the
    // empty element, requires the total within `tolerance` of 1, then divides
    // by the total so stored masses sum to 1 exactly up to rounding.
    static Bba from_masses(SpacePtr space, const std::map<RegionSet, double>& masses,
                           double tolerance = mass_sum_tolerance) {
        if (!space)
            throw ValidationError("mass assignment requires a space");
        double total = 0.0;
        std::map<RegionSet, double> kept;
        for (const auto& [regions, value] : masses) {
            Element check(space, regions);   // throws unless a valid element
            if (value < 0.0)
                throw ValidationError("negative mass on '" + to_formula(check) + "'");
            if (value > 0.0 && regions == 0)
                throw ValidationError("positive mass on the empty element");
            total += value;
            if (value > 0.0)
                kept[regions] = value;
        }
        if (std::abs(total - 1.0) > tolerance)
            throw ValidationError("masses sum to " + std::to_string(total) + ", expected 1");
        for (auto& [regions, value] : kept)
            value /= total;
        return Bba(std::move(space), std::move(kept));
    }

    static Bba make(const SpacePtr& space, const std::vector<std::pair<Element, double>>& entries,
                    double tolerance = mass_sum_tolerance) {
        std::map<RegionSet, double> masses;
        for (const auto& [element, value] : entries) {
            require_compatible(space, element.space());
            masses[element.regions()] += value;
        }
        return from_masses(space, masses, tolerance);
    }

    // All mass on one nonempty element.
    static Bba categorical(const SpacePtr& space, const Element& x) {
        require_compatible(space, x.space());
        if (x.is_empty())
            throw ValidationError("categorical mass on the empty element");
        return Bba(space, {{x.regions(), 1.0}});
    }

    const SpacePtr& space() const { return space_; }
    const std::map<RegionSet, double>& masses() const { return mass_; }
    std::size_t focal_count() const { return mass_.size(); }

    double mass_of(const Element& x) const {
        require_compatible(space_, x.space());
        auto it = mass_.find(x.regions());
        return it == mass_.end() ? 0.0 : it->second;
    }

    // Focal elements paired with their masses, in canonical order.
    std::vector<std::pair<Element, double>> entries() const {
        std::vector<Element> elements;
        elements.reserve(mass_.size());
        for (const auto& [regions, value] : mass_)
            elements.emplace_back(Element::trusted{}, space_, regions);
        sort_canonical(elements);
        std::vector<std::pair<Element, double>> out;
        out.reserve(elements.size());
        for (const Element& e : elements)
            out.emplace_back(e, mass_.at(e.regions()));
        return out;
    }

    // True when every focal element is a single atom.
    bool is_bayesian() const {
        for (const auto& [regions, value] : mass_) {
            bool atom = false;
            for (int i = 0; i < space_->atom_count() && !atom; ++i)
                atom = regions == space_->atom_regions(i);
            if (!atom)
                return false;
        }
        return true;
    }

private:
    Bba(SpacePtr space, std::map<RegionSet, double> mass)
        : space_(std::move(space)), mass_(std::move(mass)) {}

    SpacePtr space_;
    std::map<RegionSet, double> mass_;
};

// Sum of mass over nonempty focal elements contained in x.
inline double bel(const Bba& m, const Element& x) {
    require_compatible(m.space(), x.space());
    double total = 0.0;
    for (const auto& [regions, value] : m.masses())
        if ((regions & ~x.regions()) == 0)
            total += value;
    return total;
}

// Sum of mass over focal elements meeting x.
inline double pl(const Bba& m, const Element& x) {
    require_compatible(m.space(), x.space());
    double total = 0.0;
    for (const auto& [regions, value] : m.masses())
        if ((regions & x.regions()) != 0)
            total += value;
    return total;
}

inline bool is_bayesian(const Bba& m) { return m.is_bayesian(); }

}  // namespace hypercond
