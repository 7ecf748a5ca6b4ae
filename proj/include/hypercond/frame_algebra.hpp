#pragma once
// Canonical representation, enumeration, and lattice operations for
// hyper-power set elements under a DSm model.
//
// Representation: a Venn region is the nonempty set of atoms whose zones it
// lies inside, encoded as a bit mask over atom indices (RegionMask). A model
// declares which regions exist (free: all, Shafer: only singletons, hybrid:
// all regions not covered by a declared empty intersection). An element of
// the hyper-power set is the upward-closed set of allowed regions it covers,
// encoded as a 64-bit mask indexed by region mask value (RegionSet, bit r set
// iff region r belongs to the element, r in 1..2^n-1, bit 0 unused).
//
// Under this encoding union/intersection of elements are bitwise OR/AND,
// equality and inclusion are word comparisons, and the DSm cardinal is a
// popcount. Upward closure makes the encoding canonical: two formulas denote
// the same element iff they produce the same RegionSet.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hypercond {

// Input or model errors: bad names, mismatched spaces, malformed documents.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Data-dependent failures of a well-formed computation (e.g. total conflict).
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int max_atoms = 6;   // enumeration is exponential; guard rail

using RegionMask = std::uint32_t;     // bit i set iff atom i lies inside the region; nonzero
using RegionSet = std::uint64_t;      // bit r set iff region with mask r is present

inline int popcount(RegionMask m) { return std::popcount(m); }
inline int popcount(RegionSet s) { return std::popcount(s); }

// Atom names follow the identifier grammar [A-Za-z_][A-Za-z0-9_]*.
inline bool is_valid_atom_name(std::string_view name) {
    if (name.empty())
        return false;
    auto head = [](char c) { return c == '_' || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(name[0]))
        return false;
    return std::all_of(name.begin() + 1, name.end(), tail);
}

// Ordered list of distinct atom names; 2 <= n <= 6.
struct Frame {
    std::vector<std::string> atoms;

    static Frame make(std::vector<std::string> names) {
        if (names.size() < 2)
            throw ValidationError("frame needs at least 2 atoms");
        if (names.size() > static_cast<std::size_t>(max_atoms))
            throw ValidationError("frame too large: at most " + std::to_string(max_atoms) + " atoms supported");
        for (const auto& name : names) {
            if (!is_valid_atom_name(name))
                throw ValidationError("invalid atom name '" + name + "'");
        }
        for (std::size_t i = 0; i < names.size(); ++i)
            for (std::size_t j = i + 1; j < names.size(); ++j)
                if (names[i] == names[j])
                    throw ValidationError("duplicate atom name '" + names[i] + "'");
        Frame f;
        f.atoms = std::move(names);
        return f;
    }

    int size() const { return static_cast<int>(atoms.size()); }

    int index_of(std::string_view name) const {
        for (std::size_t i = 0; i < atoms.size(); ++i)
            if (atoms[i] == name)
                return static_cast<int>(i);
        return -1;
    }

    bool operator==(const Frame&) const = default;
};

enum class ModelKind { free, shafer, hybrid };

inline const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::free: return "free";
        case ModelKind::shafer: return "shafer";
        case ModelKind::hybrid: return "hybrid";
    }
    return "?";
}

// Constraint set: the atom intersections declared empty. Only pure
// intersections of >= 2 atoms can be constrained; free and Shafer models
// carry no explicit constraint list (Shafer's "all pairs" is implied by kind).
struct Model {
    ModelKind kind = ModelKind::free;
    std::vector<RegionMask> constraints;   // hybrid only; sorted, deduplicated

    static Model make_free() { return Model{ModelKind::free, {}}; }
    static Model make_shafer() { return Model{ModelKind::shafer, {}}; }

    static Model make_hybrid(std::vector<RegionMask> constraints) {
        for (RegionMask c : constraints) {
            if (popcount(c) < 2)
                throw ValidationError("hybrid constraint must intersect at least 2 atoms");
        }
        std::sort(constraints.begin(), constraints.end());
        constraints.erase(std::unique(constraints.begin(), constraints.end()), constraints.end());
        return Model{ModelKind::hybrid, std::move(constraints)};
    }

    bool operator==(const Model&) const = default;
};

// A frame bound to a model, with the derived region tables and a memoized
// enumeration cache. Immutable after construction; elements hold shared
// ownership so spaces outlive every element built on them.
class Space;
using SpacePtr = std::shared_ptr<const Space>;

class Space {
public:
    static SpacePtr make(Frame frame, Model model) {
        auto space = std::shared_ptr<Space>(new Space(std::move(frame), std::move(model)));
        return space;
    }

    const Frame& frame() const { return frame_; }
    const Model& model() const { return model_; }
    int atom_count() const { return frame_.size(); }

    // All allowed region masks, as a RegionSet; this is the region set of the
    // total ignorance element (the union of all atoms).
    RegionSet allowed() const { return allowed_; }
    bool region_allowed(RegionMask r) const { return (allowed_ >> r) & 1; }

    // Allowed regions lying inside atom i; region set of the atom element.
    RegionSet atom_regions(int i) const { return atom_regions_[static_cast<std::size_t>(i)]; }

    // Allowed strict supersets of region r, as a RegionSet.
    RegionSet strict_supersets(RegionMask r) const { return strict_supersets_[r]; }

    // Spaces are compatible when frame and model agree by content.
    bool compatible(const Space& other) const {
        return this == &other || (frame_ == other.frame_ && model_ == other.model_);
    }

    // All nonempty upward-closed subsets of `within`, which must itself be an
    // upward-closed subset of allowed(). Result is sorted ascending by
    // (popcount, value) and memoized per space.
    std::shared_ptr<const std::vector<RegionSet>> upsets_within(RegionSet within) const {
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = upset_cache_.find(within);
            if (it != upset_cache_.end())
                return it->second;
        }
        auto result = std::make_shared<std::vector<RegionSet>>(enumerate_upsets(within));
        std::lock_guard<std::mutex> lock(cache_mutex_);
        return upset_cache_.emplace(within, std::move(result)).first->second;
    }

private:
    Space(Frame frame, Model model) : frame_(std::move(frame)), model_(std::move(model)) {
        const int n = frame_.size();
        const RegionMask full = static_cast<RegionMask>((1u << n) - 1u);
        std::vector<RegionMask> constraints = model_.constraints;
        if (model_.kind == ModelKind::shafer) {
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    constraints.push_back((RegionMask{1} << i) | (RegionMask{1} << j));
        } else if (model_.kind == ModelKind::free) {
            constraints.clear();
        }
        for (RegionMask c : constraints) {
            if ((c & ~full) != 0)
                throw ValidationError("model constraint references an atom outside the frame");
        }
        for (RegionMask r = 1; r <= full; ++r) {
            bool dead = std::any_of(constraints.begin(), constraints.end(),
                                    [&](RegionMask c) { return (r & c) == c; });
            if (!dead)
                allowed_ |= RegionSet{1} << r;
        }
        for (int i = 0; i < n; ++i) {
            for (RegionMask r = 1; r <= full; ++r)
                if (region_allowed(r) && ((r >> i) & 1))
                    atom_regions_[static_cast<std::size_t>(i)] |= RegionSet{1} << r;
        }
        for (RegionMask r = 1; r <= full; ++r) {
            if (!region_allowed(r))
                continue;
            for (RegionMask q = 1; q <= full; ++q)
                if (q != r && (q & r) == r && region_allowed(q))
                    strict_supersets_[r] |= RegionSet{1} << q;
        }
    }

    // Depth-first include/exclude over the regions of `within` in decreasing
    // size order; a region may be included only once all its strict supersets
    // inside `within` are included, so each upward-closed set is produced
    // exactly once.
    std::vector<RegionSet> enumerate_upsets(RegionSet within) const {
        std::vector<RegionMask> regions;
        for (RegionMask r = 1; r < 64; ++r)
            if ((within >> r) & 1)
                regions.push_back(r);
        std::sort(regions.begin(), regions.end(), [](RegionMask a, RegionMask b) {
            int pa = popcount(a), pb = popcount(b);
            return pa != pb ? pa > pb : a < b;
        });
        std::vector<RegionSet> out;
        dfs_upsets(regions, 0, RegionSet{0}, within, out);
        std::sort(out.begin(), out.end(), [](RegionSet a, RegionSet b) {
            int pa = popcount(a), pb = popcount(b);
            return pa != pb ? pa < pb : a < b;
        });
        return out;
    }

    void dfs_upsets(const std::vector<RegionMask>& regions, std::size_t i, RegionSet included,
                    RegionSet within, std::vector<RegionSet>& out) const {
        if (i == regions.size()) {
            if (included != 0)
                out.push_back(included);
            return;
        }
        dfs_upsets(regions, i + 1, included, within, out);
        const RegionMask r = regions[i];
        if ((strict_supersets(r) & within & ~included) == 0)
            dfs_upsets(regions, i + 1, included | (RegionSet{1} << r), within, out);
    }

    Frame frame_;
    Model model_;
    RegionSet allowed_ = 0;
    std::array<RegionSet, max_atoms> atom_regions_{};
    std::array<RegionSet, 64> strict_supersets_{};
    mutable std::mutex cache_mutex_;
    mutable std::map<RegionSet, std::shared_ptr<const std::vector<RegionSet>>> upset_cache_;
};

inline void require_compatible(const SpacePtr& a, const SpacePtr& b) {
    if (!a || !b || !a->compatible(*b))
        throw ValidationError("frame/model mismatch");
}

// Canonical member of the hyper-power set: an upward-closed set of allowed
// regions. regions() == 0 encodes the empty element.
class Element {
public:
    Element(SpacePtr space, RegionSet regions) : space_(std::move(space)), regions_(regions) {
        if (!space_)
            throw ValidationError("element requires a space");
        if ((regions_ & ~space_->allowed()) != 0)
            throw ValidationError("element contains a region that is empty under the model");
        for (RegionMask r = 1; r < 64; ++r) {
            if (((regions_ >> r) & 1) && (space_->strict_supersets(r) & ~regions_) != 0)
                throw ValidationError("element region set is not upward-closed");
        }
    }

    const SpacePtr& space() const { return space_; }
    RegionSet regions() const { return regions_; }
    bool is_empty() const { return regions_ == 0; }

    friend Element operator|(const Element& a, const Element& b) {
        require_compatible(a.space_, b.space_);
        return Element(trusted{}, a.space_, a.regions_ | b.regions_);
    }
    friend Element operator&(const Element& a, const Element& b) {
        require_compatible(a.space_, b.space_);
        return Element(trusted{}, a.space_, a.regions_ & b.regions_);
    }
    friend bool operator==(const Element& a, const Element& b) {
        require_compatible(a.space_, b.space_);
        return a.regions_ == b.regions_;
    }
    friend bool operator!=(const Element& a, const Element& b) { return !(a == b); }

    // Internal fast path for region sets already known to be valid.
    struct trusted {};
    Element(trusted, SpacePtr space, RegionSet regions) : space_(std::move(space)), regions_(regions) {}

private:
    SpacePtr space_;
    RegionSet regions_;
};

inline Element empty_element(const SpacePtr& space) {
    return Element(Element::trusted{}, space, 0);
}

// The union of all atoms; its region set is every allowed region.
inline Element total_ignorance(const SpacePtr& space) {
    return Element(Element::trusted{}, space, space->allowed());
}

inline Element atom_element(const SpacePtr& space, int i) {
    if (i < 0 || i >= space->atom_count())
        throw ValidationError("atom index out of range");
    return Element(Element::trusted{}, space, space->atom_regions(i));
}

inline Element set_union(const Element& a, const Element& b) { return a | b; }
inline Element set_intersection(const Element& a, const Element& b) { return a & b; }

inline bool is_subset(const Element& a, const Element& b) {
    require_compatible(a.space(), b.space());
    return (a.regions() & ~b.regions()) == 0;
}

// Number of Venn regions composing the element; 0 for the empty element.
inline int dsm_cardinal(const Element& x) { return popcount(x.regions()); }

// Minimal regions (the canonical antichain determining the element), sorted
// ascending by (size, mask value).
inline std::vector<RegionMask> minimal_regions(RegionSet regions) {
    std::vector<RegionMask> minimal;
    for (RegionMask r = 1; r < 64; ++r) {
        if (!((regions >> r) & 1))
            continue;
        bool has_smaller = false;
        for (RegionMask q = 1; q < r && !has_smaller; ++q)
            has_smaller = ((regions >> q) & 1) && (q & r) == q && q != r;
        if (!has_smaller)
            minimal.push_back(r);
    }
    std::sort(minimal.begin(), minimal.end(), [](RegionMask a, RegionMask b) {
        int pa = popcount(a), pb = popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    return minimal;
}

inline std::vector<RegionMask> minimal_regions(const Element& x) { return minimal_regions(x.regions()); }

// s(A): the atoms appearing in the canonical minimal form, as an atom bit set.
inline RegionMask atom_set_of(RegionSet regions) {
    RegionMask atoms = 0;
    for (RegionMask r : minimal_regions(regions))
        atoms |= r;
    return atoms;
}

inline RegionMask atoms_of(const Element& x) {
    if (x.is_empty())
        throw ValidationError("the empty element has no atoms");
    return atom_set_of(x.regions());
}

// Minimal disjunctive form: the antichain of minimal regions as a union of
// intersections. Atoms appear in frame order inside each term; terms are
// sorted by (size, lexicographic) and parenthesized only when a multi-atom
// term occurs in a union of several terms. The empty element prints as "0".
inline std::string to_formula(const Element& x) {
    if (x.is_empty())
        return "0";
    const Frame& frame = x.space()->frame();
    struct Term {
        int size;
        std::string text;
    };
    std::vector<Term> terms;
    for (RegionMask r : minimal_regions(x)) {
        std::string text;
        for (int i = 0; i < frame.size(); ++i) {
            if ((r >> i) & 1) {
                if (!text.empty())
                    text += " & ";
                text += frame.atoms[static_cast<std::size_t>(i)];
            }
        }
        terms.push_back({popcount(r), std::move(text)});
    }
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
        return a.size != b.size ? a.size < b.size : a.text < b.text;
    });
    if (terms.size() == 1)
        return terms.front().text;
    std::string out;
    for (const Term& term : terms) {
        if (!out.empty())
            out += " | ";
        if (term.size > 1)
            out += "(" + term.text + ")";
        else
            out += term.text;
    }
    return out;
}

// Canonical public ordering: ascending DSm cardinal, then lexicographic on the
// serialized formula.
inline void sort_canonical(std::vector<Element>& elements) {
    std::vector<std::pair<std::string, std::size_t>> keys;
    keys.reserve(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i)
        keys.emplace_back(to_formula(elements[i]), i);
    std::sort(keys.begin(), keys.end(), [&](const auto& a, const auto& b) {
        int ca = dsm_cardinal(elements[a.second]);
        int cb = dsm_cardinal(elements[b.second]);
        return ca != cb ? ca < cb : a.first < b.first;
    });
    std::vector<Element> sorted;
    sorted.reserve(elements.size());
    for (const auto& [text, i] : keys)
        sorted.push_back(elements[i]);
    elements = std::move(sorted);
}

// Every element of the hyper-power set exactly once, in canonical order.
// The empty element is excluded unless requested.
inline std::vector<Element> enumerate_elements(const SpacePtr& space, bool include_empty = false) {
    auto upsets = space->upsets_within(space->allowed());
    std::vector<Element> elements;
    elements.reserve(upsets->size() + (include_empty ? 1 : 0));
    if (include_empty)
        elements.push_back(empty_element(space));
    for (RegionSet regions : *upsets)
        elements.emplace_back(Element::trusted{}, space, regions);
    sort_canonical(elements);
    return elements;
}

}  // namespace hypercond
