#include "jpminhash/sparse_vector.hpp"

#include <algorithm>
#include <cmath>

namespace jpminhash {

SparseVector SparseVector::from_entries(std::vector<Entry> entries) {
    for (const auto& e : entries) {
        if (!std::isfinite(e.mass) || e.mass < 0.0) {
            throw InvalidInput("mass for element " + std::to_string(e.id) +
                               " must be finite and nonnegative");
        }
    }
    std::erase_if(entries, [](const Entry& e) { return e.mass == 0.0; });
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });
    auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                  [](const Entry& a, const Entry& b) { return a.id == b.id; });
    if (dup != entries.end()) {
        throw InvalidInput("duplicate element id " + std::to_string(dup->id));
    }

    SparseVector v;
    v.entries_ = std::move(entries);
    for (const auto& e : v.entries_) v.total_ += e.mass;
    return v;
}

SparseVector SparseVector::from_dense(std::span<const double> masses) {
    std::vector<Entry> entries;
    entries.reserve(masses.size());
    for (std::size_t i = 0; i < masses.size(); ++i) {
        entries.push_back({static_cast<ElementId>(i), masses[i]});
    }
    return from_entries(std::move(entries));
}

double SparseVector::mass(ElementId id) const noexcept {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const Entry& e, ElementId v) { return e.id < v; });
    return (it != entries_.end() && it->id == id) ? it->mass : 0.0;
}

bool SparseVector::contains(ElementId id) const noexcept { return mass(id) > 0.0; }

SparseVector SparseVector::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) {
        throw InvalidInput("scale factor must be positive and finite");
    }
    SparseVector v;
    v.entries_ = entries_;
    for (auto& e : v.entries_) {
        e.mass *= factor;
        v.total_ += e.mass;
    }
    return v;
}

SparseDistribution normalize(const SparseVector& v) {
    if (v.empty() || !(v.total() > 0.0)) {
        throw InvalidInput("degenerate distribution");
    }
    SparseDistribution d;
    d.entries_.assign(v.entries().begin(), v.entries().end());
    const double total = v.total();
    for (auto& e : d.entries_) {
        e.mass /= total;
        d.total_ += e.mass;
    }
    return d;
}

SparseDistribution make_distribution(std::vector<Entry> entries) {
    return normalize(SparseVector::from_entries(std::move(entries)));
}

} // namespace jpminhash
