#ifndef JPMINHASH_SPARSE_VECTOR_HPP
#define JPMINHASH_SPARSE_VECTOR_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jpminhash {

using ElementId = std::uint64_t;

/// Raised for inputs that violate a documented precondition.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Entry {
    ElementId id;
    double mass;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Nonnegative sparse vector. Entries are kept sorted by id, ids are unique,
/// and only strictly positive finite masses are stored.
class SparseVector {
public:
    SparseVector() = default;

    /// Builds from entries in any order. Zero masses are dropped; negative,
    /// non-finite masses and duplicate ids are rejected.
    static SparseVector from_entries(std::vector<Entry> entries);

    /// Dense masses; element id is the index.
    static SparseVector from_dense(std::span<const double> masses);

    std::span<const Entry> entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    double total() const noexcept { return total_; }

    /// Mass of `id`, 0 if absent.
    double mass(ElementId id) const noexcept;
    bool contains(ElementId id) const noexcept;

    /// Every mass multiplied by `factor` (> 0).
    SparseVector scaled(double factor) const;

    friend bool operator==(const SparseVector& a, const SparseVector& b) {
        return a.entries_ == b.entries_;
    }

protected:
    std::vector<Entry> entries_;
    double total_ = 0.0;
};

/// A SparseVector whose masses sum to 1 (within 1e-9). Only produced by
/// normalize().
class SparseDistribution : public SparseVector {
public:
    SparseDistribution() = default;

private:
    friend SparseDistribution normalize(const SparseVector& v);
};

/// Divides every mass by the total. Throws InvalidInput("degenerate
/// distribution") for an empty vector.
SparseDistribution normalize(const SparseVector& v);

/// Convenience: normalize(SparseVector::from_entries(entries)).
SparseDistribution make_distribution(std::vector<Entry> entries);

} // namespace jpminhash

#endif
