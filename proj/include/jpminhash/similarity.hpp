#ifndef JPMINHASH_SIMILARITY_HPP
#define JPMINHASH_SIMILARITY_HPP

#include "jpminhash/sparse_vector.hpp"

#include <utility>
#include <vector>

namespace jpminhash {

// Exact similarity measures between sparse distributions, bound curves, and
// the constructions that reach those bounds.
//
// Elements outside the support intersection never contribute an outer term to
// J_P; inside the inner sum they contribute through the finite branch of the
// max (1/0 is treated as infinity).

struct JpTerm {
    ElementId id;
    double value;
};

/// Per-element contributions to J_P, ordered by element id. Only elements in
/// the support intersection appear.
struct PerTermDecomposition {
    std::vector<JpTerm> terms;

    double sum() const noexcept;
};

struct SimilarityReport {
    double jp = 0.0;
    double jw = 0.0;
    double support_jaccard = 0.0;
    double tv = 0.0;
    double jsd = 0.0;
};

/// Disjoint groups of element ids.
struct Partition {
    std::vector<std::vector<ElementId>> groups;
};

/// Quadratic-time evaluation of J_P straight from its double-sum definition.
double jp_naive(const SparseDistribution& x, const SparseDistribution& y);

/// J_P in O(n log n): intersection elements are visited in descending order
/// of x_i/y_i while running sums of each branch of the max are kept.
double jp(const SparseDistribution& x, const SparseDistribution& y);

PerTermDecomposition jp_terms(const SparseDistribution& x, const SparseDistribution& y);

/// sum min / sum max over the union of supports. Throws if both are empty.
double jw(const SparseVector& x, const SparseVector& y);

/// Set Jaccard of the supports. Throws if both are empty.
double support_jaccard(const SparseVector& x, const SparseVector& y);

double total_variation(const SparseDistribution& x, const SparseDistribution& y);

/// Jensen-Shannon divergence in bits.
double jsd(const SparseDistribution& x, const SparseDistribution& y);

SimilarityReport similarity_report(const SparseDistribution& x, const SparseDistribution& y);

struct BoundCurves {
    double d;        // (1-p)/2 log2(1-p) + (1+p)/2 log2(1+p)
    double jp_lower; // (1-p)/(1+p)
    double jp_upper; // 1-p
};

/// p in [0,1] is a total variation distance.
BoundCurves bound_curves(double p);

/// Moves the mass where x and y differ onto fresh elements so that J_P drops
/// to J_W. The union of supports is re-indexed to 0..n-1 in id order; element
/// i maps to 2i (shared mass) and 2i+1 (excess).
std::pair<SparseDistribution, SparseDistribution>
construct_lower_pair(const SparseDistribution& x, const SparseDistribution& y);

/// Given shared masses summing to 1-p and a two-group split X,Y of their ids,
/// adds p mass proportionally on X for the first output and on Y for the
/// second. The result has J_P = 1-p and J_W = (1-p)/(1+p).
std::pair<SparseDistribution, SparseDistribution>
construct_upper_pair(const SparseVector& shared, double p, const Partition& split);

/// z^a with z^a_i proportional to max(x_i/x_a, y_i/y_a). `a` must lie in both
/// supports.
SparseDistribution adversarial_z(const SparseDistribution& x, const SparseDistribution& y,
                                 ElementId a);

/// Push-forward onto the groups of `f`: output element k carries the total
/// mass of group k. Every support element of x must be covered.
SparseDistribution coarsen(const SparseDistribution& x, const Partition& f);

} // namespace jpminhash

#endif
