#ifndef JPMINHASH_SPARSE_MINHASH_HPP
#define JPMINHASH_SPARSE_MINHASH_HPP

#include "jpminhash/hashing.hpp"
#include "jpminhash/sparse_vector.hpp"

#include <optional>
#include <string>
#include <vector>

namespace jpminhash {

/// Exponential-race sample: argmin over the support of -ln(uniform_hash(i, seed)) / x_i.
/// Exact key ties go to the smallest id. Scale invariant; masses are used as given.
ElementId pminhash(const SparseVector& x, Seed seed);

struct Signature {
    std::string doc_id;
    Seed base_seed;
    std::vector<ElementId> samples; // samples[j] = pminhash(x, derive_seed(base_seed, j))

    std::size_t k() const noexcept { return samples.size(); }

    friend bool operator==(const Signature&, const Signature&) = default;
};

Signature signature(const SparseVector& x, Seed base_seed, std::size_t k, std::string doc_id = {});

/// Fraction of positions where two equal-length signatures agree.
double signature_agreement(const Signature& a, const Signature& b);

/// Rooted tree whose leaves are element ids. Internal nodes carry no id.
class WeightTree {
public:
    struct Node {
        std::optional<ElementId> leaf;
        std::vector<Node> children;
    };

    explicit WeightTree(Node root);

    /// All ids as direct children of the root.
    static WeightTree flat(const std::vector<ElementId>& ids);

    /// (promoted, (rest...)): `promoted` is a child of the root, the rest sit
    /// under a single internal sibling.
    static WeightTree promote(ElementId promoted, const std::vector<ElementId>& rest);

    const Node& root() const noexcept { return root_; }
    const std::vector<ElementId>& leaves() const noexcept { return leaves_; }

private:
    Node root_;
    std::vector<ElementId> leaves_;
};

/// Hierarchical P-MinHash: sample a child of the current node with weights
/// equal to the descendant leaf mass, recurse until a leaf. Each node draws
/// its uniform from a key derived from its child-index path.
ElementId tree_pminhash(const WeightTree& tree, const SparseVector& x, Seed seed);

/// Fraction of seeds j < n with pminhash(x, derive_seed(base, j)) == pminhash(y, ...).
double collision_estimate(const SparseVector& x, const SparseVector& y, Seed base, std::size_t n);

} // namespace jpminhash

#endif
