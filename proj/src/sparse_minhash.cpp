#include "jpminhash/sparse_minhash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace jpminhash {

ElementId pminhash(const SparseVector& x, Seed seed) {
    if (x.empty()) throw InvalidInput("pminhash of an empty vector");
    ElementId best = 0;
    double best_key = std::numeric_limits<double>::infinity();
    bool found = false;
    // Entries are in ascending id order, so strict < keeps the smallest id on ties.
    for (const auto& e : x.entries()) {
        const double key = -std::log(uniform_hash(e.id, seed)) / e.mass;
        if (!found || key < best_key) {
            best = e.id;
            best_key = key;
            found = true;
        }
    }
    return best;
}

Signature signature(const SparseVector& x, Seed base_seed, std::size_t k, std::string doc_id) {
    if (k == 0) throw InvalidInput("signature length k must be positive");
    if (x.empty()) throw InvalidInput("signature of an empty vector");
    Signature sig{std::move(doc_id), base_seed, {}};
    sig.samples.reserve(k);
    for (std::size_t j = 0; j < k; ++j) {
        sig.samples.push_back(pminhash(x, derive_seed(base_seed, j)));
    }
    return sig;
}

double signature_agreement(const Signature& a, const Signature& b) {
    if (a.samples.size() != b.samples.size() || a.samples.empty()) {
        throw InvalidInput("signatures must have equal positive length");
    }
    std::size_t same = 0;
    for (std::size_t j = 0; j < a.samples.size(); ++j) same += a.samples[j] == b.samples[j];
    return static_cast<double>(same) / static_cast<double>(a.samples.size());
}

namespace {

void collect_leaves(const WeightTree::Node& node, std::vector<ElementId>& out) {
    if (node.leaf) {
        if (!node.children.empty()) throw InvalidInput("leaf node with children");
        out.push_back(*node.leaf);
        return;
    }
    if (node.children.empty()) throw InvalidInput("internal node without children");
    for (const auto& c : node.children) collect_leaves(c, out);
}

double subtree_mass(const WeightTree::Node& node, const SparseVector& x) {
    if (node.leaf) return x.mass(*node.leaf);
    double s = 0.0;
    for (const auto& c : node.children) s += subtree_mass(c, x);
    return s;
}

constexpr std::uint64_t kRootPathKey = 0x6A09E667F3BCC908ULL;

std::uint64_t child_path_key(std::uint64_t parent, std::size_t index) {
    return fin64(parent ^ fin64(static_cast<std::uint64_t>(index) + 1));
}

} // namespace

WeightTree::WeightTree(Node root) : root_(std::move(root)) {
    collect_leaves(root_, leaves_);
    std::vector<ElementId> sorted = leaves_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidInput("element appears in more than one leaf");
    }
}

WeightTree WeightTree::flat(const std::vector<ElementId>& ids) {
    Node root;
    for (ElementId id : ids) root.children.push_back(Node{id, {}});
    return WeightTree(std::move(root));
}

WeightTree WeightTree::promote(ElementId promoted, const std::vector<ElementId>& rest) {
    Node root;
    root.children.push_back(Node{promoted, {}});
    if (!rest.empty()) {
        Node inner;
        for (ElementId id : rest) inner.children.push_back(Node{id, {}});
        root.children.push_back(std::move(inner));
    }
    return WeightTree(std::move(root));
}

ElementId tree_pminhash(const WeightTree& tree, const SparseVector& x, Seed seed) {
    if (x.empty()) throw InvalidInput("tree_pminhash of an empty vector");
    std::unordered_set<ElementId> leaves(tree.leaves().begin(), tree.leaves().end());
    for (const auto& e : x.entries()) {
        if (!leaves.contains(e.id)) {
            throw InvalidInput("element " + std::to_string(e.id) + " has no leaf in the tree");
        }
    }

    const WeightTree::Node* node = &tree.root();
    std::uint64_t path = kRootPathKey;
    while (!node->leaf) {
        const WeightTree::Node* chosen = nullptr;
        std::uint64_t chosen_path = 0;
        double best_key = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < node->children.size(); ++c) {
            const double w = subtree_mass(node->children[c], x);
            if (w == 0.0) continue;
            const std::uint64_t key_path = child_path_key(path, c);
            const double key = -std::log(uniform_hash(key_path, seed)) / w;
            if (!chosen || key < best_key) {
                chosen = &node->children[c];
                chosen_path = key_path;
                best_key = key;
            }
        }
        node = chosen;
        path = chosen_path;
    }
    return *node->leaf;
}

double collision_estimate(const SparseVector& x, const SparseVector& y, Seed base, std::size_t n) {
    if (n == 0) throw InvalidInput("collision_estimate needs n >= 1");
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const Seed s = derive_seed(base, j);
        hits += pminhash(x, s) == pminhash(y, s);
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

} // namespace jpminhash
