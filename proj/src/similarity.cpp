#include "jpminhash/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace jpminhash {

namespace {

struct UnionEntry {
    ElementId id;
    double x;
    double y;
};

std::vector<UnionEntry> merge_supports(const SparseVector& x, const SparseVector& y) {
    std::vector<UnionEntry> out;
    out.reserve(x.size() + y.size());
    auto xs = x.entries();
    auto ys = y.entries();
    std::size_t i = 0, j = 0;
    while (i < xs.size() || j < ys.size()) {
        if (j == ys.size() || (i < xs.size() && xs[i].id < ys[j].id)) {
            out.push_back({xs[i].id, xs[i].mass, 0.0});
            ++i;
        } else if (i == xs.size() || ys[j].id < xs[i].id) {
            out.push_back({ys[j].id, 0.0, ys[j].mass});
            ++j;
        } else {
            out.push_back({xs[i].id, xs[i].mass, ys[j].mass});
            ++i;
            ++j;
        }
    }
    return out;
}

double xlog2x_over(double a, double b) { return a > 0.0 ? a * std::log2(a / b) : 0.0; }

// Terms for every element of the intersection, in descending x/y order.
std::vector<JpTerm> sorted_terms(const SparseVector& x, const SparseVector& y) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    struct Keyed {
        double ratio;
        UnionEntry e;
    };
    std::vector<Keyed> keyed;
    for (const auto& e : merge_supports(x, y)) {
        double ratio = e.y == 0.0 ? inf : e.x / e.y;
        keyed.push_back({ratio, e});
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        return a.e.id < b.e.id;
    });

    // sum_j max(x_j, r*y_j) = sum_{rank(j) <= rank(i)} x_j + r * sum_{rank(j) > rank(i)} y_j
    const std::size_t n = keyed.size();
    std::vector<double> suffix_y(n + 1, 0.0);
    for (std::size_t k = n; k-- > 0;) suffix_y[k] = suffix_y[k + 1] + keyed[k].e.y;

    std::vector<JpTerm> terms;
    double prefix_x = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& e = keyed[k].e;
        prefix_x += e.x;
        if (e.x > 0.0 && e.y > 0.0) {
            const double denom = prefix_x + keyed[k].ratio * suffix_y[k + 1];
            terms.push_back({e.id, e.x / denom});
        }
    }
    return terms;
}

} // namespace

double PerTermDecomposition::sum() const noexcept {
    double s = 0.0;
    for (const auto& t : terms) s += t.value;
    return s;
}

double jp_naive(const SparseDistribution& x, const SparseDistribution& y) {
    const auto u = merge_supports(x, y);
    double result = 0.0;
    for (const auto& i : u) {
        if (i.x == 0.0 || i.y == 0.0) continue;
        double denom = 0.0;
        for (const auto& j : u) denom += std::max(j.x / i.x, j.y / i.y);
        result += 1.0 / denom;
    }
    return result;
}

double jp(const SparseDistribution& x, const SparseDistribution& y) {
    double s = 0.0;
    for (const auto& t : sorted_terms(x, y)) s += t.value;
    return s;
}

PerTermDecomposition jp_terms(const SparseDistribution& x, const SparseDistribution& y) {
    PerTermDecomposition d{sorted_terms(x, y)};
    std::sort(d.terms.begin(), d.terms.end(),
              [](const JpTerm& a, const JpTerm& b) { return a.id < b.id; });
    return d;
}

double jw(const SparseVector& x, const SparseVector& y) {
    if (x.empty() && y.empty()) throw InvalidInput("jw of two empty vectors");
    double num = 0.0, den = 0.0;
    for (const auto& e : merge_supports(x, y)) {
        num += std::min(e.x, e.y);
        den += std::max(e.x, e.y);
    }
    return num / den;
}

double support_jaccard(const SparseVector& x, const SparseVector& y) {
    if (x.empty() && y.empty()) throw InvalidInput("support_jaccard of two empty vectors");
    std::size_t inter = 0, uni = 0;
    for (const auto& e : merge_supports(x, y)) {
        ++uni;
        if (e.x > 0.0 && e.y > 0.0) ++inter;
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double total_variation(const SparseDistribution& x, const SparseDistribution& y) {
    double l1 = 0.0;
    for (const auto& e : merge_supports(x, y)) l1 += std::abs(e.x - e.y);
    return 0.5 * l1;
}

double jsd(const SparseDistribution& x, const SparseDistribution& y) {
    double s = 0.0;
    for (const auto& e : merge_supports(x, y)) {
        const double m = 0.5 * (e.x + e.y);
        s += 0.5 * xlog2x_over(e.x, m) + 0.5 * xlog2x_over(e.y, m);
    }
    return std::clamp(s, 0.0, 1.0);
}

SimilarityReport similarity_report(const SparseDistribution& x, const SparseDistribution& y) {
    return {jp(x, y), jw(x, y), support_jaccard(x, y), total_variation(x, y), jsd(x, y)};
}

BoundCurves bound_curves(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("p must lie in [0,1]");
    auto half_xlog2x = [](double v) { return v > 0.0 ? 0.5 * v * std::log2(v) : 0.0; };
    return {half_xlog2x(1.0 - p) + half_xlog2x(1.0 + p), (1.0 - p) / (1.0 + p), 1.0 - p};
}

std::pair<SparseDistribution, SparseDistribution>
construct_lower_pair(const SparseDistribution& x, const SparseDistribution& y) {
    std::vector<Entry> xs, ys;
    ElementId i = 0;
    for (const auto& e : merge_supports(x, y)) {
        const double shared = std::min(e.x, e.y);
        xs.push_back({2 * i, shared});
        ys.push_back({2 * i, shared});
        xs.push_back({2 * i + 1, std::max(e.x - e.y, 0.0)});
        ys.push_back({2 * i + 1, std::max(e.y - e.x, 0.0)});
        ++i;
    }
    return {make_distribution(std::move(xs)), make_distribution(std::move(ys))};
}

std::pair<SparseDistribution, SparseDistribution>
construct_upper_pair(const SparseVector& shared, double p, const Partition& split) {
    if (!(p >= 0.0 && p < 1.0)) throw InvalidInput("p must lie in [0,1)");
    if (split.groups.size() != 2) throw InvalidInput("split must have exactly two groups");
    if (std::abs(shared.total() - (1.0 - p)) > 1e-9) {
        throw InvalidInput("shared masses must sum to 1-p");
    }

    std::unordered_map<ElementId, int> side;
    std::size_t covered = 0;
    for (int g = 0; g < 2; ++g) {
        if (split.groups[g].empty()) throw InvalidInput("empty group in split");
        for (ElementId id : split.groups[g]) {
            if (!side.emplace(id, g).second) throw InvalidInput("split groups overlap");
            if (!shared.contains(id)) {
                throw InvalidInput("split element " + std::to_string(id) + " has no shared mass");
            }
            ++covered;
        }
    }
    if (covered != shared.size()) throw InvalidInput("split does not cover the shared support");

    double group_mass[2] = {0.0, 0.0};
    for (const auto& e : shared.entries()) group_mass[side.at(e.id)] += e.mass;

    std::vector<Entry> xs, ys;
    for (const auto& e : shared.entries()) {
        const int g = side.at(e.id);
        const double boosted = e.mass + e.mass * p / group_mass[g];
        xs.push_back({e.id, g == 0 ? boosted : e.mass});
        ys.push_back({e.id, g == 1 ? boosted : e.mass});
    }
    return {make_distribution(std::move(xs)), make_distribution(std::move(ys))};
}

SparseDistribution adversarial_z(const SparseDistribution& x, const SparseDistribution& y,
                                 ElementId a) {
    const double xa = x.mass(a);
    const double ya = y.mass(a);
    if (xa == 0.0 || ya == 0.0) {
        throw InvalidInput("element " + std::to_string(a) + " is not in both supports");
    }
    std::vector<Entry> zs;
    for (const auto& e : merge_supports(x, y)) {
        zs.push_back({e.id, std::max(e.x / xa, e.y / ya)});
    }
    return make_distribution(std::move(zs));
}

SparseDistribution coarsen(const SparseDistribution& x, const Partition& f) {
    std::unordered_map<ElementId, std::size_t> group_of;
    for (std::size_t g = 0; g < f.groups.size(); ++g) {
        for (ElementId id : f.groups[g]) {
            if (!group_of.emplace(id, g).second) {
                throw InvalidInput("element " + std::to_string(id) + " appears in two groups");
            }
        }
    }
    std::vector<double> masses(f.groups.size(), 0.0);
    for (const auto& e : x.entries()) {
        auto it = group_of.find(e.id);
        if (it == group_of.end()) {
            throw InvalidInput("element " + std::to_string(e.id) + " not covered by partition");
        }
        masses[it->second] += e.mass;
    }
    return normalize(SparseVector::from_dense(masses));
}

} // namespace jpminhash
