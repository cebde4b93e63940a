#ifndef JPMINHASH_RANDOM_HPP
#define JPMINHASH_RANDOM_HPP

#include "jpminhash/hashing.hpp"
#include "jpminhash/sparse_vector.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace jpminhash {

/// std::mt19937_64 with explicit, platform-independent transforms (the
/// standard distributions are not reproducible across library vendors).
class Rng {
public:
    explicit Rng(Seed seed) : engine_(seed.value) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform in (0, 1].
    double uniform_open_closed() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Standard exponential, strictly positive except on a 2^-53 event.
    double exponential() { return -std::log(uniform_open_closed()); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Uniform in [0, n). Multiply-shift; bias is below 2^-40 for n < 2^24.
    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(engine_()) * n) >> 64);
    }

private:
    std::mt19937_64 engine_;
};

/// Exponential masses raised to `skew` on the given support.
inline SparseDistribution random_distribution(Rng& rng, std::span<const ElementId> support,
                                              double skew = 1.0) {
    std::vector<Entry> entries;
    entries.reserve(support.size());
    for (ElementId id : support) entries.push_back({id, std::pow(rng.exponential(), skew)});
    return make_distribution(std::move(entries));
}

/// Two distributions with support sizes in [1, max_support] and a random
/// overlap fraction; masses are exponential raised to a skew in {1, 2, 4}.
inline std::pair<SparseDistribution, SparseDistribution> random_pair(Rng& rng,
                                                                     std::size_t max_support) {
    const std::size_t sx = 1 + rng.below(max_support);
    const std::size_t sy = 1 + rng.below(max_support);
    const std::size_t shared = static_cast<std::size_t>(
        std::lround(rng.uniform() * static_cast<double>(std::min(sx, sy))));
    std::vector<ElementId> xs, ys;
    for (std::size_t i = 0; i < shared; ++i) {
        xs.push_back(i);
        ys.push_back(i);
    }
    for (std::size_t i = shared; i < sx; ++i) xs.push_back(i);
    for (std::size_t i = 0; i < sy - shared; ++i) ys.push_back(sx + i);
    const double skew = static_cast<double>(1u << rng.below(3));
    return {random_distribution(rng, xs, skew), random_distribution(rng, ys, skew)};
}

} // namespace jpminhash

#endif
