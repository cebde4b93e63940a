#ifndef JPMINHASH_DENSE_MINHASH_HPP
#define JPMINHASH_DENSE_MINHASH_HPP

#include "jpminhash/hashing.hpp"
#include "jpminhash/sparse_vector.hpp"

#include <cstddef>
#include <queue>
#include <span>
#include <utility>
#include <vector>

namespace jpminhash {

// Global-bound A* sampling run with a fixed seed. Both the finite case (dense
// mass vectors, element id = index) and piecewise-constant densities on [0,1)
// are supported.

/// Dense nonnegative masses indexed by element id.
class FiniteMeasure {
public:
    explicit FiniteMeasure(std::vector<double> masses);

    static FiniteMeasure uniform(std::size_t n);

    std::span<const double> masses() const noexcept { return masses_; }
    std::size_t size() const noexcept { return masses_.size(); }
    double total() const noexcept { return total_; }
    double operator[](std::size_t i) const noexcept { return masses_[i]; }

    SparseVector to_sparse() const { return SparseVector::from_dense(masses_); }

private:
    std::vector<double> masses_;
    double total_ = 0.0;
};

/// Density on [0,1) that is constant on [breakpoints[k], breakpoints[k+1]).
class PiecewiseDensity {
public:
    PiecewiseDensity(std::vector<double> breakpoints, std::vector<double> values);

    static PiecewiseDensity uniform();

    std::span<const double> breakpoints() const noexcept { return breakpoints_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t pieces() const noexcept { return values_.size(); }
    double total() const noexcept { return total_; }

    /// Density at t in [0,1).
    double density(double t) const noexcept;
    /// Mass of piece k.
    double piece_mass(std::size_t k) const noexcept;
    /// Point with CDF value u * total(), u in (0,1]. Always < 1.
    double inverse_cdf(double u) const noexcept;

    /// Same density on a finer set of breakpoints (union with `extra`).
    PiecewiseDensity refined(std::span<const double> extra) const;

private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
    std::vector<double> cumulative_; // cumulative_[k] = mass of pieces < k
    double total_ = 0.0;
};

/// max over the support of mu of mu/lambda. Throws InvalidInput("unbounded
/// ratio") when lambda vanishes where mu does not.
double global_bound(const FiniteMeasure& mu, const FiniteMeasure& lambda);
double global_bound(const PiecewiseDensity& mu, const PiecewiseDensity& lambda);

/// Per-piece masses of mu and nu over the union of their breakpoints.
std::pair<SparseVector, SparseVector> common_refinement_masses(const PiecewiseDensity& mu,
                                                               const PiecewiseDensity& nu);

/// One element of the proposal stream.
struct StreamItem {
    std::size_t index;      // element id (finite case) or position k (continuous case)
    double point;           // sampled point (continuous case); index as double otherwise
    double arrival;         // e_k, non-decreasing along the stream
    double unit_exponential; // -ln(u) behind the arrival (finite case)
};

/// Proposal stream for a finite lambda: every element with lambda_i > 0 gets
/// the key -ln(uniform_hash(i, seed)) / lambda_i and elements are emitted in
/// ascending key order (ties by index). Extraction is lazy (binary heap).
/// Depends only on (lambda, seed).
class DiscreteProposalStream {
public:
    DiscreteProposalStream(const FiniteMeasure& lambda, Seed seed);

    bool done() const noexcept { return heap_.empty(); }
    StreamItem next();

private:
    struct Key {
        double arrival;
        std::size_t index;
        double unit_exponential;
        bool operator>(const Key& o) const noexcept {
            return arrival != o.arrival ? arrival > o.arrival : index > o.index;
        }
    };
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap_;
};

/// Proposal stream for a piecewise lambda: arrivals are cumulative
/// exponentials of rate lambda(Omega) drawn from uniform_hash(k, seed); points
/// are drawn by inverse CDF from uniform_hash(k ^ 0x517CC1B727220A95, seed).
/// Unbounded.
class ContinuousProposalStream {
public:
    ContinuousProposalStream(const PiecewiseDensity& lambda, Seed seed);

    StreamItem next();

private:
    PiecewiseDensity lambda_;
    Seed seed_;
    std::uint64_t k_ = 0;
    double arrival_ = 0.0;
};

struct AStarResult {
    std::size_t sample = 0; // element id (finite case)
    double point = 0.0;     // sampled point (continuous case)
    double best_key = 0.0;  // M
    std::size_t iterations = 0;
};

struct AStarOptions {
    /// When false the finite stream is run to exhaustion (reference mode).
    bool early_stop = true;
    /// Guard for the unbounded continuous stream.
    std::size_t max_iterations = 100'000'000;
};

AStarResult astar_pminhash(const FiniteMeasure& mu, const FiniteMeasure& lambda, Seed seed,
                           AStarOptions options = {});
AStarResult astar_pminhash(const PiecewiseDensity& mu, const PiecewiseDensity& lambda, Seed seed,
                           AStarOptions options = {});

/// Fraction of seeds derive_seed(base, j), j < n, where mu and nu draw the same sample.
double astar_collision(const FiniteMeasure& mu, const FiniteMeasure& nu,
                       const FiniteMeasure& lambda, Seed base, std::size_t n);
double astar_collision(const PiecewiseDensity& mu, const PiecewiseDensity& nu,
                       const PiecewiseDensity& lambda, Seed base, std::size_t n);

} // namespace jpminhash

#endif
