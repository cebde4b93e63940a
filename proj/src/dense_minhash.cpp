#include "jpminhash/dense_minhash.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace jpminhash {

namespace {

constexpr std::uint64_t kPointStreamSalt = 0x517CC1B727220A95ULL;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_mass(double m) {
    if (!std::isfinite(m) || m < 0.0) throw InvalidInput("masses must be finite and nonnegative");
}

std::vector<double> merged_breakpoints(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

FiniteMeasure::FiniteMeasure(std::vector<double> masses) : masses_(std::move(masses)) {
    for (double m : masses_) {
        check_mass(m);
        total_ += m;
    }
    if (!(total_ > 0.0)) throw InvalidInput("degenerate distribution");
}

FiniteMeasure FiniteMeasure::uniform(std::size_t n) {
    return FiniteMeasure(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

PiecewiseDensity::PiecewiseDensity(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() < 2 || breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0) {
        throw InvalidInput("breakpoints must start at 0 and end at 1");
    }
    if (values_.size() + 1 != breakpoints_.size()) {
        throw InvalidInput("need exactly one value per piece");
    }
    cumulative_.assign(values_.size() + 1, 0.0);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!(breakpoints_[k + 1] > breakpoints_[k])) {
            throw InvalidInput("breakpoints must be strictly increasing");
        }
        check_mass(values_[k]);
        cumulative_[k + 1] = cumulative_[k] + piece_mass(k);
    }
    total_ = cumulative_.back();
    if (!(total_ > 0.0)) throw InvalidInput("degenerate distribution");
}

PiecewiseDensity PiecewiseDensity::uniform() { return PiecewiseDensity({0.0, 1.0}, {1.0}); }

double PiecewiseDensity::density(double t) const noexcept {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    std::size_t k = it == breakpoints_.begin() ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    return values_[std::min(k, values_.size() - 1)];
}

double PiecewiseDensity::piece_mass(std::size_t k) const noexcept {
    return values_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
}

double PiecewiseDensity::inverse_cdf(double u) const noexcept {
    const double target = u * total_;
    auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), target);
    std::size_t k = it == cumulative_.end() ? values_.size() - 1
                                            : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
    while (values_[k] == 0.0 && k + 1 < values_.size()) ++k;
    while (values_[k] == 0.0 && k > 0) --k;
    const double lo = breakpoints_[k];
    const double hi = breakpoints_[k + 1];
    double t = lo + (target - cumulative_[k]) / values_[k];
    if (t >= hi) t = std::nextafter(hi, lo);
    return std::max(t, lo);
}

PiecewiseDensity PiecewiseDensity::refined(std::span<const double> extra) const {
    std::vector<double> sorted(extra.begin(), extra.end());
    std::erase_if(sorted, [](double t) { return !(t > 0.0 && t < 1.0); });
    std::sort(sorted.begin(), sorted.end());
    auto bps = merged_breakpoints(breakpoints_, sorted);
    std::vector<double> vals;
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) vals.push_back(density(bps[k]));
    return PiecewiseDensity(std::move(bps), std::move(vals));
}

double global_bound(const FiniteMeasure& mu, const FiniteMeasure& lambda) {
    if (mu.size() != lambda.size()) throw InvalidInput("measure and proposal sizes differ");
    double bound = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] == 0.0) continue;
        if (lambda[i] == 0.0) throw InvalidInput("unbounded ratio");
        bound = std::max(bound, mu[i] / lambda[i]);
    }
    return bound;
}

double global_bound(const PiecewiseDensity& mu, const PiecewiseDensity& lambda) {
    const auto bps = merged_breakpoints(mu.breakpoints(), lambda.breakpoints());
    double bound = 0.0;
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
        const double m = mu.density(bps[k]);
        if (m == 0.0) continue;
        const double l = lambda.density(bps[k]);
        if (l == 0.0) throw InvalidInput("unbounded ratio");
        bound = std::max(bound, m / l);
    }
    return bound;
}

std::pair<SparseVector, SparseVector> common_refinement_masses(const PiecewiseDensity& mu,
                                                               const PiecewiseDensity& nu) {
    const auto bps = merged_breakpoints(mu.breakpoints(), nu.breakpoints());
    std::vector<double> a, b;
    for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
        const double width = bps[k + 1] - bps[k];
        a.push_back(mu.density(bps[k]) * width);
        b.push_back(nu.density(bps[k]) * width);
    }
    return {SparseVector::from_dense(a), SparseVector::from_dense(b)};
}

DiscreteProposalStream::DiscreteProposalStream(const FiniteMeasure& lambda, Seed seed) {
    std::vector<Key> keys;
    keys.reserve(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] == 0.0) continue;
        const double e = -std::log(uniform_hash(i, seed));
        keys.push_back({e / lambda[i], i, e});
    }
    heap_ = decltype(heap_)(std::greater<Key>{}, std::move(keys));
}

StreamItem DiscreteProposalStream::next() {
    const Key k = heap_.top();
    heap_.pop();
    return {k.index, static_cast<double>(k.index), k.arrival, k.unit_exponential};
}

ContinuousProposalStream::ContinuousProposalStream(const PiecewiseDensity& lambda, Seed seed)
    : lambda_(lambda), seed_(seed) {}

StreamItem ContinuousProposalStream::next() {
    const double e = -std::log(uniform_hash(k_, seed_));
    arrival_ += e / lambda_.total();
    const double point = lambda_.inverse_cdf(uniform_hash(k_ ^ kPointStreamSalt, seed_));
    StreamItem item{static_cast<std::size_t>(k_), point, arrival_, e};
    ++k_;
    return item;
}

AStarResult astar_pminhash(const FiniteMeasure& mu, const FiniteMeasure& lambda, Seed seed,
                           AStarOptions options) {
    const double bound = global_bound(mu, lambda);
    DiscreteProposalStream stream(lambda, seed);
    AStarResult result{0, 0.0, kInf, 0};
    bool found = false;
    while (!stream.done()) {
        const StreamItem item = stream.next();
        ++result.iterations;
        // e_k * lambda/mu reduces to -ln(u)/mu; computed that way it is
        // bit-identical to the sparse sampler's key.
        const double m = mu[item.index];
        if (m > 0.0) {
            const double key = item.unit_exponential / m;
            if (!found || key < result.best_key ||
                (key == result.best_key && item.index < result.sample)) {
                result.sample = item.index;
                result.best_key = key;
                found = true;
            }
        }
        if (options.early_stop && found && result.best_key <= item.arrival / bound) break;
    }
    result.point = static_cast<double>(result.sample);
    return result;
}

AStarResult astar_pminhash(const PiecewiseDensity& mu, const PiecewiseDensity& lambda, Seed seed,
                           AStarOptions options) {
    const double bound = global_bound(mu, lambda);
    ContinuousProposalStream stream(lambda, seed);
    AStarResult result{0, 0.0, kInf, 0};
    while (true) {
        if (result.iterations >= options.max_iterations) {
            throw std::runtime_error("A* sampling exceeded " +
                                     std::to_string(options.max_iterations) + " iterations");
        }
        const StreamItem item = stream.next();
        ++result.iterations;
        const double m = mu.density(item.point);
        if (m > 0.0) {
            const double key = item.arrival * lambda.density(item.point) / m;
            if (key < result.best_key) {
                result.sample = item.index;
                result.point = item.point;
                result.best_key = key;
            }
        }
        if (result.best_key <= item.arrival / bound) break;
    }
    return result;
}

double astar_collision(const FiniteMeasure& mu, const FiniteMeasure& nu,
                       const FiniteMeasure& lambda, Seed base, std::size_t n) {
    if (n == 0) throw InvalidInput("astar_collision needs n >= 1");
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const Seed s = derive_seed(base, j);
        hits += astar_pminhash(mu, lambda, s).sample == astar_pminhash(nu, lambda, s).sample;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

double astar_collision(const PiecewiseDensity& mu, const PiecewiseDensity& nu,
                       const PiecewiseDensity& lambda, Seed base, std::size_t n) {
    if (n == 0) throw InvalidInput("astar_collision needs n >= 1");
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const Seed s = derive_seed(base, j);
        hits += astar_pminhash(mu, lambda, s).point == astar_pminhash(nu, lambda, s).point;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

} // namespace jpminhash
