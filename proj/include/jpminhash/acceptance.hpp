#ifndef JPMINHASH_ACCEPTANCE_HPP
#define JPMINHASH_ACCEPTANCE_HPP

#include "jpminhash/retrieval.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace jpminhash {

// ---------------------------------------------------------------------------
// JSD against total variation

/// Counts from a brute-force sweep over two-element distribution pairs of the
/// two possible orderings of d(tv) and JSD (JSD <= tv is counted as well).
struct JsdDirectionCheck {
    std::size_t pairs = 0;
    std::size_t d_below_jsd_violations = 0; // d(tv) <= jsd fails
    std::size_t d_above_jsd_violations = 0; // d(tv) >= jsd fails
    std::size_t jsd_below_tv_violations = 0; // jsd <= tv fails
    std::size_t jsd_above_tv_violations = 0; // jsd >= tv fails

    /// d(tv) <= jsd <= tv held everywhere.
    bool lower_d_upper_tv() const noexcept {
        return d_below_jsd_violations == 0 && jsd_below_tv_violations == 0;
    }
};

JsdDirectionCheck check_jsd_direction(std::size_t steps);

/// Fractions of pairs violating each curve, with p_w = (1-jw)/(1+jw) = tv.
struct JsdViolations {
    std::size_t pairs = 0;
    double jw_lower = 0.0;        // jsd < d(p_w)
    double jw_upper = 0.0;        // jsd > p_w
    double jp_upper = 0.0;        // jsd > 1 - jp
    double jp_approx_lower = 0.0; // jsd < d(1 - jp)
};

JsdViolations jsd_violations(const PairSample& pairs, double slack = 1e-12);

/// CSV: idA,idB,jp,jw,jsd,d_jw,d_jp with d_jw = d((1-jw)/(1+jw)), d_jp = d(1-jp).
void write_jsd_scatter(std::ostream& out, const PairSample& pairs);

// ---------------------------------------------------------------------------
// Acceptance suite

struct CriterionResult {
    int number = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    /// Where to write the scatter/curve exports; nothing is written when unset.
    std::optional<std::filesystem::path> report_dir;
    /// Progress lines (one per criterion as it finishes).
    std::ostream* progress = nullptr;
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// Fixed-width pass/fail table.
void print_results(std::ostream& out, const std::vector<CriterionResult>& results);

} // namespace jpminhash

#endif
