#pragma once
// Nonparametric comparison of parameter settings over benchmark functions:
// Friedman test on per-function ranks, Hochberg step-up post-hoc against the
// best-ranked control, and cumulative success-rate curves.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "ssa/core.hpp"

namespace ssa::stats {

// Ranks of k treatments (settings) within each of N blocks (functions).
struct RankTable {
    std::size_t blocks = 0;
    std::size_t treatments = 0;
    std::vector<double> ranks;  // row-major, blocks x treatments

    double at(std::size_t block, std::size_t treatment) const { return ranks[block * treatments + treatment]; }
    std::span<const double> row(std::size_t block) const {
        return std::span<const double>(ranks).subspan(block * treatments, treatments);
    }
    std::vector<double> mean_ranks() const;
};

// Ascending mid-ranks (1 = smallest); tied values share their average rank.
std::vector<double> midranks(std::span<const double> values);

// scores[block][treatment], smaller is better. Throws ArgumentError on ragged
// rows or NaN (missing) cells.
RankTable rank_settings(const std::vector<std::vector<double>>& scores);

struct FriedmanResult {
    double statistic = 0.0;
    double degrees_of_freedom = 0.0;
    double p_value = 1.0;
    std::vector<double> mean_ranks;
    std::size_t blocks = 0;
    std::size_t treatments = 0;
};

// 12N/(k(k+1)) * (sum_j Rbar_j^2 - k(k+1)^2/4), chi-square with k-1 dof.
// Requires N >= 2 and k >= 2 (ArgumentError otherwise).
FriedmanResult friedman_test(const RankTable& table);

// Regularized upper incomplete gamma Q(a, x), series for x < a + 1 and a
// Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);
double chi_square_upper_tail(double x, double dof);
double normal_upper_tail(double z);

// Hochberg step-up: with p-values in ascending order, find the largest i with
// p_(i) <= alpha / (m - i + 1) and reject hypotheses (1..i). The result is in
// the caller's original order.
std::vector<bool> hochberg_step_up(std::span<const double> p_values, double alpha);

inline constexpr double kDefaultAlpha = 0.05;

struct PosthocResult {
    double alpha = kDefaultAlpha;
    bool friedman_rejected = false;
    std::size_t control = 0;
    // Indexed by treatment; the control's own entries are z = 0, p = 1.
    std::vector<double> z;
    std::vector<double> p_raw;
    std::vector<bool> rejected;
    // Control plus every treatment not rejected, ascending.
    std::vector<std::size_t> accepted;
};

// One-sided comparisons of every treatment against the best mean rank.
// When the Friedman null is not rejected at alpha nothing is rejected and
// friedman_rejected is false. Throws ConfigError for alpha outside (0, 1).
PosthocResult hochberg_posthoc(const FriedmanResult& result, double alpha = kDefaultAlpha);

inline constexpr double kDefaultSuccessThreshold = 1e-8;

struct SuccessCurve {
    double threshold = kDefaultSuccessThreshold;
    std::size_t runs = 0;
    std::vector<std::uint64_t> fes;
    std::vector<double> rate;
};

// Fraction of runs whose best-so-far fitness is below `threshold` at each
// checkpoint. Throws ArgumentError if traces use different checkpoint grids
// or a trace is not monotone non-increasing.
SuccessCurve success_curve(std::span<const std::span<const Checkpoint>> traces,
                           double threshold = kDefaultSuccessThreshold);

bool is_monotone_non_decreasing(std::span<const double> values);

// Table keyed by (p_m, p_c, r_a) listing the accepted population sizes.
struct SensitivityTable {
    std::vector<double> p_ms;
    std::vector<double> p_cs;
    std::vector<double> r_as;
    std::map<std::tuple<double, double, double>, std::vector<int>> cells;

    // "20/30/40", or "-" when the cell is empty.
    std::string label(double p_m, double p_c, double r_a) const;
    std::size_t labeled_cells() const;
};

// `settings[j]` are the parameters of treatment j.
SensitivityTable sensitivity_table(const PosthocResult& posthoc, std::span<const SsaParams> settings);

}  // namespace ssa::stats
