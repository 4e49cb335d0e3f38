#pragma once

// Aliquot-nearly-period estimation from bandit rewards: sweep an orthonormal
// basis, buffer T_p rewards per arm, and grow a divisor estimate beta from the
// frequencies alpha/ell whose exponential sums clear the threshold eps.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynspec/envs.hpp"
#include "dynspec/linalg.hpp"
#include "dynspec/numerics.hpp"

namespace dynspec {

struct PeriodConfig {
    double rho = 0.98;       // accuracy
    double delta = 0.2;      // failure probability
    std::int64_t L_max = 10; // largest admissible period
    double r_margin = 0.0;   // assumes r_margin * eps >= mu
    std::int64_t d = 5;
    double R = 0.3;          // noise proxy
    double B = 2.2360679774997896;  // trajectory ball radius
    std::optional<std::int64_t> budget;  // pull budget for a whole run

    /// Throws ConfigError when a field is outside its admissible range.
    void validate() const;
};

/// rho / (6 sqrt(d) L_max).
double threshold_eps(const PeriodConfig& cfg);

/// ceil(72 d A L_max^2 / (rho^2 (1-r)^2) + 108 B sqrt(d) L_max^3 / (rho (1-r)))
/// with A = R^2 log(4 d L_max^2 log(L_max) / delta).
std::int64_t required_samples(const PeriodConfig& cfg);

/// 1 / (1 + sqrt(4 L_max + 1)); the scale linking eps to the window deviation.
double window_gamma(std::int64_t L_max);

/// One exponential-sum test of the divisor search.
struct FrequencyTest {
    std::int64_t beta;   // stride in force when the test ran
    std::int64_t offset; // s
    std::int64_t numerator;
    std::int64_t denominator;  // ell
    double magnitude;    // |R|
    bool hit;
};

struct PeriodEstimate {
    std::int64_t beta = 1;
    std::vector<std::vector<FrequencyTest>> per_dimension_log;
    std::vector<std::int64_t> hit_factors;  // ell values that multiplied beta, in order
    std::int64_t total_pulls = 0;
    std::int64_t samples_per_dimension = 0;  // T_p
    double eps = 0.0;
};

/// Runs the divisor search on one dimension's buffered rewards, updating
/// beta in place. Only candidates with ell * beta <= L_max are tested;
/// enumeration is s ascending, then alpha ascending, and the first hit wins.
void divisor_search(std::span<const double> rewards, std::int64_t L_max, double eps,
                    std::int64_t& beta, std::vector<FrequencyTest>& log,
                    std::vector<std::int64_t>& hit_factors);

/// Full estimator. `basis` defaults to the standard basis of R^d; `rewards`
/// optionally receives every pull as (t, arm index, reward).
PeriodEstimate estimate_period(BanditEnvironment& env, const PeriodConfig& cfg,
                               std::span<const RealVector> basis = {},
                               std::vector<RewardRecord>* rewards = nullptr);

/// True iff ell | L and every pair y_s, y_{s + ell t} inside the trajectory is
/// closer than rho + 2 lambda mu (equal, when that radius is 0).
bool is_aliquot_nearly_period(std::span<const RealVector> trajectory, std::int64_t ell, double rho,
                              double lambda, double mu, std::int64_t L);

}  // namespace dynspec
