#pragma once

// Eigenvalue estimation for a hidden linear system from bandit rewards.
//
// After waiting N steps the estimator pulls d random unit arms on a fixed
// schedule for 2 N d^2 steps. Every reward lands in exactly one entry of two
// d x d matrices A_0(N), A_1(N) as a quadratic-phase (Weyl) weighted average;
// the output A_1(N) pinv(trunc_gamma(A_0(N))) carries the unit-circle part of
// the spectrum of M^d.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "dynspec/envs.hpp"
#include "dynspec/linalg.hpp"
#include "dynspec/numerics.hpp"

namespace dynspec {

struct EigenConfig {
    std::int64_t N = 9216;   // effective sample size
    std::int64_t L = 24;     // nearly-period length in the Weyl phase
    std::int64_t d = 5;
    double delta = 0.2;
    double R = 0.3;          // noise proxy
    double Delta = 0.1;      // spectral gap below the unit circle
    double kappa = 6.0;      // Jordan-basis conditioning
    double B = 1.0;          // trajectory ball radius
    std::uint64_t seed = 0;  // arm draws
    bool allow_undersized = false;  // skip the lower bound on N (ablations)

    void validate() const;
};

/// ceil(max{16 L^2, (-(d-1) log Delta + log(B kappa^2) + d + 6)/Delta + d}).
std::int64_t min_effective_N(std::int64_t L, std::int64_t d, double Delta, double B, double kappa);

/// (sqrt(4 d^2 R^2 log(4 d^2 / delta)) + 1) / sqrt(N).
double svd_threshold(std::int64_t N, std::int64_t d, double R, double delta);

/// Arm index in [1, d] used at global time t in [N+1, N + 2 N d^2].
std::int64_t arm_schedule(std::int64_t t, std::int64_t N, std::int64_t d);

/// Coordinates of one summand: entry (k, ell) of A_s, Weyl index j.
struct RewardSlot {
    std::int64_t k;    // 1-based row, also the arm
    std::int64_t ell;  // 1-based column
    std::int64_t s;    // 0 or 1
    std::int64_t j;    // 0..N-1

    friend bool operator==(const RewardSlot&, const RewardSlot&) = default;
};

/// 2(k-1)d + s d + 2 d^2 j + N + ell.
std::int64_t reward_time(const RewardSlot& slot, std::int64_t N, std::int64_t d);

/// Inverse of reward_time on [N+1, N(2d^2+1)].
RewardSlot decode_reward_time(std::int64_t t, std::int64_t N, std::int64_t d);

/// Rewards for consecutive global times starting at first_time.
struct RewardBuffer {
    std::int64_t first_time = 1;
    std::vector<double> rewards;

    /// Throws DataError for a time outside the buffer.
    double at(std::int64_t t) const;
};

struct WeylMatrices {
    ComplexMatrix A0;
    ComplexMatrix A1;
};

/// Builds A_0(N), A_1(N) (normalized by 1/N) from a buffer covering global
/// times N+1 .. N(2d^2+1).
WeylMatrices build_A_matrices(const RewardBuffer& buffer, std::int64_t N, std::int64_t d, std::int64_t L);

/// Streaming form of build_A_matrices: feed rewards in time order.
class WeylAccumulator {
public:
    WeylAccumulator(std::int64_t N, std::int64_t d, std::int64_t L);

    void add(std::int64_t t, double reward);
    WeylMatrices result() const;

private:
    std::int64_t N_, d_, L_;
    std::vector<Complex> phases_;      // indexed by j mod 4L
    std::vector<CompensatedSum> sums_; // [s][k][ell]
};

struct EigenEstimate {
    ComplexMatrix output_matrix;              // A_1 pinv(trunc(A_0))
    std::vector<std::complex<double>> spectrum;  // |lambda| < gamma reported as 0
    double gamma_used = 0.0;
    std::int64_t pulls_used = 0;
    std::int64_t N = 0;
    WeylMatrices weyl;
    std::vector<RealVector> arms;
    int arm_redraws = 0;
};

/// Runs the estimator against env (dimension cfg.d). Throws ConfigError when
/// N is below min_effective_N and allow_undersized is off.
EigenEstimate estimate_eigen_map(BanditEnvironment& env, const EigenConfig& cfg,
                                 std::vector<RewardRecord>* rewards = nullptr);

/// Smallest m > 0 with m * dim = 1 mod L; ConfigError if gcd(dim, L) != 1.
std::int64_t reconstruction_power(std::int64_t dim, std::int64_t L);

struct Reconstruction {
    std::vector<std::complex<double>> eigenvalues;
    std::int64_t power = 1;
    EigenEstimate estimate;
};

/// env must expose the system padded with r_pad zero coordinates (see
/// pad_linear_system); cfg.d is the unpadded dimension. Estimates in
/// dimension d + r_pad, raises the output to the reconstruction power and
/// returns the eigenvalues with magnitude at least gamma.
Reconstruction reconstruct_unit_eigenvalues(BanditEnvironment& env, const EigenConfig& cfg,
                                            std::int64_t r_pad);

}  // namespace dynspec
