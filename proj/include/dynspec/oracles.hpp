#pragma once

// Independent closed-form routes used to check the estimators. None of these
// touch reward buffers or the reward-index schedule.

#include <cstdint>
#include <span>
#include <vector>

#include "dynspec/linalg.hpp"

namespace dynspec::oracles {

/// X W((M^{2 d^2 j})_{j<N}) M^{s d + N - 1} K with
/// X rows x_k^T M^{2(k-1)d+1} and K = (theta, M theta, ..., M^{d-1} theta).
/// K starts at theta because the first pull observes the initial state.
ComplexMatrix structured_weyl_matrix(const RealMatrix& M, const RealVector& theta,
                                     std::span<const RealVector> arms, std::int64_t N,
                                     std::int64_t L, std::int64_t s);

/// The matrix the estimator converges to: Y diag(alpha^d) pinv(Y), where
/// Y has columns X(M_1) theta_alpha over the unit-modulus eigenvalues alpha
/// with a nonzero theta component.
ComplexMatrix target_matrix(const RealMatrix& M, const RealVector& theta,
                            std::span<const RealVector> arms);

/// Noiseless reward stream r_t = x_t^T M^{t-1} theta for an arm sequence.
std::vector<double> noiseless_rewards(const RealMatrix& M, const RealVector& theta,
                                      std::span<const RealVector> arm_sequence);

}  // namespace dynspec::oracles
