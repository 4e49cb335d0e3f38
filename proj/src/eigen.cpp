#include "dynspec/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <tuple>

#include "dynspec/errors.hpp"

namespace dynspec {
namespace {

constexpr int kMaxArmRedraws = 16;

std::vector<Complex> quadratic_phase_table(std::int64_t L) {
    std::vector<Complex> table(static_cast<std::size_t>(4 * L));
    for (std::int64_t j = 0; j < 4 * L; ++j) table[static_cast<std::size_t>(j)] = quadratic_phase(j, L);
    return table;
}

std::vector<std::complex<double>> zero_filtered(std::vector<std::complex<double>> values, double floor) {
    for (auto& v : values)
        if (std::abs(v) < floor) v = 0.0;
    return values;
}

}  // namespace

void EigenConfig::validate() const {
    if (N < 1) throw ConfigError("eigen: N must be positive");
    if (L < 1) throw ConfigError("eigen: L must be positive");
    if (d < 1) throw ConfigError("eigen: d must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("eigen: delta must lie in (0,1)");
    if (!(R >= 0.0)) throw ConfigError("eigen: R must be nonnegative");
    if (!(Delta > 0.0 && Delta <= 1.0)) throw ConfigError("eigen: Delta must lie in (0,1]");
    if (!(kappa >= 1.0)) throw ConfigError("eigen: kappa must be at least 1");
    if (!(B > 0.0)) throw ConfigError("eigen: B must be positive");
}

std::int64_t min_effective_N(std::int64_t L, std::int64_t d, double Delta, double B, double kappa) {
    if (!(Delta > 0.0 && Delta <= 1.0)) throw DomainError("min_effective_N: Delta must lie in (0,1]");
    if (!(kappa >= 1.0)) throw DomainError("min_effective_N: kappa must be at least 1");
    if (!(B > 0.0)) throw DomainError("min_effective_N: B must be positive");
    if (L < 1 || d < 1) throw DomainError("min_effective_N: L and d must be positive");
    const double dd = static_cast<double>(d);
    const double weyl_term = 16.0 * static_cast<double>(L) * static_cast<double>(L);
    const double decay_term =
        -(dd - 1.0) * std::log(Delta) / Delta + (std::log(B * kappa * kappa) + dd + 6.0) / Delta + dd;
    return static_cast<std::int64_t>(std::ceil(std::max(weyl_term, decay_term)));
}

double svd_threshold(std::int64_t N, std::int64_t d, double R, double delta) {
    if (N < 1) throw DomainError("svd_threshold: N must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("svd_threshold: delta must lie in (0,1)");
    const double dd = static_cast<double>(d);
    return (std::sqrt(4.0 * dd * dd * R * R * std::log(4.0 * dd * dd / delta)) + 1.0) /
           std::sqrt(static_cast<double>(N));
}

std::int64_t arm_schedule(std::int64_t t, std::int64_t N, std::int64_t d) {
    const std::int64_t block = 2 * d * d;
    if (t < N + 1 || t > N + N * block)
        throw DomainError("arm_schedule: time " + std::to_string(t) + " outside the pull window");
    const std::int64_t m0 = (t - N - 1) % block + 1;
    return (m0 + 2 * d - 1) / (2 * d);
}

std::int64_t reward_time(const RewardSlot& slot, std::int64_t N, std::int64_t d) {
    return 2 * (slot.k - 1) * d + slot.s * d + 2 * d * d * slot.j + N + slot.ell;
}

RewardSlot decode_reward_time(std::int64_t t, std::int64_t N, std::int64_t d) {
    const std::int64_t block = 2 * d * d;
    if (t < N + 1 || t > N + N * block)
        throw DomainError("decode_reward_time: time " + std::to_string(t) + " outside the pull window");
    const std::int64_t u = t - N - 1;
    const std::int64_t j = u / block;
    const std::int64_t within = u % block;
    const std::int64_t k = within / (2 * d) + 1;
    const std::int64_t s = (within % (2 * d)) / d;
    const std::int64_t ell = within % d + 1;
    return {k, ell, s, j};
}

double RewardBuffer::at(std::int64_t t) const {
    const std::int64_t idx = t - first_time;
    if (idx < 0 || idx >= static_cast<std::int64_t>(rewards.size()))
        throw DataError("reward buffer has no entry for time " + std::to_string(t));
    return rewards[static_cast<std::size_t>(idx)];
}

WeylMatrices build_A_matrices(const RewardBuffer& buffer, std::int64_t N, std::int64_t d, std::int64_t L) {
    if (N < 1 || d < 1 || L < 1) throw DomainError("build_A_matrices: N, d, L must be positive");
    const auto phases = quadratic_phase_table(L);
    WeylMatrices out{ComplexMatrix(d, d), ComplexMatrix(d, d)};
    for (std::int64_t s = 0; s <= 1; ++s) {
        ComplexMatrix& A = s == 0 ? out.A0 : out.A1;
        for (std::int64_t k = 1; k <= d; ++k)
            for (std::int64_t ell = 1; ell <= d; ++ell) {
                CompensatedSum acc;
                for (std::int64_t j = 0; j < N; ++j) {
                    const std::int64_t t = reward_time({k, ell, s, j}, N, d);
                    if (arm_schedule(t, N, d) != k)
                        throw DataError("build_A_matrices: time " + std::to_string(t) +
                                        " was not pulled with arm " + std::to_string(k));
                    acc.add(buffer.at(t) * phases[static_cast<std::size_t>(j % (4 * L))]);
                }
                A(k - 1, ell - 1) = acc.value() / static_cast<double>(N);
            }
    }
    return out;
}

WeylAccumulator::WeylAccumulator(std::int64_t N, std::int64_t d, std::int64_t L)
    : N_(N), d_(d), L_(L), phases_(quadratic_phase_table(L)),
      sums_(static_cast<std::size_t>(2 * d * d)) {
    if (N < 1 || d < 1 || L < 1) throw DomainError("WeylAccumulator: N, d, L must be positive");
}

void WeylAccumulator::add(std::int64_t t, double reward) {
    const auto slot = decode_reward_time(t, N_, d_);
    const auto idx = static_cast<std::size_t>((slot.s * d_ + (slot.k - 1)) * d_ + (slot.ell - 1));
    sums_[idx].add(reward * phases_[static_cast<std::size_t>(slot.j % (4 * L_))]);
}

WeylMatrices WeylAccumulator::result() const {
    WeylMatrices out{ComplexMatrix(d_, d_), ComplexMatrix(d_, d_)};
    const double n = static_cast<double>(N_);
    for (std::int64_t s = 0; s <= 1; ++s) {
        ComplexMatrix& A = s == 0 ? out.A0 : out.A1;
        for (std::int64_t k = 0; k < d_; ++k)
            for (std::int64_t ell = 0; ell < d_; ++ell)
                A(k, ell) = sums_[static_cast<std::size_t>((s * d_ + k) * d_ + ell)].value() / n;
    }
    return out;
}

EigenEstimate estimate_eigen_map(BanditEnvironment& env, const EigenConfig& cfg,
                                 std::vector<RewardRecord>* rewards) {
    cfg.validate();
    const std::int64_t d = cfg.d;
    const std::int64_t N = cfg.N;
    if (static_cast<std::int64_t>(env.dim()) != d)
        throw DomainError("estimate_eigen_map: environment dimension " + std::to_string(env.dim()) +
                          " does not match d = " + std::to_string(d));
    if (!cfg.allow_undersized) {
        const auto needed = min_effective_N(cfg.L, d, cfg.Delta, cfg.B, cfg.kappa);
        if (N < needed)
            throw ConfigError("estimate_eigen_map: N = " + std::to_string(N) + " is below the minimum " +
                              std::to_string(needed));
    }

    EigenEstimate out;
    out.N = N;
    // Redraw until the stacked arms have full rank; a failure has probability zero.
    for (int attempt = 0;; ++attempt) {
        auto draws = random_unit_vectors(static_cast<std::size_t>(d), static_cast<std::size_t>(d * (attempt + 1)),
                                         cfg.seed, RngStream::arms);
        out.arms.assign(draws.end() - d, draws.end());
        RealMatrix stacked(d, d);
        for (std::int64_t k = 0; k < d; ++k) stacked.row(k) = out.arms[static_cast<std::size_t>(k)].transpose();
        Eigen::JacobiSVD<RealMatrix> check(stacked);
        if (check.singularValues()(d - 1) > 1e-8) break;
        if (attempt + 1 >= kMaxArmRedraws) throw DataError("estimate_eigen_map: could not draw full-rank arms");
        ++out.arm_redraws;
    }

    const std::int64_t first_window = env.time() + 1;
    if (env.pull_limit() && env.time() + N + 2 * N * d * d > *env.pull_limit())
        throw BudgetError("estimate_eigen_map: run exceeds the environment pull limit");

    // Wait N steps on a throwaway arm.
    const RealVector idle = RealVector::Unit(d, 0);
    for (std::int64_t i = 0; i < N; ++i) {
        const double r = env.pull(idle);
        if (rewards) rewards->push_back({env.time(), 0, r});
    }

    WeylAccumulator acc(N, d, cfg.L);
    const std::int64_t last = N + 2 * N * d * d;
    for (std::int64_t t = N + 1; t <= last; ++t) {
        const std::int64_t k = arm_schedule(t, N, d);
        const double r = env.pull(out.arms[static_cast<std::size_t>(k - 1)]);
        acc.add(t, r);
        if (rewards) rewards->push_back({first_window - 1 + t, static_cast<int>(k), r});
    }
    out.pulls_used = last;

    out.weyl = acc.result();
    out.gamma_used = svd_threshold(N, d, cfg.R, cfg.delta);
    const ComplexMatrix truncated = truncate_singular(out.weyl.A0, out.gamma_used);
    out.output_matrix = out.weyl.A1 * pseudo_inverse(truncated);
    out.spectrum = zero_filtered(eigenvalues(out.output_matrix), out.gamma_used);
    return out;
}

std::int64_t reconstruction_power(std::int64_t dim, std::int64_t L) {
    if (dim < 1 || L < 1) throw ConfigError("reconstruction_power: dim and L must be positive");
    if (std::gcd(dim, L) != 1)
        throw ConfigError("reconstruction_power: gcd(" + std::to_string(dim) + ", " + std::to_string(L) + ") != 1");
    if (L == 1) return 1;
    for (std::int64_t m = 1; m < L; ++m)
        if ((m * dim) % L == 1) return m;
    throw ConfigError("reconstruction_power: no inverse found");
}

Reconstruction reconstruct_unit_eigenvalues(BanditEnvironment& env, const EigenConfig& cfg, std::int64_t r_pad) {
    if (r_pad < 0) throw ConfigError("reconstruct: r_pad must be nonnegative");
    EigenConfig padded = cfg;
    padded.d = cfg.d + r_pad;
    Reconstruction out;
    out.power = reconstruction_power(padded.d, cfg.L);
    out.estimate = estimate_eigen_map(env, padded);
    const ComplexMatrix raised = matrix_power(out.estimate.output_matrix, static_cast<std::uint64_t>(out.power));
    for (const auto& v : eigenvalues(raised))
        if (std::abs(v) >= out.estimate.gamma_used) out.eigenvalues.push_back(v);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), [](const auto& a, const auto& b) {
        return std::make_tuple(-a.real(), a.imag()) < std::make_tuple(-b.real(), b.imag());
    });
    return out;
}

}  // namespace dynspec
