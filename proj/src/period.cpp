#include "dynspec/period.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dynspec/errors.hpp"

namespace dynspec {

void PeriodConfig::validate() const {
    if (!(rho > 0.0)) throw ConfigError("period: rho must be positive");
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("period: delta must lie in (0,1)");
    if (L_max < 2) throw ConfigError("period: L_max must be at least 2");
    if (!(r_margin >= 0.0 && r_margin < 1.0)) throw ConfigError("period: r_margin must lie in [0,1)");
    if (d < 1) throw ConfigError("period: d must be positive");
    if (!(R >= 0.0)) throw ConfigError("period: R must be nonnegative");
    if (!(B > 0.0)) throw ConfigError("period: B must be positive");
    if (budget && *budget < 0) throw ConfigError("period: negative budget");
}

double threshold_eps(const PeriodConfig& cfg) {
    cfg.validate();
    return cfg.rho / (6.0 * std::sqrt(static_cast<double>(cfg.d)) * static_cast<double>(cfg.L_max));
}

std::int64_t required_samples(const PeriodConfig& cfg) {
    cfg.validate();
    const double d = static_cast<double>(cfg.d);
    const double lmax = static_cast<double>(cfg.L_max);
    const double slack = 1.0 - cfg.r_margin;
    const double A = cfg.R * cfg.R * std::log(4.0 * d * lmax * lmax * std::log(lmax) / cfg.delta);
    const double noise_term = 72.0 * d * A * lmax * lmax / (cfg.rho * cfg.rho * slack * slack);
    const double signal_term = 108.0 * cfg.B * std::sqrt(d) * lmax * lmax * lmax / (cfg.rho * slack);
    // Guard against the sum landing a hair above an integer through rounding.
    const double total = noise_term + signal_term;
    const double rounded = std::round(total);
    const double value = std::abs(total - rounded) <= 1e-9 * std::max(1.0, total) ? rounded : std::ceil(total);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(value));
}

double window_gamma(std::int64_t L_max) {
    if (L_max < 2) throw DomainError("window_gamma: L_max must be at least 2");
    return 1.0 / (1.0 + std::sqrt(4.0 * static_cast<double>(L_max) + 1.0));
}

void divisor_search(std::span<const double> rewards, std::int64_t L_max, double eps,
                    std::int64_t& beta, std::vector<FrequencyTest>& log,
                    std::vector<std::int64_t>& hit_factors) {
    const auto T = static_cast<std::int64_t>(rewards.size());
    std::vector<double> sub;
    std::int64_t ell = 1;
    while ((ell + 1) * beta <= L_max) {
        ++ell;
        const std::int64_t count = T / beta;
        if (count < 1) throw DomainError("divisor_search: fewer samples than the stride");
        const auto fractions = reduced_fractions(ell);
        bool hit = false;
        for (std::int64_t s = 0; s < beta && !hit; ++s) {
            sub.resize(static_cast<std::size_t>(count));
            for (std::int64_t j = 0; j < count; ++j)
                sub[static_cast<std::size_t>(j)] = rewards[static_cast<std::size_t>(s + beta * j)];
            for (const auto& q : fractions) {
                const double mag = std::abs(exp_sum(std::span<const double>(sub), q));
                hit = mag > eps;
                log.push_back({beta, s, q.numerator(), q.denominator(), mag, hit});
                if (hit) break;
            }
        }
        if (hit) {
            beta *= ell;
            hit_factors.push_back(ell);
            ell = 1;
        }
    }
}

PeriodEstimate estimate_period(BanditEnvironment& env, const PeriodConfig& cfg,
                               std::span<const RealVector> basis, std::vector<RewardRecord>* rewards) {
    cfg.validate();
    const auto d = static_cast<std::size_t>(cfg.d);
    if (env.dim() != d)
        throw DomainError("estimate_period: environment dimension " + std::to_string(env.dim()) +
                          " does not match d = " + std::to_string(cfg.d));
    std::vector<RealVector> standard;
    if (basis.empty()) {
        for (std::size_t m = 0; m < d; ++m) standard.push_back(RealVector::Unit(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(m)));
        basis = standard;
    }
    if (basis.size() != d) throw DomainError("estimate_period: basis must have d vectors");
    for (std::size_t i = 0; i < d; ++i) {
        if (basis[i].size() != static_cast<Eigen::Index>(d)) throw DomainError("estimate_period: basis vector dimension");
        for (std::size_t j = 0; j < d; ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            if (std::abs(basis[i].dot(basis[j]) - expected) > 1e-9)
                throw DomainError("estimate_period: basis is not orthonormal");
        }
    }

    PeriodEstimate out;
    out.eps = threshold_eps(cfg);
    out.samples_per_dimension = required_samples(cfg);
    const std::int64_t Tp = out.samples_per_dimension;
    if (cfg.budget && Tp * cfg.d > *cfg.budget)
        throw BudgetError("estimate_period: run needs " + std::to_string(Tp * cfg.d) +
                          " pulls, budget is " + std::to_string(*cfg.budget));

    std::vector<double> buffer(static_cast<std::size_t>(Tp));
    out.per_dimension_log.resize(d);
    for (std::size_t m = 0; m < d; ++m) {
        for (std::int64_t k = 0; k < Tp; ++k) {
            const double r = env.pull(basis[m]);
            buffer[static_cast<std::size_t>(k)] = r;
            if (rewards) rewards->push_back({env.time(), static_cast<int>(m + 1), r});
        }
        out.total_pulls += Tp;
        divisor_search(buffer, cfg.L_max, out.eps, out.beta, out.per_dimension_log[m], out.hit_factors);
    }
    return out;
}

bool is_aliquot_nearly_period(std::span<const RealVector> trajectory, std::int64_t ell, double rho,
                              double lambda, double mu, std::int64_t L) {
    if (ell < 1 || L < 1) throw DomainError("is_aliquot_nearly_period: ell and L must be positive");
    if (static_cast<std::int64_t>(trajectory.size()) <= ell)
        throw DomainError("is_aliquot_nearly_period: trajectory shorter than one stride");
    if (L % ell != 0) return false;
    const double radius = rho + 2.0 * lambda * mu;
    const auto n = static_cast<std::int64_t>(trajectory.size());
    // Strict inequality, except that radius 0 means exact periodicity.
    for (std::int64_t s = 0; s < n; ++s)
        for (std::int64_t u = s + ell; u < n; u += ell) {
            const double dist = (trajectory[static_cast<std::size_t>(u)] - trajectory[static_cast<std::size_t>(s)]).norm();
            if (!(dist < radius || (radius == 0.0 && dist == 0.0))) return false;
        }
    return true;
}

}  // namespace dynspec
