#include "dynspec/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "dynspec/eigen.hpp"
#include "dynspec/envs.hpp"
#include "dynspec/linalg.hpp"
#include "dynspec/numerics.hpp"
#include "dynspec/oracles.hpp"
#include "dynspec/rng.hpp"

namespace dynspec {
namespace {

// Seeds of the suite; fixed so every run checks the same instances.
constexpr std::uint64_t kMatrixSeed = 20240601;
constexpr std::uint64_t kNoiseSeed = 20240602;
constexpr std::uint64_t kSignalSeed = 20240603;

ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, std::normal_distribution<double>& gauss,
                             CounterRng& rng) {
    ComplexMatrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = Complex(gauss(rng), gauss(rng));
    return A;
}

// Full-rank and rank-deficient matrices of shapes up to 6 x 6.
std::vector<ComplexMatrix> random_matrices(std::size_t count) {
    CounterRng rng(kMatrixSeed, RngStream::test);
    std::normal_distribution<double> gauss;
    std::uniform_int_distribution<int> dim(1, 6);
    std::vector<ComplexMatrix> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const int m = dim(rng);
        const int n = dim(rng);
        if (i % 3 == 2) {
            const int r = std::uniform_int_distribution<int>(1, std::min(m, n))(rng);
            out.push_back(random_complex(m, r, gauss, rng) * random_complex(r, n, gauss, rng));
        } else {
            out.push_back(random_complex(m, n, gauss, rng));
        }
    }
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

CheckResult check_moore_penrose() {
    constexpr double tol = 1e-8;
    double worst = 0.0;
    for (const auto& A : random_matrices(100)) {
        const ComplexMatrix X = pseudo_inverse(A);
        const ComplexMatrix AX = A * X;
        const ComplexMatrix XA = X * A;
        worst = std::max({worst, (AX * A - A).cwiseAbs().maxCoeff(), (XA * X - X).cwiseAbs().maxCoeff(),
                          (AX.adjoint() - AX).cwiseAbs().maxCoeff(), (XA.adjoint() - XA).cwiseAbs().maxCoeff()});
    }
    return {"moore-penrose", worst <= tol, "max axiom residual " + fmt(worst) + " (tol 1e-8)"};
}

CheckResult check_truncation() {
    bool ok = true;
    double worst_ratio = 0.0;
    int cases = 0;
    for (const auto& A : random_matrices(100)) {
        const auto f = svd(A);
        const auto& s = f.singular_values;
        // Thresholds between, at and beyond the singular values.
        std::vector<double> gammas{s(0) * 1.5, s(0), 0.5 * s(0)};
        for (Eigen::Index i = 0; i + 1 < s.size(); ++i) gammas.push_back(0.5 * (s(i) + s(i + 1)));
        for (double g : gammas) {
            // Gaps between numerically-zero singular values sit below roundoff.
            if (g <= 1e-10 * s(0)) continue;
            const double err = spectral_norm(A - truncate_singular(A, g));
            worst_ratio = std::max(worst_ratio, err / g);
            ok = ok && err < g;
            ++cases;
        }
    }
    return {"truncation", ok, std::to_string(cases) + " thresholds, max ||A - A_g|| / g = " + fmt(worst_ratio)};
}

CheckResult check_geometric_phase_bound() {
    bool ok = true;
    double tightest = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 99; ++k) {
        const double a = k / 100.0;
        const double exact = geometric_phase_magnitude(a);
        const double bound = geometric_phase_bound(a);
        ok = ok && bound >= exact;
        tightest = std::min(tightest, bound / exact);
    }
    return {"geometric-phase-bound", ok, "min bound/exact over 99 points " + fmt(tightest)};
}

CheckResult check_concentration() {
    constexpr int trials = 10000;
    constexpr std::int64_t n = 200;
    constexpr double R = 0.3;
    CounterRng rng(kNoiseSeed, RngStream::test);
    std::normal_distribution<double> gauss(0.0, R);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const std::vector<double> deltas{0.05, 0.2};
    std::vector<int> exceed(deltas.size(), 0);
    std::vector<double> radius;
    for (double delta : deltas) radius.push_back(concentration_radius(SubGaussianSpec{R}, n, delta));
    for (int trial = 0; trial < trials; ++trial) {
        Complex acc{0.0, 0.0};
        for (std::int64_t j = 0; j < n; ++j) acc += std::polar(1.0, angle(rng)) * gauss(rng);
        const double mag = std::abs(acc) / static_cast<double>(n);
        for (std::size_t i = 0; i < deltas.size(); ++i) exceed[i] += mag > radius[i];
    }
    bool ok = true;
    std::ostringstream detail;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
        const double freq = static_cast<double>(exceed[i]) / trials;
        ok = ok && freq <= deltas[i];
        detail << (i ? "; " : "") << "delta=" << deltas[i] << " exceedance " << freq;
    }
    return {"concentration", ok, detail.str()};
}

CheckResult check_weyl_lower_bound() {
    // The constant is calibrated at N = 16 q^2; the bound must hold with it
    // for every b, and stay within 1% of it for N up to 64 q^2.
    constexpr std::int64_t q_max = 10;
    double c = std::numeric_limits<double>::infinity();
    for (std::int64_t q = 1; q <= q_max; ++q) c = std::min(c, weyl_calibration_constant(q));
    bool ok = c >= 0.5;
    double worst_range = std::numeric_limits<double>::infinity();
    for (std::int64_t q = 1; q <= q_max; ++q) {
        const double sq = std::sqrt(static_cast<double>(q));
        for (std::int64_t b = 0; b < q; ++b) {
            const std::int64_t N0 = 16 * q * q;
            ok = ok && std::abs(weyl_sum_scalar(N0, b, q)) >= c * static_cast<double>(N0) / sq;
            for (std::int64_t N = N0; N <= 4 * N0; N += q)
                worst_range = std::min(worst_range, std::abs(weyl_sum_scalar(N, b, q)) * sq / static_cast<double>(N));
        }
    }
    ok = ok && worst_range >= 0.99 * c;
    return {"weyl-lower-bound", ok, "c = " + fmt(c) + ", worst over N in [16q^2, 64q^2] " + fmt(worst_range)};
}

CheckResult check_weyl_structure() {
    // Rotation by 2 pi / 3 in the first plane, 0.5 contraction on the third axis.
    constexpr std::int64_t d = 3;
    constexpr std::int64_t L = 3;
    RealMatrix M = RealMatrix::Zero(d, d);
    const double c = std::cos(2.0 * std::numbers::pi / 3.0);
    const double s = std::sin(2.0 * std::numbers::pi / 3.0);
    M << c, -s, 0, s, c, 0, 0, 0, 0.5;
    const RealVector theta = random_unit_vectors(d, 1, kSignalSeed, RngStream::theta).front();

    EigenConfig cfg;
    cfg.N = 16 * L * L;
    cfg.L = L;
    cfg.d = d;
    cfg.R = 0.0;
    cfg.Delta = 0.5;
    cfg.kappa = 1.0;
    cfg.B = 1.0;
    cfg.seed = kSignalSeed;
    LinearSystemEnv env(M, theta, NoiseModel{});
    std::vector<RewardRecord> records;
    const auto est = estimate_eigen_map(env, cfg, &records);

    RewardBuffer buffer;
    buffer.first_time = cfg.N + 1;
    for (const auto& r : records)
        if (r.t > cfg.N) buffer.rewards.push_back(r.reward);
    const auto built = build_A_matrices(buffer, cfg.N, d, L);

    double worst = 0.0;
    for (std::int64_t which = 0; which < 2; ++which) {
        const ComplexMatrix expected = oracles::structured_weyl_matrix(M, theta, est.arms, cfg.N, L, which);
        const ComplexMatrix& streamed = which == 0 ? est.weyl.A0 : est.weyl.A1;
        const ComplexMatrix& buffered = which == 0 ? built.A0 : built.A1;
        worst = std::max({worst, (streamed - expected).cwiseAbs().maxCoeff(),
                          (buffered - expected).cwiseAbs().maxCoeff()});
    }
    return {"weyl-structure", worst <= 1e-8, "max entry deviation " + fmt(worst) + " (tol 1e-8)"};
}

CheckResult check_index_bijection() {
    bool ok = true;
    std::ostringstream detail;
    for (std::int64_t d : {2, 3, 5}) {
        for (std::int64_t N : {1, 4, 37}) {
            const std::int64_t first = N + 1;
            const std::int64_t last = N * (2 * d * d + 1);
            std::set<std::int64_t> seen;
            for (std::int64_t k = 1; k <= d; ++k)
                for (std::int64_t ell = 1; ell <= d; ++ell)
                    for (std::int64_t s = 0; s < 2; ++s)
                        for (std::int64_t j = 0; j < N; ++j) {
                            const RewardSlot slot{k, ell, s, j};
                            const std::int64_t t = reward_time(slot, N, d);
                            ok = ok && t >= first && t <= last && arm_schedule(t, N, d) == k &&
                                 decode_reward_time(t, N, d) == slot;
                            seen.insert(t);
                        }
            ok = ok && static_cast<std::int64_t>(seen.size()) == last - first + 1;
        }
        detail << (d == 2 ? "" : ", ") << "d=" << d;
    }
    return {"index-bijection", ok, detail.str() + " with N in {1, 4, 37}"};
}

CheckResult check_non_divisor_bound() {
    CounterRng rng(kSignalSeed, RngStream::test);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    int tests = 0;
    double worst_ratio = 0.0;
    // Violations grouped by period; the bound is only derived for beta <= L,
    // so the L = 1 constant signals are where it can break.
    std::set<std::int64_t> violating_periods;
    std::string first_violation;
    for (std::int64_t L = 1; L <= 8; ++L) {
        std::vector<double> period(static_cast<std::size_t>(L));
        for (auto& v : period) v = unif(rng);
        double sup = 0.0;
        for (double v : period) sup = std::max(sup, std::abs(v));
        for (std::int64_t T : {50, 203, 1000}) {
            std::vector<double> a(static_cast<std::size_t>(T));
            for (std::int64_t t = 0; t < T; ++t) a[static_cast<std::size_t>(t)] = period[static_cast<std::size_t>(t % L)];
            const double bound = non_divisor_upper_bound(0.0, L, sup, T);
            for (std::int64_t beta = 2; beta <= 8; ++beta) {
                if (L % beta == 0) continue;
                for (const auto& q : reduced_fractions(beta)) {
                    if (q.denominator() != beta) continue;
                    const double mag = std::abs(exp_sum(std::span<const double>(a), q));
                    if (mag > bound) {
                        if (violating_periods.empty())
                            first_violation = "L=" + std::to_string(L) + " q=" + std::to_string(q.numerator()) + "/" +
                                              std::to_string(beta) + " T=" + std::to_string(T);
                        violating_periods.insert(L);
                    }
                    worst_ratio = std::max(worst_ratio, mag / bound);
                    ++tests;
                }
            }
        }
    }
    std::string detail = std::to_string(tests) + " frequencies, max |R| / bound = " + fmt(worst_ratio);
    if (!violating_periods.empty()) {
        detail += "; violated for L in {";
        bool first = true;
        for (auto L : violating_periods) {
            detail += (first ? "" : ", ") + std::to_string(L);
            first = false;
        }
        detail += "}, first at " + first_violation;
    }
    return {"non-divisor-bound", violating_periods.empty(), detail};
}

std::vector<CheckResult> run_property_suite() {
    return {check_moore_penrose(),      check_truncation(),     check_geometric_phase_bound(),
            check_concentration(),      check_weyl_lower_bound(), check_weyl_structure(),
            check_index_bijection(),    check_non_divisor_bound()};
}

}  // namespace dynspec
