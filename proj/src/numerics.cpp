#include "dynspec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dynspec/errors.hpp"

namespace dynspec {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Complex> root_of_unity_table(std::int64_t n) {
    std::vector<Complex> table(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < n; ++k)
        table[static_cast<std::size_t>(k)] =
            std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(n));
    return table;
}

template <typename Sample>
Complex exp_sum_impl(std::span<const Sample> samples, const ReducedRational& q) {
    if (samples.empty()) throw DomainError("exp_sum: empty series");
    const std::int64_t den = q.denominator();
    const auto table = root_of_unity_table(den);
    CompensatedSum acc;
    std::int64_t idx = 0;
    for (const auto& a : samples) {
        idx += q.numerator();
        if (idx >= den) idx -= den;
        acc.add(Complex(a) * table[static_cast<std::size_t>(idx)]);
    }
    return acc.value() / static_cast<double>(samples.size());
}

}  // namespace

ReducedRational::ReducedRational(std::int64_t numerator, std::int64_t denominator)
    : num_(numerator), den_(denominator) {
    if (numerator <= 0 || denominator <= 0 || numerator >= denominator)
        throw DomainError("ReducedRational: need 0 < numerator < denominator, got " +
                          std::to_string(numerator) + "/" + std::to_string(denominator));
    if (std::gcd(numerator, denominator) != 1)
        throw DomainError("ReducedRational: fraction not in lowest terms");
}

std::vector<ReducedRational> reduced_fractions(std::int64_t denominator) {
    std::vector<ReducedRational> out;
    for (std::int64_t a = 1; a < denominator; ++a)
        if (std::gcd(a, denominator) == 1) out.emplace_back(a, denominator);
    return out;
}

ComplexSeries::ComplexSeries(std::vector<Complex> s, std::int64_t origin)
    : samples(std::move(s)), origin_time(origin) {
    if (samples.empty()) throw DomainError("ComplexSeries: empty");
    if (origin_time < 1) throw DomainError("ComplexSeries: origin_time must be >= 1");
    for (const auto& z : samples)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw DomainError("ComplexSeries: non-finite sample");
}

ComplexSeries ComplexSeries::from_real(std::span<const double> values, std::int64_t origin) {
    return ComplexSeries(std::vector<Complex>(values.begin(), values.end()), origin);
}

Complex exp_sum(std::span<const Complex> samples, const ReducedRational& q) {
    return exp_sum_impl(samples, q);
}

Complex exp_sum(std::span<const double> samples, const ReducedRational& q) {
    return exp_sum_impl(samples, q);
}

Complex exp_sum(const ComplexSeries& series, const ReducedRational& q) {
    return exp_sum(std::span<const Complex>(series.samples), q);
}

double sigma_window(const ComplexSeries& series, std::size_t L) {
    if (L == 0) throw DomainError("sigma_window: L must be positive");
    if (series.size() < L) throw DomainError("sigma_window: series shorter than window");
    const auto& a = series.samples;
    double best = 0.0;
    for (std::size_t t0 = 0; t0 + L <= a.size(); ++t0) {
        CompensatedSum mean_acc;
        for (std::size_t t = t0; t < t0 + L; ++t) mean_acc.add(a[t]);
        const Complex mean = mean_acc.value() / static_cast<double>(L);
        double var = 0.0;
        for (std::size_t t = t0; t < t0 + L; ++t) var += std::norm(a[t] - mean);
        best = std::max(best, std::sqrt(var / static_cast<double>(L)));
    }
    return best;
}

Complex weyl_sum_scalar(std::int64_t N, std::int64_t b, std::int64_t q) {
    if (q <= 0) throw DomainError("weyl_sum_scalar: q must be positive");
    if (b < 0 || b >= q) throw DomainError("weyl_sum_scalar: need 0 <= b < q");
    if (N < 0) throw DomainError("weyl_sum_scalar: N must be nonnegative");
    const std::int64_t modulus = 4 * q;
    const auto table = root_of_unity_table(modulus);
    // The phase index (2bj + j^2) mod 4q depends only on j mod 4q.
    std::vector<std::int64_t> counts(static_cast<std::size_t>(modulus), 0);
    for (std::int64_t r = 0; r < modulus; ++r) {
        const std::int64_t occurrences = r <= N ? (N - r) / modulus + 1 : 0;
        const std::int64_t idx = (2 * b * r + r * r) % modulus;
        counts[static_cast<std::size_t>(idx)] += occurrences;
    }
    CompensatedSum acc;
    for (std::int64_t k = 0; k < modulus; ++k)
        acc.add(static_cast<double>(counts[static_cast<std::size_t>(k)]) *
                table[static_cast<std::size_t>(k)]);
    return acc.value();
}

double weyl_calibration_constant(std::int64_t q) {
    if (q <= 0) throw DomainError("weyl_calibration_constant: q must be positive");
    const std::int64_t N = 16 * q * q;
    double best = std::numeric_limits<double>::infinity();
    for (std::int64_t b = 0; b < q; ++b)
        best = std::min(best, std::abs(weyl_sum_scalar(N, b, q)));
    return best * std::sqrt(static_cast<double>(q)) / static_cast<double>(N);
}

Complex quadratic_phase(std::int64_t j, std::int64_t L) {
    if (L <= 0) throw DomainError("quadratic_phase: L must be positive");
    const std::int64_t modulus = 4 * L;
    const std::int64_t r = ((j % modulus) + modulus) % modulus;
    const std::int64_t idx = (r * r) % modulus;
    return std::polar(1.0, kTwoPi * static_cast<double>(idx) / static_cast<double>(modulus));
}

ComplexMatrix weyl_matrix_sum(std::span<const ComplexMatrix> matrices, std::int64_t L) {
    if (matrices.empty()) throw DomainError("weyl_matrix_sum: no matrices");
    if (L <= 0) throw DomainError("weyl_matrix_sum: L must be positive");
    const auto rows = matrices.front().rows();
    const auto cols = matrices.front().cols();
    std::vector<CompensatedSum> acc(static_cast<std::size_t>(rows * cols));
    for (std::size_t j = 0; j < matrices.size(); ++j) {
        const auto& Mj = matrices[j];
        if (Mj.rows() != rows || Mj.cols() != cols)
            throw DomainError("weyl_matrix_sum: dimension mismatch");
        const Complex phase = quadratic_phase(static_cast<std::int64_t>(j), L);
        for (Eigen::Index c = 0; c < cols; ++c)
            for (Eigen::Index r = 0; r < rows; ++r)
                acc[static_cast<std::size_t>(c * rows + r)].add(Mj(r, c) * phase);
    }
    ComplexMatrix out(rows, cols);
    const double n = static_cast<double>(matrices.size());
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            out(r, c) = acc[static_cast<std::size_t>(c * rows + r)].value() / n;
    return out;
}

double concentration_radius(const SubGaussianSpec& spec, std::int64_t n, double delta) {
    if (!(spec.proxy >= 0.0)) throw DomainError("concentration_radius: negative proxy");
    if (n < 1) throw DomainError("concentration_radius: n must be >= 1");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("concentration_radius: delta not in (0,1)");
    const double R = spec.proxy;
    return std::sqrt(4.0 * R * R * std::log(4.0 / delta) / static_cast<double>(n));
}

double geometric_phase_magnitude(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("geometric_phase_magnitude: a not in (0,1)");
    return 1.0 / (2.0 * std::sin(std::numbers::pi * a));
}

double geometric_phase_bound(double a) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("geometric_phase_bound: a not in (0,1)");
    const double exponent = std::numbers::pi * std::numbers::pi / 6.0;
    return 1.0 / (std::numbers::sqrt2 * std::pow(1.0 - a * a, exponent) * a);
}

double non_divisor_upper_bound(double mu, std::int64_t L, double sup_abs, std::int64_t T) {
    if (L < 1 || T < 1) throw DomainError("non_divisor_upper_bound: L and T must be positive");
    const double l = static_cast<double>(L);
    return mu + l * l * kNonDivisorConstant * (mu + sup_abs) / static_cast<double>(T);
}

double divisor_lower_bound(double sigma, double mu, std::int64_t L, double sup_abs, std::int64_t T) {
    if (L < 1 || T < 1) throw DomainError("divisor_lower_bound: L and T must be positive");
    const double l = static_cast<double>(L);
    const double inner = std::max(0.0, sigma * sigma - 2.0 * mu * sigma);
    return std::sqrt(inner / l) - mu - l * sup_abs / static_cast<double>(T);
}

}  // namespace dynspec
