#pragma once

// Exponential sums, Weyl sums and concentration bounds shared by the period
// and eigenvalue estimators. Everything here is a pure function.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "dynspec/linalg.hpp"

namespace dynspec {

using Complex = std::complex<double>;

/// Rational number in (0, 1) kept in lowest terms.
class ReducedRational {
public:
    /// Throws DomainError unless 0 < numerator < denominator and the
    /// fraction is already reduced.
    ReducedRational(std::int64_t numerator, std::int64_t denominator);

    std::int64_t numerator() const noexcept { return num_; }
    std::int64_t denominator() const noexcept { return den_; }
    double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    friend bool operator==(const ReducedRational&, const ReducedRational&) = default;

private:
    std::int64_t num_;
    std::int64_t den_;
};

/// All reduced fractions alpha/denominator in (0,1), alpha ascending.
std::vector<ReducedRational> reduced_fractions(std::int64_t denominator);

/// Finite complex samples a_1..a_T; origin_time is the global time of a_1
/// and is metadata only.
struct ComplexSeries {
    std::vector<Complex> samples;
    std::int64_t origin_time = 1;

    ComplexSeries() = default;
    explicit ComplexSeries(std::vector<Complex> s, std::int64_t origin = 1);
    static ComplexSeries from_real(std::span<const double> values, std::int64_t origin = 1);

    std::size_t size() const noexcept { return samples.size(); }
};

struct SubGaussianSpec {
    double proxy = 0.0;  // R
};

/// Neumaier-compensated complex accumulator.
class CompensatedSum {
public:
    void add(Complex v) noexcept {
        add_component(re_, re_c_, v.real());
        add_component(im_, im_c_, v.imag());
    }
    Complex value() const noexcept { return {re_ + re_c_, im_ + im_c_}; }

private:
    static void add_component(double& sum, double& comp, double x) noexcept {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }

    double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

/// (1/T) sum_{j=1}^T a_j exp(i 2 pi q j). Phases are taken from an exact
/// table indexed by (numerator * j) mod denominator.
Complex exp_sum(std::span<const Complex> samples, const ReducedRational& q);
Complex exp_sum(std::span<const double> samples, const ReducedRational& q);
Complex exp_sum(const ComplexSeries& series, const ReducedRational& q);

/// Largest population standard deviation over all length-L windows.
double sigma_window(const ComplexSeries& series, std::size_t L);

/// sum_{j=0}^N exp(i 2 pi (2 b j + j^2) / (4 q)), unnormalized.
Complex weyl_sum_scalar(std::int64_t N, std::int64_t b, std::int64_t q);

/// min over b < q of |W(16 q^2, b, q)| sqrt(q) / (16 q^2).
///
/// Empirical stand-in for the Weyl-sum constant, evaluated only at the
/// smallest admissible N. Diagnostics use it; no estimator branches on it.
double weyl_calibration_constant(std::int64_t q);

/// (1/N) sum_{j=0}^{N-1} M_{j+1} exp(i 2 pi j^2 / (4L)).
ComplexMatrix weyl_matrix_sum(std::span<const ComplexMatrix> matrices, std::int64_t L);

/// Phase exp(i 2 pi j^2 / (4L)) with j^2 reduced mod 4L in integer arithmetic.
Complex quadratic_phase(std::int64_t j, std::int64_t L);

/// sqrt(4 R^2 log(4/delta) / n).
double concentration_radius(const SubGaussianSpec& spec, std::int64_t n, double delta);

/// Exact |1/(1 - exp(i 2 pi a))| = 1/(2 sin(pi a)).
double geometric_phase_magnitude(double a);

/// 1/(sqrt(2) (1 - a^2)^{pi^2/6} a), an upper bound for the magnitude above.
double geometric_phase_bound(double a);

/// 1 + 2/(sqrt(2) pi (3/4)^{pi^2/6}).
inline const double kNonDivisorConstant =
    1.0 + 2.0 / (std::numbers::sqrt2 * std::numbers::pi *
                 std::pow(0.75, std::numbers::pi * std::numbers::pi / 6.0));

/// mu + L^2 C0 (mu + sup|a|) / T: ceiling on |R(a; alpha/beta)| when beta
/// does not divide the period L.
double non_divisor_upper_bound(double mu, std::int64_t L, double sup_abs, std::int64_t T);

/// sqrt((sigma^2 - 2 mu sigma)/L) - mu - L sup|a| / T: some s/L beats this.
double divisor_lower_bound(double sigma, double mu, std::int64_t L, double sup_abs, std::int64_t T);

}  // namespace dynspec
