#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dynspec/errors.hpp"
#include "dynspec/numerics.hpp"
#include "dynspec/rng.hpp"

using namespace dynspec;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TEST(ReducedRational, RejectsUnreducedAndOutOfRange) {
    EXPECT_THROW(ReducedRational(2, 4), DomainError);
    EXPECT_THROW(ReducedRational(0, 3), DomainError);
    EXPECT_THROW(ReducedRational(3, 3), DomainError);
    EXPECT_THROW(ReducedRational(-1, 3), DomainError);
    const ReducedRational q(2, 7);
    EXPECT_EQ(q.numerator(), 2);
    EXPECT_EQ(q.denominator(), 7);
    EXPECT_DOUBLE_EQ(q.value(), 2.0 / 7.0);
}

TEST(ReducedRational, FractionsForDenominator) {
    const auto f = reduced_fractions(8);
    ASSERT_EQ(f.size(), 4u);
    EXPECT_EQ(f[0], ReducedRational(1, 8));
    EXPECT_EQ(f[3], ReducedRational(7, 8));
    EXPECT_TRUE(reduced_fractions(1).empty());
    EXPECT_EQ(reduced_fractions(7).size(), 6u);
}

TEST(ComplexSeries, RejectsEmptyAndNonFinite) {
    EXPECT_THROW(ComplexSeries(std::vector<Complex>{}), DomainError);
    EXPECT_THROW(ComplexSeries(std::vector<Complex>{{std::nan(""), 0.0}}), DomainError);
    EXPECT_THROW(ComplexSeries({Complex(1, 0)}, 0), DomainError);
}

TEST(ExpSum, AlternatingPhasesCancel) {
    const std::vector<double> a{1, 1, 1, 1};
    EXPECT_LT(std::abs(exp_sum(std::span<const double>(a), ReducedRational(1, 2))), 1e-15);
}

TEST(ExpSum, ConjugatePhasesGiveOne) {
    std::vector<Complex> a;
    for (int j = 1; j <= 6; ++j) a.push_back(std::polar(1.0, -kTwoPi * j / 3.0));
    const auto r = exp_sum(ComplexSeries(a), ReducedRational(1, 3));
    EXPECT_NEAR(r.real(), 1.0, 1e-14);
    EXPECT_NEAR(r.imag(), 0.0, 1e-14);
}

TEST(ExpSum, IndexingIgnoresOriginTime) {
    std::vector<Complex> a{{1, 0}, {2, 0}, {-1, 0.5}};
    const ReducedRational q(1, 3);
    EXPECT_EQ(exp_sum(ComplexSeries(a, 1), q), exp_sum(ComplexSeries(a, 1000), q));
}

TEST(ExpSum, NonDivisorFrequencyBoundedForPeriodFive) {
    // a_t has exact period 5; 7 does not divide 5.
    const std::vector<double> period{0.3, -1.0, 0.7, 0.2, -0.4};
    for (std::int64_t T : {10, 97, 1000}) {
        std::vector<double> a;
        for (std::int64_t t = 0; t < T; ++t) a.push_back(period[static_cast<std::size_t>(t % 5)]);
        const double mag = std::abs(exp_sum(std::span<const double>(a), ReducedRational(2, 7)));
        EXPECT_LE(mag, non_divisor_upper_bound(0.0, 5, 1.0, T));
    }
}

TEST(ExpSum, NonDivisorBoundFailsForConstantSignals) {
    // With L = 1 every beta > L; the constant signal at q = 7/8 and T = 203
    // leaves three unit phasors e^{-i pi/4}, e^{-i pi/2}, e^{-i 3pi/4}.
    const std::vector<double> a(203, 1.0);
    const double mag = std::abs(exp_sum(std::span<const double>(a), ReducedRational(7, 8)));
    EXPECT_NEAR(mag, (1.0 + std::sqrt(2.0)) / 203.0, 1e-15);
    EXPECT_GT(mag, non_divisor_upper_bound(0.0, 1, 1.0, 203));
}

TEST(ExpSum, BoundedByMaxMagnitudeAndLinear) {
    CounterRng rng(7, RngStream::test);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Complex> a(37), b(37), mix(37);
        double amax = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = {g(rng), g(rng)};
            b[i] = {g(rng), g(rng)};
            amax = std::max(amax, std::abs(a[i]));
        }
        const Complex alpha(0.3, -1.2), beta(-2.0, 0.5);
        for (std::size_t i = 0; i < a.size(); ++i) mix[i] = alpha * a[i] + beta * b[i];
        for (std::int64_t den = 2; den <= 9; ++den)
            for (const auto& q : reduced_fractions(den)) {
                const Complex ra = exp_sum(ComplexSeries(a), q);
                EXPECT_LE(std::abs(ra), amax + 1e-12);
                const Complex lhs = exp_sum(ComplexSeries(mix), q);
                const Complex rhs = alpha * ra + beta * exp_sum(ComplexSeries(b), q);
                EXPECT_LT(std::abs(lhs - rhs), 1e-12);
            }
    }
}

TEST(SigmaWindow, Examples) {
    const std::vector<double> constant(10, 3.5);
    EXPECT_DOUBLE_EQ(sigma_window(ComplexSeries::from_real(constant), 4), 0.0);
    const std::vector<double> a{0, 2, 0, 2};
    EXPECT_NEAR(sigma_window(ComplexSeries::from_real(a), 2), 1.0, 1e-15);
    const std::vector<double> b{0, 1, 2, 0, 1, 2};
    EXPECT_NEAR(sigma_window(ComplexSeries::from_real(b), 3), std::sqrt(2.0 / 3.0), 1e-15);
    EXPECT_THROW(sigma_window(ComplexSeries::from_real(b), 7), DomainError);
}

TEST(WeylSum, SmallCases) {
    const auto w = weyl_sum_scalar(3, 0, 1);
    EXPECT_NEAR(w.real(), 2.0, 1e-14);
    EXPECT_NEAR(w.imag(), 2.0, 1e-14);
    for (std::int64_t q = 1; q <= 4; ++q)
        for (std::int64_t b = 0; b < q; ++b) EXPECT_NEAR(std::abs(weyl_sum_scalar(0, b, q) - Complex(1, 0)), 0.0, 1e-15);
    EXPECT_THROW(weyl_sum_scalar(10, 3, 3), DomainError);
}

TEST(WeylSum, MatchesDirectSummation) {
    // Independent evaluation: N=400, b=2, q=5 summed term by term in numpy.
    const auto w = weyl_sum_scalar(400, 2, 5);
    EXPECT_NEAR(w.real(), 113.70440106020612, 1e-9);
    EXPECT_NEAR(w.imag(), -57.42576061020185, 1e-9);
}

TEST(WeylSum, CalibrationConstants) {
    // min over b < q of |W(16 q^2, b, q)| sqrt(q) / (16 q^2), from direct summation.
    const double expected[] = {0.7525996611745185, 0.7229006627207364, 0.7103149141673244, 0.699895357887987,
                               0.7045865028240763, 0.7029999598097867, 0.7039223567678191, 0.7048118197231618,
                               0.7050095252355989, 0.7051303576489424};
    for (std::int64_t q = 1; q <= 10; ++q) EXPECT_NEAR(weyl_calibration_constant(q), expected[q - 1], 1e-10) << q;
    // q=5, b=2 satisfies the calibrated bound.
    EXPECT_GE(std::abs(weyl_sum_scalar(400, 2, 5)) / 400.0, weyl_calibration_constant(5) / std::sqrt(5.0));
}

TEST(WeylMatrixSum, IdentityAndZero) {
    const std::int64_t L = 2, N = 64;
    std::vector<ComplexMatrix> mats(N, ComplexMatrix::Identity(3, 3));
    const auto W = weyl_matrix_sum(mats, L);
    const Complex factor(0.35355339059327395, 0.35355339059327384);
    EXPECT_LT((W - factor * ComplexMatrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-14);
    std::vector<ComplexMatrix> zeros(5, ComplexMatrix::Zero(2, 2));
    EXPECT_EQ(weyl_matrix_sum(zeros, 3), ComplexMatrix::Zero(2, 2));
    std::vector<ComplexMatrix> bad{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(3, 3)};
    EXPECT_THROW(weyl_matrix_sum(bad, 3), DomainError);
}

TEST(WeylMatrixSum, PermutationShrinkPowersAgreeWithNaiveSum) {
    RealMatrix M = RealMatrix::Zero(5, 5);
    M(0, 3) = M(1, 1) = M(2, 0) = M(3, 2) = 1.0;
    M(4, 4) = 0.7;
    const std::int64_t L = 24, N = 9216;
    ComplexMatrix step = ComplexMatrix::Identity(5, 5);
    for (int i = 0; i < 50; ++i) step = step * M.cast<Complex>();
    std::vector<ComplexMatrix> mats;
    ComplexMatrix P = ComplexMatrix::Identity(5, 5);
    ComplexMatrix naive = ComplexMatrix::Zero(5, 5);
    for (std::int64_t j = 0; j < N; ++j) {
        mats.push_back(P);
        naive += P * std::polar(1.0, kTwoPi * static_cast<double>(j) * static_cast<double>(j) / (4.0 * L));
        P = P * step;
    }
    naive /= static_cast<double>(N);
    EXPECT_LT((weyl_matrix_sum(mats, L) - naive).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Concentration, FormulaAndMonotonicity) {
    EXPECT_EQ(concentration_radius(SubGaussianSpec{0.0}, 100, 0.2), 0.0);
    EXPECT_NEAR(concentration_radius(SubGaussianSpec{0.3}, 10000, 0.2), 0.010384910295613712, 1e-15);
    EXPECT_GT(concentration_radius(SubGaussianSpec{0.3}, 100, 0.2), concentration_radius(SubGaussianSpec{0.3}, 200, 0.2));
    EXPECT_LT(concentration_radius(SubGaussianSpec{0.3}, 100, 0.2), concentration_radius(SubGaussianSpec{0.4}, 100, 0.2));
    EXPECT_LT(concentration_radius(SubGaussianSpec{0.3}, 100, 0.2), concentration_radius(SubGaussianSpec{0.3}, 100, 0.1));
    EXPECT_THROW(concentration_radius(SubGaussianSpec{0.3}, 100, 0.0), DomainError);
    EXPECT_THROW(concentration_radius(SubGaussianSpec{0.3}, 100, 1.0), DomainError);
}

TEST(GeometricPhase, ExactValuesAndBound) {
    EXPECT_NEAR(geometric_phase_magnitude(0.5), 0.5, 1e-15);
    EXPECT_NEAR(geometric_phase_bound(0.5), 2.2700267865759397, 1e-12);
    EXPECT_NEAR(geometric_phase_magnitude(1.0 / 3.0), 0.5773502691896258, 1e-14);
    EXPECT_NEAR(geometric_phase_bound(1.0 / 3.0), 2.574831322734992, 1e-12);
    for (int k = 1; k <= 99; ++k) EXPECT_GE(geometric_phase_bound(k / 100.0), geometric_phase_magnitude(k / 100.0));
    EXPECT_THROW(geometric_phase_bound(0.0), DomainError);
    EXPECT_THROW(geometric_phase_bound(1.0), DomainError);
}

TEST(DivisorBounds, ConstantAndPeriodicSignals) {
    EXPECT_NEAR(kNonDivisorConstant, 1.7225719680691434, 1e-14);
    // Period 4 sequence with window deviation sigma: some s/4 beats the lower bound.
    const std::vector<double> period{1.0, -0.5, 0.25, 0.8};
    const std::int64_t T = 4000;
    std::vector<double> a;
    for (std::int64_t t = 0; t < T; ++t) a.push_back(period[static_cast<std::size_t>(t % 4)]);
    const double sigma = sigma_window(ComplexSeries::from_real(a), 4);
    const double lower = divisor_lower_bound(sigma, 0.0, 4, 1.0, T);
    double best = 0.0;
    for (std::int64_t den : {2, 4})
        for (const auto& q : reduced_fractions(den)) best = std::max(best, std::abs(exp_sum(std::span<const double>(a), q)));
    EXPECT_GT(best, lower);
}
