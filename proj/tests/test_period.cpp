#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dynspec/envs.hpp"
#include "dynspec/errors.hpp"
#include "dynspec/period.hpp"

using namespace dynspec;
using Complex = std::complex<double>;

namespace {

PeriodConfig table2() {
    PeriodConfig c;
    c.rho = 0.98;
    c.delta = 0.2;
    c.L_max = 10;
    c.d = 5;
    c.R = 0.3;
    c.B = std::sqrt(5.0);
    return c;
}

std::int64_t product(const std::vector<std::int64_t>& v) {
    std::int64_t p = 1;
    for (auto x : v) p *= x;
    return p;
}

std::vector<RealVector> repeat(const std::vector<RealVector>& block, int copies) {
    std::vector<RealVector> out;
    for (int c = 0; c < copies; ++c) out.insert(out.end(), block.begin(), block.end());
    return out;
}

RealVector vec2(double a, double b) {
    RealVector v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST(PeriodConfig, Validation) {
    EXPECT_NO_THROW(table2().validate());
    auto c = table2();
    c.rho = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = table2();
    c.delta = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = table2();
    c.L_max = 1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = table2();
    c.r_margin = 1.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = table2();
    c.B = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(ThresholdEps, Values) {
    // 0.98 / (6 sqrt(5) 10), evaluated in 30-digit arithmetic.
    EXPECT_NEAR(threshold_eps(table2()), 0.007304488726499313, 1e-17);
    auto c = table2();
    c.rho = 24;
    c.d = 4;
    c.L_max = 2;
    EXPECT_DOUBLE_EQ(threshold_eps(c), 1.0);
    c = table2();
    c.rho *= 2;
    EXPECT_DOUBLE_EQ(threshold_eps(c), 2 * threshold_eps(table2()));
}

TEST(RequiredSamples, TableValues) {
    // Exact right-hand sides: 584906.047... and 600407.694...
    EXPECT_EQ(required_samples(table2()), 584907);
    PeriodConfig circle;
    circle.rho = 0.3;
    circle.delta = 0.2;
    circle.L_max = 8;
    circle.d = 2;
    circle.R = 0.3;
    circle.B = 2.0;
    EXPECT_EQ(required_samples(circle), 600408);
}

TEST(RequiredSamples, ConstructedCancellationGivesOne) {
    PeriodConfig c;
    c.d = 4;
    c.L_max = 3;
    c.R = 0.0;
    c.B = 1.0;
    c.rho = 108.0 * 2.0 * 27.0;
    EXPECT_EQ(required_samples(c), 1);
}

TEST(RequiredSamples, Monotone) {
    const auto base = required_samples(table2());
    auto c = table2();
    c.L_max = 11;
    EXPECT_GT(required_samples(c), base);
    c = table2();
    c.R = 0.4;
    EXPECT_GT(required_samples(c), base);
    c = table2();
    c.B = 3.0;
    EXPECT_GT(required_samples(c), base);
    c = table2();
    c.rho = 1.2;
    EXPECT_LT(required_samples(c), base);
    c = table2();
    c.delta = 0.4;
    EXPECT_LT(required_samples(c), base);
}

TEST(WindowGamma, Value) {
    EXPECT_NEAR(window_gamma(10), 0.13507810593582122, 1e-16);
    EXPECT_THROW(window_gamma(1), DomainError);
}

TEST(DivisorSearch, ExactPeriodEightSignal) {
    // Cell sequence 0,1,1,1,1,0,1,0 repeated.
    const double cycle[] = {0, 1, 1, 1, 1, 0, 1, 0};
    std::vector<double> r;
    for (int t = 0; t < 8000; ++t) r.push_back(cycle[t % 8]);
    std::int64_t beta = 1;
    std::vector<FrequencyTest> log;
    std::vector<std::int64_t> hits;
    divisor_search(r, 10, 0.0073, beta, log, hits);
    EXPECT_EQ(beta, 8);
    EXPECT_EQ(product(hits), beta);
    for (const auto& t : log) EXPECT_LE(t.beta * t.denominator, 10);
}

TEST(DivisorSearch, ConstantSignalNeverHits) {
    std::vector<double> r(1000, 0.7);
    std::int64_t beta = 1;
    std::vector<FrequencyTest> log;
    std::vector<std::int64_t> hits;
    divisor_search(r, 10, 0.01, beta, log, hits);
    EXPECT_EQ(beta, 1);
    EXPECT_TRUE(hits.empty());
    // Every denominator 2..10 is tried at beta = 1, offset 0.
    std::size_t expected = 0;
    for (int l = 2; l <= 10; ++l) expected += reduced_fractions(l).size();
    EXPECT_EQ(log.size(), expected);
}

TEST(DivisorSearch, BetaCarriesAcrossDimensions) {
    // Dimension 1 has period 2, dimension 2 has period 3: together beta = 6.
    std::vector<double> a, b;
    for (int t = 0; t < 6000; ++t) {
        a.push_back(t % 2 ? 1.0 : -1.0);
        b.push_back(t % 3 == 0 ? 1.0 : 0.0);
    }
    std::int64_t beta = 1;
    std::vector<FrequencyTest> log;
    std::vector<std::int64_t> hits;
    divisor_search(a, 10, 0.01, beta, log, hits);
    EXPECT_EQ(beta, 2);
    divisor_search(b, 10, 0.01, beta, log, hits);
    EXPECT_EQ(beta, 6);
    EXPECT_EQ(hits, (std::vector<std::int64_t>{2, 3}));
}

TEST(EstimatePeriod, ConstantStateGivesOne) {
    PeriodConfig c;
    c.d = 2;
    c.L_max = 4;
    c.rho = 0.5;
    c.R = 0.0;
    c.B = 1.0;
    LinearSystemEnv env(RealMatrix::Identity(2, 2), vec2(0.6, 0.8), NoiseModel{});
    const auto est = estimate_period(env, c);
    EXPECT_EQ(est.beta, 1);
    EXPECT_EQ(est.total_pulls, 2 * required_samples(c));
    EXPECT_EQ(env.time(), est.total_pulls);
}

TEST(EstimatePeriod, NoiselessLifeGameGivesEight) {
    auto c = table2();
    c.R = 0.0;
    LifeGameEnv env(default_lifegame_fixture(), NoiseModel{});
    std::vector<RewardRecord> recs;
    const auto est = estimate_period(env, c, {}, &recs);
    EXPECT_EQ(est.beta, 8);
    EXPECT_EQ(product(est.hit_factors), est.beta);
    EXPECT_EQ(est.total_pulls, 5 * est.samples_per_dimension);
    ASSERT_EQ(recs.size(), static_cast<std::size_t>(est.total_pulls));
    EXPECT_EQ(recs.front().t, 1);
    EXPECT_EQ(recs.back().arm_id, 5);
}

TEST(EstimatePeriod, NoiselessRotationIsAnAliquotPeriod) {
    // Exact rotation by 2 pi / 6 in the plane.
    const double a = std::numbers::pi / 3.0;
    RealMatrix M(2, 2);
    M << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
    PeriodConfig c;
    c.d = 2;
    c.L_max = 8;
    c.rho = 0.5;
    c.R = 0.0;
    c.B = 1.0;
    LinearSystemEnv env(M, vec2(1.0, 0.0), NoiseModel{});
    const auto est = estimate_period(env, c);
    EXPECT_EQ(est.beta, 6);
    LinearSystemEnv replay(M, vec2(1.0, 0.0), NoiseModel{});
    std::vector<RealVector> traj;
    for (int t = 0; t < 120; ++t) {
        traj.push_back(replay.hidden_state());
        replay.pull(RealVector::Zero(2));
    }
    EXPECT_TRUE(is_aliquot_nearly_period(traj, est.beta, c.rho, std::sqrt(2.0), 0.0, 6));
}

TEST(EstimatePeriod, RotatedOrthonormalBasisWorks) {
    const double a = 0.3;
    std::vector<RealVector> basis{vec2(std::cos(a), std::sin(a)), vec2(-std::sin(a), std::cos(a))};
    PeriodConfig c;
    c.d = 2;
    c.L_max = 4;
    c.rho = 0.5;
    c.R = 0.0;
    c.B = 1.0;
    RealMatrix flip(2, 2);
    flip << -1, 0, 0, 1;
    LinearSystemEnv env(flip, vec2(1.0, 0.0), NoiseModel{});
    EXPECT_EQ(estimate_period(env, c, basis).beta, 2);
    std::vector<RealVector> skew{vec2(1.0, 0.0), vec2(1.0, 0.0)};
    LinearSystemEnv env2(flip, vec2(1.0, 0.0), NoiseModel{});
    EXPECT_THROW(estimate_period(env2, c, skew), DomainError);
}

TEST(EstimatePeriod, BudgetAndDimensionErrors) {
    auto c = table2();
    c.budget = 1000;
    LifeGameEnv env(default_lifegame_fixture(), NoiseModel{});
    EXPECT_THROW(estimate_period(env, c), BudgetError);
    EXPECT_EQ(env.time(), 0);
    auto d2 = table2();
    d2.d = 4;
    EXPECT_THROW(estimate_period(env, d2), DomainError);
}

TEST(AliquotNearlyPeriod, Examples) {
    const std::vector<RealVector> block6{vec2(0, 0), vec2(1, 0), vec2(2, 0), vec2(3, 0), vec2(4, 0), vec2(5, 0)};
    const auto six = repeat(block6, 4);
    EXPECT_TRUE(is_aliquot_nearly_period(six, 6, 0.0, 1.0, 0.0, 6));
    EXPECT_FALSE(is_aliquot_nearly_period(six, 4, 100.0, 1.0, 0.0, 6));

    const RealVector v = vec2(0, 0), w = vec2(1, 0), z = vec2(1.1, 0);
    const auto seq = repeat({v, w, v, w, v, z}, 5);
    // Worst pair distance is |w - z| = 0.1.
    EXPECT_TRUE(is_aliquot_nearly_period(seq, 2, 0.1000001, 1.0, 0.0, 6));
    EXPECT_FALSE(is_aliquot_nearly_period(seq, 2, 0.1, 1.0, 0.0, 6));
    EXPECT_FALSE(is_aliquot_nearly_period(seq, 2, 0.09, 1.0, 0.0, 6));
    // The mu term widens the radius.
    EXPECT_TRUE(is_aliquot_nearly_period(seq, 2, 0.0, 1.0, 0.06, 6));
    EXPECT_THROW(is_aliquot_nearly_period(std::vector<RealVector>{v}, 2, 0.1, 1.0, 0.0, 6), DomainError);
}
