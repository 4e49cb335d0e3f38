#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dynspec/envs.hpp"
#include "dynspec/errors.hpp"
#include "dynspec/linalg.hpp"

using namespace dynspec;
using Complex = std::complex<double>;

namespace {

RealVector unit(int d, int i) { return RealVector::Unit(d, i); }

// Smallest p with x_{t+p} = x_t over the whole sequence.
int fundamental_period(const std::vector<double>& x) {
    for (std::size_t p = 1; p < x.size(); ++p) {
        bool ok = true;
        for (std::size_t t = 0; t + p < x.size() && ok; ++t) ok = x[t] == x[t + p];
        if (ok) return static_cast<int>(p);
    }
    return -1;
}

}  // namespace

TEST(Noise, KindsParseAndRoundTrip) {
    EXPECT_EQ(parse_noise_kind("gaussian"), NoiseKind::gaussian);
    EXPECT_EQ(parse_noise_kind("uniform"), NoiseKind::uniform);
    EXPECT_EQ(parse_noise_kind("none"), NoiseKind::none);
    EXPECT_THROW(parse_noise_kind("cauchy"), ConfigError);
    EXPECT_EQ(to_string(NoiseKind::uniform), "uniform");
}

TEST(Noise, UniformStaysInRangeAndGaussianHasProxyVariance) {
    NoiseSource u(NoiseModel{NoiseKind::uniform, 0.3, 11});
    NoiseSource g(NoiseModel{NoiseKind::gaussian, 0.3, 11});
    double sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = u.draw();
        EXPECT_LE(std::abs(x), 0.3);
        const double y = g.draw();
        sum2 += y * y;
    }
    EXPECT_NEAR(sum2 / n, 0.09, 0.002);
}

TEST(LinearSystemEnv, IdentityGivesConstantReward) {
    LinearSystemEnv env(RealMatrix::Identity(3, 3), unit(3, 0), NoiseModel{});
    EXPECT_EQ(env.hidden_state(), unit(3, 0));
    for (int t = 0; t < 10; ++t) EXPECT_EQ(env.pull(unit(3, 0)), 1.0);
    EXPECT_EQ(env.time(), 10);
}

TEST(LinearSystemEnv, RejectsBadArmsAndEnforcesLimit) {
    LinearSystemEnv env(RealMatrix::Identity(2, 2), unit(2, 0), NoiseModel{});
    EXPECT_THROW(env.pull(unit(3, 0)), DomainError);
    EXPECT_THROW(env.pull(RealVector::Constant(2, 1.0)), DomainError);
    env.set_pull_limit(2);
    env.pull(unit(2, 0));
    env.pull(unit(2, 1));
    EXPECT_THROW(env.pull(unit(2, 0)), BudgetError);
    EXPECT_EQ(env.time(), 2);
}

TEST(LinearSystemEnv, StateMatchesMatrixPowerUpToTenThousandSteps) {
    const RealMatrix M = permutation_shrink_matrix();
    const RealVector theta = random_unit_vectors(5, 1, 99, RngStream::theta).front();
    LinearSystemEnv env(M, theta, NoiseModel{NoiseKind::uniform, 0.3, 1});
    const RealVector arm = unit(5, 0);
    for (std::int64_t t = 0; t <= 10000; ++t) {
        if (t % 997 == 0 || t == 10000) {
            const ComplexVector expected = matrix_power(M.cast<Complex>(), static_cast<std::uint64_t>(t)) * theta.cast<Complex>();
            EXPECT_LT((env.hidden_state().cast<Complex>() - expected).cwiseAbs().maxCoeff(), 1e-9) << t;
        }
        env.pull(arm);
    }
}

TEST(Environments, DeterministicRewardStreams) {
    auto stream = [](std::uint64_t seed) {
        LinearSystemEnv env(permutation_shrink_matrix(), random_unit_vectors(5, 1, 3, RngStream::theta).front(),
                            NoiseModel{NoiseKind::gaussian, 0.3, seed});
        const auto arms = random_unit_vectors(5, 4, 3);
        std::vector<double> r;
        for (int t = 0; t < 500; ++t) r.push_back(env.pull(arms[static_cast<std::size_t>(t % 4)]));
        return r;
    };
    EXPECT_EQ(stream(5), stream(5));
    EXPECT_NE(stream(5), stream(6));

    auto life = [](std::uint64_t seed) {
        LifeGameEnv env(default_lifegame_fixture(), NoiseModel{NoiseKind::gaussian, 0.3, seed});
        std::vector<double> r;
        for (int t = 0; t < 100; ++t) r.push_back(env.pull(unit(5, t % 5)));
        return r;
    };
    EXPECT_EQ(life(1234), life(1234));
    auto circle = [](std::uint64_t seed) {
        CircleEnv env(CircleParams{}, NoiseModel{NoiseKind::uniform, 0.3, seed});
        std::vector<double> r;
        for (int t = 0; t < 100; ++t) r.push_back(env.pull(unit(2, t % 2)));
        return r;
    };
    EXPECT_EQ(circle(2345), circle(2345));
}

TEST(Environments, NoiseIndependentOfArm) {
    // Same seed, different arms: reward minus signal is the same noise sequence.
    LinearSystemEnv a(RealMatrix::Identity(2, 2), unit(2, 0), NoiseModel{NoiseKind::gaussian, 0.3, 8});
    LinearSystemEnv b(RealMatrix::Identity(2, 2), unit(2, 0), NoiseModel{NoiseKind::gaussian, 0.3, 8});
    for (int t = 0; t < 50; ++t) EXPECT_NEAR(a.pull(unit(2, 0)) - 1.0, b.pull(unit(2, 1)), 1e-15);
}

TEST(LifeGame, RulesOnSmallPatterns) {
    LifeGrid blinker(5, 5);
    for (int c = 1; c <= 3; ++c) blinker.set(2, c, true);
    const auto next = blinker.step();
    EXPECT_TRUE(next.alive(1, 2) && next.alive(2, 2) && next.alive(3, 2));
    EXPECT_FALSE(next.alive(2, 1) || next.alive(2, 3));
    EXPECT_EQ(next.step(), blinker);
    // Out-of-grid cells are dead.
    EXPECT_FALSE(blinker.alive(-1, 0));
    EXPECT_FALSE(blinker.alive(0, 5));
    LifeGrid block(4, 4);
    block.set(0, 0, true);
    block.set(0, 1, true);
    block.set(1, 0, true);
    block.set(1, 1, true);
    EXPECT_EQ(block.step(), block);
    EXPECT_EQ(block.live_neighbours(0, 0), 3);
}

TEST(LifeGame, FixtureHasPeriodEightInEveryObservedCell) {
    const auto fx = default_lifegame_fixture();
    EXPECT_EQ(fx.observed.size(), 5u);
    LifeGrid g = fx.grid;
    LifeGrid start = g;
    int grid_period = 0;
    for (int t = 1; t <= 50; ++t) {
        g = g.step();
        if (g == start) {
            grid_period = t;
            break;
        }
    }
    EXPECT_EQ(grid_period, 8);

    LifeGameEnv env(fx, NoiseModel{});
    std::vector<std::vector<double>> cells(5);
    for (int t = 0; t < 64; ++t) {
        const RealVector s = env.hidden_state();
        EXPECT_LE(s.norm(), std::sqrt(5.0) + 1e-12);
        for (int m = 0; m < 5; ++m) cells[static_cast<std::size_t>(m)].push_back(s(m));
        env.pull(RealVector::Zero(5));
    }
    for (const auto& c : cells) EXPECT_EQ(fundamental_period(c), 8);
}

TEST(LifeGame, NoiselessRewardPeriodDividesEight) {
    for (int m = 0; m < 5; ++m) {
        LifeGameEnv env(default_lifegame_fixture(), NoiseModel{});
        std::vector<double> r;
        for (int t = 0; t < 40; ++t) r.push_back(env.pull(unit(5, m)));
        EXPECT_EQ(8 % fundamental_period(r), 0);
    }
}

TEST(LifeGame, FixtureFileMatchesBuiltIn) {
    const auto file = load_lifegame_fixture(std::string(DYNSPEC_SOURCE_DIR) + "/fixtures/lifegame_period8.txt");
    const auto builtin = default_lifegame_fixture();
    EXPECT_EQ(file.grid, builtin.grid);
    EXPECT_EQ(file.observed, builtin.observed);
}

TEST(LifeGame, FixtureParserErrors) {
    std::istringstream missing_grid("height 3\nwidth 3\nobserved 0,0\n");
    EXPECT_THROW(parse_lifegame_fixture(missing_grid), DataError);
    std::istringstream bad_row("height 2\nwidth 2\nobserved 0,0\ngrid\n.O\n.X\n");
    EXPECT_THROW(parse_lifegame_fixture(bad_row), DataError);
    std::istringstream out_of_grid("height 2\nwidth 2\nobserved 5,0\ngrid\n..\n..\n");
    EXPECT_THROW(parse_lifegame_fixture(out_of_grid), DataError);
    EXPECT_THROW(load_lifegame_fixture("/nonexistent/fixture.txt"), DataError);
}

TEST(Circle, InitialStateAndFirstReward) {
    CircleEnv env(CircleParams{}, NoiseModel{});
    EXPECT_NEAR(env.hidden_state()(0), 1.0, 1e-15);
    EXPECT_NEAR(env.hidden_state()(1), 0.0, 1e-15);
    RealVector x(2);
    x << 1.0, 0.0;
    EXPECT_NEAR(env.pull(x), 1.0, 1e-15);
}

TEST(Circle, RadiusMapStaysInBandAndDefaultIsFixedPoint) {
    const double mu = 0.001;
    EXPECT_EQ(CircleEnv::next_radius(1.0, mu, std::numbers::pi), 1.0);
    double r = 1.0 - mu / 2;
    for (int t = 0; t < 10000; ++t) {
        r = CircleEnv::next_radius(r, mu, std::numbers::pi);
        EXPECT_GT(r, 1.0 - mu);
        EXPECT_LE(r, 1.0);
    }
}

TEST(Circle, TrajectoryIsNearlyPeriodic) {
    CircleParams p;
    p.initial_radius = 1.0 - p.mu / 2;  // off the fixed point, so the radius wobbles
    CircleEnv env(p, NoiseModel{});
    std::vector<RealVector> traj;
    for (int t = 0; t < 3000; ++t) {
        traj.push_back(env.hidden_state());
        env.pull(RealVector::Zero(2));
    }
    double worst = 0.0;
    double wobble = 0.0;
    for (std::size_t s = 0; s < traj.size(); ++s) {
        for (std::size_t u = s + 5; u < traj.size(); u += 5) worst = std::max(worst, (traj[u] - traj[s]).norm());
        if (s > 0) wobble = std::max(wobble, std::abs(traj[s].norm() - traj[0].norm()));
    }
    EXPECT_GT(wobble, 0.0);
    EXPECT_LT(worst, 3.0 * p.mu);
    // The measured bound: both points share the angle, so only the radius differs.
    EXPECT_LT(worst, p.mu);
}

TEST(RandomUnitVectors, NormsAndSymmetry) {
    for (const auto& v : random_unit_vectors(1, 20, 1)) EXPECT_NEAR(std::abs(v(0)), 1.0, 1e-15);
    const auto vs = random_unit_vectors(5, 1000, 42);
    RealVector mean = RealVector::Zero(5);
    double norm_mean = 0.0;
    for (const auto& v : vs) {
        EXPECT_NEAR(v.norm(), 1.0, 1e-12);
        mean += v;
        norm_mean += v.norm();
    }
    mean /= 1000.0;
    EXPECT_NEAR(norm_mean / 1000.0, 1.0, 1e-12);
    EXPECT_LT(mean.cwiseAbs().maxCoeff(), 5.0 / std::sqrt(1000.0));
    EXPECT_EQ(random_unit_vectors(5, 3, 42)[2], vs[2]);
}

TEST(MatrixFixture, ParsesPermutationShrink) {
    const auto M = load_matrix_fixture(std::string(DYNSPEC_SOURCE_DIR) + "/fixtures/permutation_shrink.txt");
    EXPECT_EQ(M, permutation_shrink_matrix());
    std::istringstream ragged("1 0\n0\n");
    EXPECT_THROW(parse_matrix_fixture(ragged), DataError);
    std::istringstream text("1 x\n0 1\n");
    EXPECT_THROW(parse_matrix_fixture(text), DataError);
}

TEST(Padding, EmbedsSystemWithZeros) {
    const auto p = pad_linear_system(permutation_shrink_matrix(), RealVector::Ones(5), 2);
    EXPECT_EQ(p.M.rows(), 7);
    EXPECT_EQ(p.M.topLeftCorner(5, 5), permutation_shrink_matrix());
    EXPECT_EQ(p.M.bottomRows(2).cwiseAbs().sum(), 0.0);
    EXPECT_EQ(p.theta.tail(2).cwiseAbs().sum(), 0.0);
}

TEST(RewardCsv, WritesHeaderAndRows) {
    std::vector<RewardRecord> recs{{1, 1, 0.5}, {2, 2, -0.25}};
    std::ostringstream out;
    write_reward_csv(recs, out);
    EXPECT_EQ(out.str(), "t,arm_id,reward\n1,1,0.5\n2,2,-0.25\n");
}
