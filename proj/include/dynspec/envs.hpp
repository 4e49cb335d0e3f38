#pragma once

// Bandit environments: each pull returns f^t(theta)^T x + eta_t and moves
// the hidden system one step forward.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynspec/linalg.hpp"
#include "dynspec/rng.hpp"

namespace dynspec {

enum class NoiseKind { none, gaussian, uniform };

NoiseKind parse_noise_kind(std::string_view name);
std::string_view to_string(NoiseKind kind);

/// Gaussian draws N(0, R^2), uniform draws U[-R, R]; both are R-sub-Gaussian.
struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    double proxy = 0.0;
    std::uint64_t rng_seed = 0;
};

/// One draw per call, on the noise stream of the model's seed.
class NoiseSource {
public:
    explicit NoiseSource(const NoiseModel& model);
    double draw();
    const NoiseModel& model() const noexcept { return model_; }

private:
    NoiseModel model_;
    CounterRng rng_;
    std::normal_distribution<double> gaussian_;
    std::uniform_real_distribution<double> uniform_;
};

class BanditEnvironment {
public:
    virtual ~BanditEnvironment() = default;

    virtual std::size_t dim() const = 0;

    /// f^t(theta) for the current t. Test backdoor; estimators never call it.
    virtual const RealVector& hidden_state() const = 0;

    /// Reward for arm x at the current time, then t <- t + 1.
    /// Throws DomainError on a wrong dimension or an arm outside the unit
    /// ball, BudgetError once the pull limit is reached.
    double pull(std::span<const double> arm);
    double pull(const RealVector& arm) { return pull(std::span<const double>(arm.data(), arm.size())); }

    /// Number of pulls made so far; the reward of pull number t+1 (1-based
    /// global time) is generated from the state at time t.
    std::int64_t time() const noexcept { return t_; }

    void set_pull_limit(std::optional<std::int64_t> limit) noexcept { limit_ = limit; }
    std::optional<std::int64_t> pull_limit() const noexcept { return limit_; }

    static constexpr double kArmBound = 1.0;

protected:
    explicit BanditEnvironment(const NoiseModel& noise) : noise_(noise) {}
    virtual void advance() = 0;

private:
    NoiseSource noise_;
    std::int64_t t_ = 0;
    std::optional<std::int64_t> limit_;
};

/// theta_{t+1} = M theta_t.
class LinearSystemEnv final : public BanditEnvironment {
public:
    LinearSystemEnv(RealMatrix M, RealVector theta, const NoiseModel& noise);

    std::size_t dim() const override { return static_cast<std::size_t>(state_.size()); }
    const RealVector& hidden_state() const override { return state_; }
    const RealMatrix& matrix() const noexcept { return M_; }
    const RealVector& initial_state() const noexcept { return theta0_; }

protected:
    void advance() override {
        scratch_.noalias() = M_ * state_;
        state_.swap(scratch_);
    }

private:
    RealMatrix M_;
    RealVector theta0_;
    RealVector state_;
    RealVector scratch_;
};

/// Block-diagonal embedding diag(M, 0_r) and (theta, 0_r).
struct PaddedSystem {
    RealMatrix M;
    RealVector theta;
};
PaddedSystem pad_linear_system(const RealMatrix& M, const RealVector& theta, std::size_t extra);

struct Cell {
    int row = 0;
    int col = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
};

/// Bounded Life grid: cells outside the grid are permanently dead.
class LifeGrid {
public:
    LifeGrid(int height, int width);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    bool alive(int row, int col) const;
    void set(int row, int col, bool value);
    int live_neighbours(int row, int col) const;

    /// Survive on 2 or 3 live neighbours, birth on exactly 3.
    LifeGrid step() const;

    friend bool operator==(const LifeGrid&, const LifeGrid&) = default;

private:
    int height_;
    int width_;
    std::vector<std::uint8_t> cells_;
};

struct LifeGameFixture {
    LifeGrid grid{12, 12};
    std::vector<Cell> observed;
};

/// Plain-text fixture: `height H`, `width W`, `observed r,c r,c ...`, then a
/// `grid` line followed by H rows of '.' (dead) and 'O' (alive).
LifeGameFixture parse_lifegame_fixture(std::istream& in);
LifeGameFixture load_lifegame_fixture(const std::string& path);

/// Figure-eight oscillator (period 8) on a 12x12 grid with five observed
/// cells in row 4; identical to fixtures/lifegame_period8.txt.
LifeGameFixture default_lifegame_fixture();

class LifeGameEnv final : public BanditEnvironment {
public:
    LifeGameEnv(LifeGameFixture fixture, const NoiseModel& noise);

    std::size_t dim() const override { return observed_.size(); }
    const RealVector& hidden_state() const override { return state_; }
    const LifeGrid& grid() const noexcept { return grid_; }

protected:
    void advance() override;

private:
    void refresh_state();

    LifeGrid grid_;
    std::vector<Cell> observed_;
    RealVector state_;
};

struct CircleParams {
    double mu = 0.001;
    double alpha = 3.14159265358979323846;  // irrational rotation factor
    int L = 5;
    double initial_radius = 1.0;
    double initial_angle = 0.0;
};

/// r_{t+1} = mu (alpha (r_t - 1)/mu - ceil(alpha (r_t - 1)/mu)) + 1,
/// angle_{t+1} = angle_t + 2 pi / L; state (r cos(angle), r sin(angle)).
class CircleEnv final : public BanditEnvironment {
public:
    CircleEnv(const CircleParams& params, const NoiseModel& noise);

    std::size_t dim() const override { return 2; }
    const RealVector& hidden_state() const override { return state_; }
    double radius() const noexcept { return radius_; }
    const CircleParams& params() const noexcept { return params_; }

    static double next_radius(double radius, double mu, double alpha);

protected:
    void advance() override;

private:
    void refresh_state();

    CircleParams params_;
    double radius_;
    std::int64_t step_ = 0;  // angle = initial_angle + 2 pi (step mod L) / L
    RealVector state_;
};

/// The 5x5 permutation-and-shrink matrix: a 3-cycle on coordinates
/// {1,3,4}, a fixed coordinate 2 and a 0.7 contraction on coordinate 5.
RealMatrix permutation_shrink_matrix();

/// Whitespace-separated rows; '#' starts a comment.
RealMatrix parse_matrix_fixture(std::istream& in);
RealMatrix load_matrix_fixture(const std::string& path);

/// Gaussian-normalized draws, uniform on the unit sphere.
std::vector<RealVector> random_unit_vectors(std::size_t d, std::size_t count, std::uint64_t seed,
                                            RngStream stream = RngStream::arms);

struct RewardRecord {
    std::int64_t t = 0;  // 1-based global time
    int arm_id = 0;
    double reward = 0.0;
};

/// Columns t,arm_id,reward.
void write_reward_csv(std::span<const RewardRecord> records, std::ostream& out);

}  // namespace dynspec
