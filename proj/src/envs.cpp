#include "dynspec/envs.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dynspec/errors.hpp"

namespace dynspec {

NoiseKind parse_noise_kind(std::string_view name) {
    if (name == "none") return NoiseKind::none;
    if (name == "gaussian") return NoiseKind::gaussian;
    if (name == "uniform") return NoiseKind::uniform;
    throw ConfigError("unknown noise kind '" + std::string(name) + "'");
}

std::string_view to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::none: return "none";
        case NoiseKind::gaussian: return "gaussian";
        case NoiseKind::uniform: return "uniform";
    }
    return "none";
}

NoiseSource::NoiseSource(const NoiseModel& model)
    : model_(model),
      rng_(model.rng_seed, RngStream::noise),
      gaussian_(0.0, model.proxy > 0.0 ? model.proxy : 1.0),
      uniform_(-model.proxy, model.proxy) {
    if (!(model.proxy >= 0.0)) throw ConfigError("noise proxy must be nonnegative");
}

double NoiseSource::draw() {
    if (model_.proxy == 0.0) return 0.0;
    switch (model_.kind) {
        case NoiseKind::none: return 0.0;
        case NoiseKind::gaussian: return gaussian_(rng_);
        case NoiseKind::uniform: return uniform_(rng_);
    }
    return 0.0;
}

double BanditEnvironment::pull(std::span<const double> arm) {
    if (arm.size() != dim())
        throw DomainError("pull: arm has dimension " + std::to_string(arm.size()) + ", expected " +
                          std::to_string(dim()));
    double norm_sq = 0.0;
    for (double v : arm) norm_sq += v * v;
    if (!(std::sqrt(norm_sq) <= kArmBound + 1e-9)) throw DomainError("pull: arm outside the unit ball");
    if (limit_ && t_ >= *limit_) throw BudgetError("pull: environment exhausted");
    const auto& state = hidden_state();
    double reward = 0.0;
    for (std::size_t i = 0; i < arm.size(); ++i) reward += state(static_cast<Eigen::Index>(i)) * arm[i];
    reward += noise_.draw();
    advance();
    ++t_;
    return reward;
}

LinearSystemEnv::LinearSystemEnv(RealMatrix M, RealVector theta, const NoiseModel& noise)
    : BanditEnvironment(noise), M_(std::move(M)), theta0_(std::move(theta)), state_(theta0_), scratch_(theta0_.size()) {
    if (M_.rows() != M_.cols()) throw DomainError("LinearSystemEnv: M must be square");
    if (M_.rows() != theta0_.size()) throw DomainError("LinearSystemEnv: theta dimension mismatch");
    if (M_.rows() == 0) throw DomainError("LinearSystemEnv: empty system");
}

PaddedSystem pad_linear_system(const RealMatrix& M, const RealVector& theta, std::size_t extra) {
    const auto d = M.rows();
    const auto n = d + static_cast<Eigen::Index>(extra);
    PaddedSystem out{RealMatrix::Zero(n, n), RealVector::Zero(n)};
    out.M.topLeftCorner(d, d) = M;
    out.theta.head(d) = theta;
    return out;
}

// ---------------------------------------------------------------------------
// LifeGame

LifeGrid::LifeGrid(int height, int width) : height_(height), width_(width) {
    if (height <= 0 || width <= 0) throw DomainError("LifeGrid: empty grid");
    cells_.assign(static_cast<std::size_t>(height * width), 0);
}

bool LifeGrid::alive(int row, int col) const {
    if (row < 0 || row >= height_ || col < 0 || col >= width_) return false;
    return cells_[static_cast<std::size_t>(row * width_ + col)] != 0;
}

void LifeGrid::set(int row, int col, bool value) {
    if (row < 0 || row >= height_ || col < 0 || col >= width_)
        throw DomainError("LifeGrid: cell outside grid");
    cells_[static_cast<std::size_t>(row * width_ + col)] = value ? 1 : 0;
}

int LifeGrid::live_neighbours(int row, int col) const {
    int n = 0;
    for (int dr = -1; dr <= 1; ++dr)
        for (int dc = -1; dc <= 1; ++dc)
            if ((dr != 0 || dc != 0) && alive(row + dr, col + dc)) ++n;
    return n;
}

LifeGrid LifeGrid::step() const {
    LifeGrid next(height_, width_);
    for (int r = 0; r < height_; ++r)
        for (int c = 0; c < width_; ++c) {
            const int n = live_neighbours(r, c);
            next.set(r, c, alive(r, c) ? (n == 2 || n == 3) : n == 3);
        }
    return next;
}

LifeGameFixture parse_lifegame_fixture(std::istream& in) {
    int height = 0, width = 0;
    std::vector<Cell> observed;
    std::vector<std::string> rows;
    bool in_grid = false;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (in_grid) {
            rows.push_back(key);
            continue;
        }
        if (key == "height") {
            ls >> height;
        } else if (key == "width") {
            ls >> width;
        } else if (key == "observed") {
            std::string tok;
            while (ls >> tok) {
                Cell c;
                char comma = 0;
                std::istringstream ts(tok);
                if (!(ts >> c.row >> comma >> c.col) || comma != ',')
                    throw DataError("lifegame fixture: bad observed cell '" + tok + "'");
                observed.push_back(c);
            }
        } else if (key == "grid") {
            in_grid = true;
        } else {
            throw DataError("lifegame fixture: unknown key '" + key + "'");
        }
    }
    if (height <= 0 || width <= 0) throw DataError("lifegame fixture: missing height/width");
    if (static_cast<int>(rows.size()) != height) throw DataError("lifegame fixture: wrong row count");
    LifeGameFixture fx{LifeGrid(height, width), observed};
    for (int r = 0; r < height; ++r) {
        const auto& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) != width) throw DataError("lifegame fixture: wrong row width");
        for (int c = 0; c < width; ++c) {
            const char ch = row[static_cast<std::size_t>(c)];
            if (ch != '.' && ch != 'O') throw DataError("lifegame fixture: bad cell character");
            fx.grid.set(r, c, ch == 'O');
        }
    }
    if (observed.empty()) throw DataError("lifegame fixture: no observed cells");
    for (const auto& c : observed)
        if (c.row < 0 || c.row >= height || c.col < 0 || c.col >= width)
            throw DataError("lifegame fixture: observed cell outside grid");
    return fx;
}

LifeGameFixture load_lifegame_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open fixture '" + path + "'");
    return parse_lifegame_fixture(in);
}

LifeGameFixture default_lifegame_fixture() {
    LifeGameFixture fx{LifeGrid(12, 12), {{4, 2}, {4, 3}, {4, 4}, {4, 5}, {4, 6}}};
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            fx.grid.set(3 + r, 3 + c, true);
            fx.grid.set(6 + r, 6 + c, true);
        }
    return fx;
}

LifeGameEnv::LifeGameEnv(LifeGameFixture fixture, const NoiseModel& noise)
    : BanditEnvironment(noise), grid_(std::move(fixture.grid)), observed_(std::move(fixture.observed)) {
    if (observed_.empty()) throw DomainError("LifeGameEnv: no observed cells");
    refresh_state();
}

void LifeGameEnv::advance() {
    grid_ = grid_.step();
    refresh_state();
}

void LifeGameEnv::refresh_state() {
    state_.resize(static_cast<Eigen::Index>(observed_.size()));
    for (std::size_t i = 0; i < observed_.size(); ++i)
        state_(static_cast<Eigen::Index>(i)) = grid_.alive(observed_[i].row, observed_[i].col) ? 1.0 : 0.0;
}

// ---------------------------------------------------------------------------
// Circle

CircleEnv::CircleEnv(const CircleParams& params, const NoiseModel& noise)
    : BanditEnvironment(noise), params_(params), radius_(params.initial_radius) {
    if (!(params.mu > 0.0)) throw DomainError("CircleEnv: mu must be positive");
    if (params.L < 1) throw DomainError("CircleEnv: L must be positive");
    if (!(params.initial_radius > 0.0)) throw DomainError("CircleEnv: radius must be positive");
    refresh_state();
}

double CircleEnv::next_radius(double radius, double mu, double alpha) {
    const double x = alpha * (radius - 1.0) / mu;
    return mu * (x - std::ceil(x)) + 1.0;
}

void CircleEnv::advance() {
    radius_ = next_radius(radius_, params_.mu, params_.alpha);
    step_ = (step_ + 1) % params_.L;
    refresh_state();
}

void CircleEnv::refresh_state() {
    const double angle = params_.initial_angle +
                         2.0 * std::numbers::pi * static_cast<double>(step_) / static_cast<double>(params_.L);
    state_.resize(2);
    state_(0) = radius_ * std::cos(angle);
    state_(1) = radius_ * std::sin(angle);
}

// ---------------------------------------------------------------------------

RealMatrix permutation_shrink_matrix() {
    RealMatrix M = RealMatrix::Zero(5, 5);
    M(0, 3) = 1.0;
    M(1, 1) = 1.0;
    M(2, 0) = 1.0;
    M(3, 2) = 1.0;
    M(4, 4) = 0.7;
    return M;
}

RealMatrix parse_matrix_fixture(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!ls.eof()) throw DataError("matrix fixture: non-numeric entry");
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("matrix fixture: empty");
    const auto n = rows.size();
    RealMatrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        if (rows[r].size() != n) throw DataError("matrix fixture: matrix must be square");
        for (std::size_t c = 0; c < n; ++c)
            M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return M;
}

RealMatrix load_matrix_fixture(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open fixture '" + path + "'");
    return parse_matrix_fixture(in);
}

std::vector<RealVector> random_unit_vectors(std::size_t d, std::size_t count, std::uint64_t seed,
                                            RngStream stream) {
    if (d == 0) throw DomainError("random_unit_vectors: d must be positive");
    CounterRng rng(seed, stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<RealVector> out;
    out.reserve(count);
    while (out.size() < count) {
        RealVector v(static_cast<Eigen::Index>(d));
        for (auto& x : v) x = normal(rng);
        const double n = v.norm();
        if (n < 1e-300) continue;
        out.push_back(v / n);
    }
    return out;
}

void write_reward_csv(std::span<const RewardRecord> records, std::ostream& out) {
    out << "t,arm_id,reward\n";
    out << std::setprecision(17);
    for (const auto& r : records) out << r.t << ',' << r.arm_id << ',' << r.reward << '\n';
}

}  // namespace dynspec
