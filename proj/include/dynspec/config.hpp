#pragma once

// Experiment configuration: a flat key-value text file with one section per
// module. Keys carry the hyperparameter names of the reproduced experiments
// (rho, delta, L_max, mu, alpha, L, R, kappa, Delta, ball_radius).

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynspec/eigen.hpp"
#include "dynspec/envs.hpp"
#include "dynspec/period.hpp"

namespace dynspec {

/// [section] headers, `key = value` lines, '#' comments.
class KeyValueConfig {
public:
    static KeyValueConfig parse(std::istream& in);
    static KeyValueConfig load(const std::string& path);

    void set(const std::string& section, const std::string& key, std::string value);
    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
    std::string get_string(const std::string& section, const std::string& key, std::string fallback) const;
    std::vector<std::string> get_list(const std::string& section, const std::string& key) const;

    /// Sections and keys in sorted order.
    std::string serialize() const;

    const std::map<std::string, std::map<std::string, std::string>>& sections() const noexcept {
        return sections_;
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class ExperimentKind { period_lifegame, period_circle, eigen_permshrink, property_suite };

ExperimentKind parse_experiment_kind(const std::string& name);
std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::period_lifegame;
    std::vector<std::uint64_t> seeds{1234, 2345, 3456, 4567};
    std::string output_dir;  // empty: no files written

    // Period experiments.
    PeriodConfig period;
    NoiseKind period_noise = NoiseKind::gaussian;
    std::int64_t expected_period = 8;
    std::string lifegame_fixture;  // empty: built-in fixture
    CircleParams circle;
    std::int64_t anp_check_steps = 20000;  // trajectory prefix checked for the anp property

    // Eigen experiment.
    EigenConfig eigen;
    NoiseKind eigen_noise = NoiseKind::uniform;
    std::vector<double> c_sim{1, 5, 10, 30};
    std::string matrix_file;  // empty: built-in permutation-shrink matrix
    std::map<double, double> eigen_tolerance{{1.0, 0.03}, {30.0, 0.005}};
    std::optional<std::int64_t> reconstruct_r;

    /// Hyperparameter defaults for a given experiment.
    static ExperimentConfig defaults(ExperimentKind kind);
    /// Starts from defaults(kind in file) and applies every key present.
    static ExperimentConfig from_kv(const KeyValueConfig& kv);
    KeyValueConfig to_kv() const;
};

}  // namespace dynspec
