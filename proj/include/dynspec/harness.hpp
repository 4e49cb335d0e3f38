#pragma once

// Experiment orchestration: runs every seed of an ExperimentConfig, evaluates
// the acceptance predicates and renders reports (JSON) and tables (CSV and
// Markdown).

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynspec/checks.hpp"
#include "dynspec/config.hpp"
#include "dynspec/eigen.hpp"
#include "dynspec/period.hpp"

namespace dynspec {

struct PeriodSeedResult {
    std::uint64_t seed = 0;
    std::int64_t beta = 0;
    std::vector<std::int64_t> hit_factors;
    std::int64_t total_pulls = 0;
    std::int64_t samples_per_dimension = 0;
    double eps = 0.0;
    std::optional<bool> anp_confirmed;  // circle only
    bool passed = false;
};

/// One (C_sim, seed) run of the eigenvalue estimator.
struct EigenRunResult {
    double c_sim = 0.0;
    std::uint64_t seed = 0;
    std::int64_t N = 0;
    double gamma = 0.0;
    std::int64_t pulls = 0;
    std::vector<std::complex<double>> spectrum;     // as reported (|lambda| < gamma -> 0)
    std::vector<std::complex<double>> oracle_row;   // distinct set aligned to the table columns, 0 if absent
    std::vector<std::complex<double>> estimate_row; // estimates aligned to the table columns
    double max_error = 0.0;     // over the columns the oracle marks present
    bool absent_zero = false;   // every absent column received an exact 0
    double target_error = 0.0;  // spectral norm against the oracle target matrix
    std::optional<double> tolerance;
    bool passed = false;        // within tolerance (true when no tolerance applies)
};

struct RunReport {
    ExperimentKind kind = ExperimentKind::period_lifegame;
    std::string config_snapshot;  // KeyValueConfig text
    std::vector<std::uint64_t> seeds;
    std::vector<PeriodSeedResult> period_results;
    std::vector<std::complex<double>> eigen_columns;  // eigenvalues of M^d
    std::vector<EigenRunResult> eigen_results;        // ordered by C_sim, then seed
    std::vector<CheckResult> checks;
    std::int64_t total_pulls = 0;
    bool passed = false;
    std::string summary;
    double wall_clock_seconds = 0.0;  // excluded from the reproducible part

    /// Whole report; timing sits under "timing" so it can be dropped.
    nlohmann::json to_json(bool include_timing = true) const;
};

/// Runs one seed of a period experiment.
PeriodSeedResult run_period_seed(const ExperimentConfig& cfg, std::uint64_t seed);

/// Runs the estimator on the configured matrix with theta drawn from
/// theta_seed (default: seed); arms and noise use seed.
EigenRunResult run_eigen_seed(const ExperimentConfig& cfg, double c_sim, std::uint64_t seed,
                              std::optional<std::uint64_t> theta_seed = std::nullopt,
                              EigenEstimate* estimate_out = nullptr);

/// Effective sample size C_sim * min_effective_N, rounded up.
std::int64_t scaled_sample_size(const EigenConfig& cfg, std::int64_t d, double c_sim);

/// Matrix used by eigen experiments (fixture file or the built-in one).
RealMatrix experiment_matrix(const ExperimentConfig& cfg);

/// Initial state for an eigen run: a uniform draw on the unit sphere.
RealVector experiment_theta(std::int64_t d, std::uint64_t seed);

/// Runs all seeds (in parallel), evaluates predicates, and writes artifacts
/// into cfg.output_dir when it is non-empty.
RunReport run_experiment(const ExperimentConfig& cfg);

enum class TableFormat { csv, markdown };

/// Rows per (C_sim, seed) plus reference rows; columns are the eigenvalues of
/// M^d. Throws ConfigError for a non-eigen report.
std::string emit_table(const RunReport& report, TableFormat format);

/// Cells of a table produced by emit_table (header row first).
std::vector<std::vector<std::string>> parse_table(const std::string& text, TableFormat format);

/// "a+bi" with six decimals; negative zero printed as zero.
std::string format_complex(std::complex<double> z);
std::complex<double> parse_complex(const std::string& text);

nlohmann::json to_json(const EigenEstimate& est);
nlohmann::json to_json(const PeriodEstimate& est, bool include_log = false);

/// Writes text to dir/name, creating dir. Throws DataError on failure.
void write_artifact(const std::string& dir, const std::string& name, const std::string& text);

}  // namespace dynspec
