#include "dynspec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>
#include <tuple>

#include "dynspec/errors.hpp"
#include "dynspec/oracles.hpp"

namespace dynspec {
namespace {

using json = nlohmann::json;

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

json complex_list_json(const std::vector<std::complex<double>>& zs) {
    json out = json::array();
    for (const auto& z : zs) out.push_back(complex_json(z));
    return out;
}

json matrix_json(const ComplexMatrix& A) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < A.cols(); ++j) row.push_back(complex_json(A(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Runs fn(0..n-1) on a small pool; results are written by index so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
    std::atomic<std::size_t> next{0};
    std::vector<std::future<void>> futures;
    for (std::size_t w = 0; w < workers; ++w)
        futures.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        }));
    for (auto& f : futures) f.get();
}

// Magnitude descending, then real part descending, then imaginary ascending,
// on a 1e-9 grid so that numerically equal eigenvalues order stably.
std::vector<std::complex<double>> sorted_for_table(std::vector<std::complex<double>> zs) {
    auto key = [](std::complex<double> z) {
        auto q = [](double v) { return std::llround(v * 1e9); };
        return std::make_tuple(-q(std::abs(z)), -q(z.real()), q(z.imag()));
    };
    std::stable_sort(zs.begin(), zs.end(), [&](auto a, auto b) { return key(a) < key(b); });
    return zs;
}

std::vector<std::complex<double>> table_columns(const RealMatrix& M) {
    const auto d = static_cast<std::uint64_t>(M.rows());
    return sorted_for_table(eigenvalues(matrix_power(M.cast<Complex>(), d)));
}

std::string csv_escape_free(const std::string& s) {
    if (s.find_first_of(",\n|") != std::string::npos) throw DataError("table cell contains a separator: " + s);
    return s;
}

}  // namespace

std::string format_complex(std::complex<double> z) {
    auto clean = [](double v) { return std::abs(v) < 5e-7 ? 0.0 : v; };
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f%+.6fi", clean(z.real()), clean(z.imag()));
    return buf;
}

std::complex<double> parse_complex(const std::string& text) {
    if (text.empty() || text.back() != 'i') throw DataError("not a complex number: '" + text + "'");
    // The imaginary part starts at the last sign that is not a leading sign
    // or part of an exponent.
    std::size_t split = std::string::npos;
    for (std::size_t i = text.size() - 1; i > 0; --i) {
        if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) throw DataError("not a complex number: '" + text + "'");
    try {
        return {std::stod(text.substr(0, split)), std::stod(text.substr(split, text.size() - split - 1))};
    } catch (const std::exception&) {
        throw DataError("not a complex number: '" + text + "'");
    }
}

json to_json(const EigenEstimate& est) {
    return json{{"output_matrix", matrix_json(est.output_matrix)},
                {"spectrum", complex_list_json(est.spectrum)},
                {"gamma", est.gamma_used},
                {"N", est.N},
                {"pulls", est.pulls_used},
                {"arm_redraws", est.arm_redraws}};
}

json to_json(const PeriodEstimate& est, bool include_log) {
    json out{{"beta", est.beta},
             {"hit_factors", est.hit_factors},
             {"total_pulls", est.total_pulls},
             {"samples_per_dimension", est.samples_per_dimension},
             {"eps", est.eps}};
    if (include_log) {
        json dims = json::array();
        for (const auto& log : est.per_dimension_log) {
            json tests = json::array();
            for (const auto& t : log)
                tests.push_back({{"beta", t.beta}, {"offset", t.offset}, {"numerator", t.numerator},
                                 {"denominator", t.denominator}, {"magnitude", t.magnitude}, {"hit", t.hit}});
            dims.push_back(std::move(tests));
        }
        out["tests"] = std::move(dims);
    }
    return out;
}

void write_artifact(const std::string& dir, const std::string& name, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory '" + dir + "': " + ec.message());
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw DataError("cannot write '" + path.string() + "'");
}

RealMatrix experiment_matrix(const ExperimentConfig& cfg) {
    return cfg.matrix_file.empty() ? permutation_shrink_matrix() : load_matrix_fixture(cfg.matrix_file);
}

RealVector experiment_theta(std::int64_t d, std::uint64_t seed) {
    return random_unit_vectors(static_cast<std::size_t>(d), 1, seed, RngStream::theta).front();
}

PeriodSeedResult run_period_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
    const NoiseModel noise{cfg.period_noise, cfg.period.R, seed};
    PeriodSeedResult out;
    out.seed = seed;
    PeriodEstimate est;
    if (cfg.kind == ExperimentKind::period_lifegame) {
        auto fixture = cfg.lifegame_fixture.empty() ? default_lifegame_fixture() : load_lifegame_fixture(cfg.lifegame_fixture);
        if (static_cast<std::int64_t>(fixture.observed.size()) != cfg.period.d)
            throw ConfigError("lifegame fixture observes " + std::to_string(fixture.observed.size()) +
                              " cells but dimension is " + std::to_string(cfg.period.d));
        LifeGameEnv env(std::move(fixture), noise);
        est = estimate_period(env, cfg.period);
    } else if (cfg.kind == ExperimentKind::period_circle) {
        if (cfg.period.d != 2) throw ConfigError("circle system has dimension 2");
        CircleEnv env(cfg.circle, noise);
        est = estimate_period(env, cfg.period);

        // The dynamics ignore the arms and the noise, so a noiseless twin
        // replays the hidden trajectory of the run.
        CircleEnv twin(cfg.circle, NoiseModel{});
        std::vector<RealVector> trajectory;
        trajectory.reserve(static_cast<std::size_t>(cfg.anp_check_steps));
        const RealVector zero = RealVector::Zero(2);
        for (std::int64_t t = 0; t < cfg.anp_check_steps; ++t) {
            trajectory.push_back(twin.hidden_state());
            twin.pull(zero);
        }
        out.anp_confirmed = est.beta > 0 && cfg.circle.L % est.beta == 0 &&
                            is_aliquot_nearly_period(trajectory, est.beta, cfg.period.rho, std::numbers::sqrt2,
                                                     cfg.circle.mu, cfg.circle.L);
    } else {
        throw ConfigError("not a period experiment: " + to_string(cfg.kind));
    }
    out.beta = est.beta;
    out.hit_factors = est.hit_factors;
    out.total_pulls = est.total_pulls;
    out.samples_per_dimension = est.samples_per_dimension;
    out.eps = est.eps;
    out.passed = est.beta == cfg.expected_period && out.anp_confirmed.value_or(true);
    return out;
}

std::int64_t scaled_sample_size(const EigenConfig& cfg, std::int64_t d, double c_sim) {
    if (!(c_sim > 0.0)) throw ConfigError("c_sim must be positive");
    const std::int64_t n_min = min_effective_N(cfg.L, d, cfg.Delta, cfg.B, cfg.kappa);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(c_sim * static_cast<double>(n_min) - 1e-9)));
}

EigenRunResult run_eigen_seed(const ExperimentConfig& cfg, double c_sim, std::uint64_t seed,
                              std::optional<std::uint64_t> theta_seed, EigenEstimate* estimate_out) {
    const RealMatrix M = experiment_matrix(cfg);
    const std::int64_t d = M.rows();
    if (d != cfg.eigen.d) throw ConfigError("matrix dimension " + std::to_string(d) + " != configured dimension");
    const RealVector theta = experiment_theta(d, theta_seed.value_or(seed));

    EigenConfig ecfg = cfg.eigen;
    ecfg.N = scaled_sample_size(ecfg, d, c_sim);
    ecfg.seed = seed;
    ecfg.allow_undersized = c_sim < 1.0;
    LinearSystemEnv env(M, theta, NoiseModel{cfg.eigen_noise, ecfg.R, seed});
    const auto est = estimate_eigen_map(env, ecfg);

    EigenRunResult out;
    out.c_sim = c_sim;
    out.seed = seed;
    out.N = est.N;
    out.gamma = est.gamma_used;
    out.pulls = est.pulls_used;
    out.spectrum = sorted_for_table(est.spectrum);

    const auto columns = table_columns(M);
    const auto oracle = distinct_eigen_oracle(M.cast<Complex>(), theta.cast<Complex>(), d, 1.0);
    out.oracle_row.assign(columns.size(), {0.0, 0.0});
    std::vector<bool> present(columns.size(), false);
    for (const auto& p : match_eigenvalues(oracle, columns)) {
        out.oracle_row[p.reference] = oracle[p.estimate];
        present[p.reference] = true;
    }

    std::vector<std::complex<double>> nonzero;
    for (const auto& z : out.spectrum)
        if (z != std::complex<double>(0.0, 0.0)) nonzero.push_back(z);
    std::vector<std::size_t> present_cols;
    std::vector<std::complex<double>> present_vals;
    for (std::size_t c = 0; c < columns.size(); ++c)
        if (present[c]) {
            present_cols.push_back(c);
            present_vals.push_back(out.oracle_row[c]);
        }
    out.estimate_row.assign(columns.size(), {0.0, 0.0});
    std::vector<bool> used(nonzero.size(), false);
    for (const auto& p : match_eigenvalues(nonzero, present_vals)) {
        out.estimate_row[present_cols[p.reference]] = nonzero[p.estimate];
        used[p.estimate] = true;
    }
    // Leftover nonzero estimates land in the absent columns.
    std::size_t next_absent = 0;
    for (std::size_t i = 0; i < nonzero.size(); ++i) {
        if (used[i]) continue;
        while (next_absent < columns.size() && present[next_absent]) ++next_absent;
        if (next_absent < columns.size()) out.estimate_row[next_absent++] = nonzero[i];
    }
    out.absent_zero = true;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (present[c])
            out.max_error = std::max(out.max_error, std::abs(out.estimate_row[c] - out.oracle_row[c]));
        else
            out.absent_zero = out.absent_zero && out.estimate_row[c] == std::complex<double>(0.0, 0.0);
    }
    out.target_error = spectral_norm(oracles::target_matrix(M, theta, est.arms) - est.output_matrix);
    if (estimate_out) *estimate_out = est;

    if (const auto it = cfg.eigen_tolerance.find(c_sim); it != cfg.eigen_tolerance.end()) out.tolerance = it->second;
    out.passed = out.absent_zero && (!out.tolerance || out.max_error <= *out.tolerance);
    return out;
}

json RunReport::to_json(bool include_timing) const {
    json out;
    out["experiment"] = to_string(kind);
    out["config"] = config_snapshot;
    out["seeds"] = seeds;
    out["passed"] = passed;
    out["summary"] = summary;
    out["total_pulls"] = total_pulls;
    if (!period_results.empty()) {
        json rows = json::array();
        for (const auto& r : period_results) {
            json row{{"seed", r.seed},
                     {"beta", r.beta},
                     {"hit_factors", r.hit_factors},
                     {"total_pulls", r.total_pulls},
                     {"samples_per_dimension", r.samples_per_dimension},
                     {"eps", r.eps},
                     {"passed", r.passed}};
            if (r.anp_confirmed) row["anp_confirmed"] = *r.anp_confirmed;
            rows.push_back(std::move(row));
        }
        out["period"] = std::move(rows);
    }
    if (kind == ExperimentKind::eigen_permshrink) {
        out["eigenvalues_of_power"] = complex_list_json(eigen_columns);
        json rows = json::array();
        for (const auto& r : eigen_results) {
            json row{{"c_sim", r.c_sim},
                     {"seed", r.seed},
                     {"N", r.N},
                     {"gamma", r.gamma},
                     {"pulls", r.pulls},
                     {"spectrum", complex_list_json(r.spectrum)},
                     {"oracle_row", complex_list_json(r.oracle_row)},
                     {"estimate_row", complex_list_json(r.estimate_row)},
                     {"max_error", r.max_error},
                     {"absent_zero", r.absent_zero},
                     {"target_error", r.target_error},
                     {"passed", r.passed}};
            if (r.tolerance) row["tolerance"] = *r.tolerance;
            rows.push_back(std::move(row));
        }
        out["eigen"] = std::move(rows);
    }
    if (!checks.empty()) {
        json rows = json::array();
        for (const auto& c : checks) rows.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        out["checks"] = std::move(rows);
    }
    if (include_timing) out["timing"] = {{"wall_clock_seconds", wall_clock_seconds}};
    return out;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    RunReport report;
    report.kind = cfg.kind;
    report.config_snapshot = cfg.to_kv().serialize();
    report.seeds = cfg.seeds;

    std::ostringstream summary;
    switch (cfg.kind) {
        case ExperimentKind::period_lifegame:
        case ExperimentKind::period_circle: {
            cfg.period.validate();
            report.period_results.resize(cfg.seeds.size());
            parallel_for(cfg.seeds.size(),
                         [&](std::size_t i) { report.period_results[i] = run_period_seed(cfg, cfg.seeds[i]); });
            std::size_t ok = 0;
            for (const auto& r : report.period_results) {
                ok += r.passed;
                report.total_pulls += r.total_pulls;
            }
            report.passed = ok == report.period_results.size();
            summary << ok << "/" << report.period_results.size() << " seeds returned beta = " << cfg.expected_period;
            if (cfg.kind == ExperimentKind::period_circle) summary << " with the anp property confirmed";
            break;
        }
        case ExperimentKind::eigen_permshrink: {
            cfg.eigen.validate();
            report.eigen_columns = table_columns(experiment_matrix(cfg));
            std::vector<double> c_values = cfg.c_sim;
            std::sort(c_values.begin(), c_values.end());
            c_values.erase(std::unique(c_values.begin(), c_values.end()), c_values.end());
            std::vector<std::pair<double, std::uint64_t>> jobs;
            for (double c : c_values)
                for (auto seed : cfg.seeds) jobs.emplace_back(c, seed);
            report.eigen_results.resize(jobs.size());
            parallel_for(jobs.size(), [&](std::size_t i) {
                report.eigen_results[i] = run_eigen_seed(cfg, jobs[i].first, jobs[i].second);
            });
            report.passed = true;
            for (double c : c_values) {
                std::size_t ok = 0;
                double worst = 0.0;
                for (const auto& r : report.eigen_results) {
                    if (r.c_sim != c) continue;
                    ok += r.passed;
                    worst = std::max(worst, r.max_error);
                    report.total_pulls += r.pulls;
                }
                const auto tol = cfg.eigen_tolerance.find(c);
                const bool majority = 2 * ok > cfg.seeds.size();
                if (tol != cfg.eigen_tolerance.end()) {
                    report.passed = report.passed && (cfg.seeds.empty() || majority);
                    summary << "C_sim=" << c << ": " << ok << "/" << cfg.seeds.size() << " seeds within "
                            << tol->second << " (worst " << worst << "); ";
                } else {
                    summary << "C_sim=" << c << ": worst " << worst << "; ";
                }
            }
            break;
        }
        case ExperimentKind::property_suite: {
            report.checks = run_property_suite();
            std::size_t ok = 0;
            for (const auto& c : report.checks) ok += c.passed;
            report.passed = ok == report.checks.size();
            summary << ok << "/" << report.checks.size() << " property checks passed";
            break;
        }
    }
    report.summary = summary.str();
    report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!cfg.output_dir.empty()) {
        const auto& dir = cfg.output_dir;
        write_artifact(dir, "config.txt", report.config_snapshot);
        write_artifact(dir, "report.json", report.to_json().dump(2) + "\n");
        if (!report.period_results.empty()) {
            std::ostringstream csv;
            csv << "seed,beta,total_pulls,samples_per_dimension,eps,anp_confirmed,passed\n";
            csv.precision(17);
            for (const auto& r : report.period_results)
                csv << r.seed << ',' << r.beta << ',' << r.total_pulls << ',' << r.samples_per_dimension << ','
                    << r.eps << ',' << (r.anp_confirmed ? (*r.anp_confirmed ? "true" : "false") : "") << ','
                    << (r.passed ? "true" : "false") << '\n';
            write_artifact(dir, "results.csv", csv.str());
        }
        if (cfg.kind == ExperimentKind::eigen_permshrink) {
            write_artifact(dir, "table.csv", emit_table(report, TableFormat::csv));
            write_artifact(dir, "table.md", emit_table(report, TableFormat::markdown));
            std::ostringstream spectra, errors;
            spectra.precision(17);
            errors.precision(17);
            spectra << "c_sim,seed,index,real,imag\n";
            errors << "c_sim,seed,N,gamma,eigenvalue_error,target_error,passed\n";
            for (const auto& r : report.eigen_results) {
                for (std::size_t i = 0; i < r.spectrum.size(); ++i)
                    spectra << r.c_sim << ',' << r.seed << ',' << i << ',' << r.spectrum[i].real() << ','
                            << r.spectrum[i].imag() << '\n';
                errors << r.c_sim << ',' << r.seed << ',' << r.N << ',' << r.gamma << ',' << r.max_error << ','
                       << r.target_error << ',' << (r.passed ? "true" : "false") << '\n';
            }
            write_artifact(dir, "spectra.csv", spectra.str());
            write_artifact(dir, "errors.csv", errors.str());
        }
        if (!report.checks.empty()) {
            std::ostringstream csv;
            csv << "name,passed,detail\n";
            for (const auto& c : report.checks)
                csv << c.name << ',' << (c.passed ? "true" : "false") << ",\"" << c.detail << "\"\n";
            write_artifact(dir, "checks.csv", csv.str());
        }
    }
    return report;
}

std::string emit_table(const RunReport& report, TableFormat format) {
    if (report.kind != ExperimentKind::eigen_permshrink)
        throw ConfigError("emit_table: experiment '" + to_string(report.kind) + "' has no eigenvalue table");
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"row", "c_sim", "seed"};
    for (const auto& z : report.eigen_columns) header.push_back(format_complex(z));
    rows.push_back(header);

    auto values = [](const std::vector<std::complex<double>>& zs) {
        std::vector<std::string> out;
        for (const auto& z : zs) out.push_back(format_complex(z));
        return out;
    };
    // One oracle row per seed, taken from that seed's first run.
    for (auto seed : report.seeds) {
        const auto it = std::find_if(report.eigen_results.begin(), report.eigen_results.end(),
                                     [&](const EigenRunResult& r) { return r.seed == seed; });
        if (it == report.eigen_results.end()) continue;
        std::vector<std::string> row{"oracle", "", std::to_string(seed)};
        for (auto& v : values(it->oracle_row)) row.push_back(std::move(v));
        rows.push_back(std::move(row));
    }
    for (const auto& r : report.eigen_results) {
        std::vector<std::string> row{"estimate", format_number(r.c_sim), std::to_string(r.seed)};
        for (auto& v : values(r.estimate_row)) row.push_back(std::move(v));
        rows.push_back(std::move(row));
    }

    std::ostringstream out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (format == TableFormat::csv) {
            for (std::size_t j = 0; j < rows[i].size(); ++j) out << (j ? "," : "") << csv_escape_free(rows[i][j]);
            out << '\n';
        } else {
            out << '|';
            for (const auto& cell : rows[i]) out << ' ' << csv_escape_free(cell) << " |";
            out << '\n';
            if (i == 0) {
                out << '|';
                for (std::size_t j = 0; j < rows[i].size(); ++j) out << "---|";
                out << '\n';
            }
        }
    }
    return out.str();
}

std::vector<std::vector<std::string>> parse_table(const std::string& text, TableFormat format) {
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(' ');
        if (b == std::string::npos) return std::string{};
        return s.substr(b, s.find_last_not_of(' ') - b + 1);
    };
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        if (format == TableFormat::csv) {
            std::string cell;
            std::istringstream ls(line);
            while (std::getline(ls, cell, ',')) cells.push_back(cell);
            if (line.back() == ',') cells.emplace_back();
        } else {
            if (line.front() != '|' || line.back() != '|') throw DataError("not a markdown table row: " + line);
            if (line.find("---") != std::string::npos) continue;
            std::size_t pos = 1;
            while (pos < line.size()) {
                const auto bar = line.find('|', pos);
                cells.push_back(trim(line.substr(pos, bar - pos)));
                pos = bar + 1;
            }
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

}  // namespace dynspec
