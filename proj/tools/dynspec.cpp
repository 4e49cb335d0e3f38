// dynspec: period and eigenvalue estimation from bandit feedback.
//
//   dynspec period --env lifegame|circle|linear ...
//   dynspec eigen --c-sim 1 --c-sim 30 ...
//   dynspec reproduce --experiment period-lifegame|period-circle|eigen-permshrink|property-suite
//   dynspec check --suite properties
//
// Exit codes: 0 pass, 1 acceptance failure (or runtime error), 2 config error.
// Artifacts go to --out, else $DYNSPEC_OUTPUT_ROOT/<name>, else ./dynspec-output/<name>.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dynspec/errors.hpp"
#include "dynspec/harness.hpp"

namespace {

using namespace dynspec;
using json = nlohmann::json;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

std::string output_dir(const std::string& explicit_out, const std::string& name) {
    if (!explicit_out.empty()) return explicit_out;
    const char* root = std::getenv("DYNSPEC_OUTPUT_ROOT");
    const std::filesystem::path base = root && *root ? root : "dynspec-output";
    return (base / name).string();
}

struct PeriodArgs {
    std::string env = "lifegame";
    std::uint64_t seed = 1234;
    std::optional<double> rho, delta, r_margin, R;
    std::optional<std::int64_t> lmax, budget, expected;
    std::optional<std::string> noise;
    std::string fixture, matrix_file, rewards_csv, out;
    std::optional<std::uint64_t> theta_seed;
    std::optional<double> mu, alpha, radius;
    std::optional<int> L;
};

int run_period(const PeriodArgs& a) {
    ExperimentConfig cfg;
    std::unique_ptr<BanditEnvironment> env;
    if (a.env == "lifegame") {
        cfg = ExperimentConfig::defaults(ExperimentKind::period_lifegame);
    } else if (a.env == "circle") {
        cfg = ExperimentConfig::defaults(ExperimentKind::period_circle);
    } else if (a.env == "linear") {
        cfg = ExperimentConfig::defaults(ExperimentKind::period_lifegame);
        cfg.period.B = 1.0;
    } else {
        throw ConfigError("unknown environment '" + a.env + "'");
    }
    auto& p = cfg.period;
    if (a.rho) p.rho = *a.rho;
    if (a.delta) p.delta = *a.delta;
    if (a.r_margin) p.r_margin = *a.r_margin;
    if (a.R) p.R = *a.R;
    if (a.lmax) p.L_max = *a.lmax;
    if (a.budget) p.budget = *a.budget;
    if (a.noise) cfg.period_noise = parse_noise_kind(*a.noise);
    if (a.mu) cfg.circle.mu = *a.mu;
    if (a.alpha) cfg.circle.alpha = *a.alpha;
    if (a.radius) cfg.circle.initial_radius = *a.radius;
    if (a.L) cfg.circle.L = *a.L;
    const NoiseModel noise{cfg.period_noise, p.R, a.seed};

    if (a.env == "lifegame") {
        auto fx = a.fixture.empty() ? default_lifegame_fixture() : load_lifegame_fixture(a.fixture);
        p.d = static_cast<std::int64_t>(fx.observed.size());
        env = std::make_unique<LifeGameEnv>(std::move(fx), noise);
    } else if (a.env == "circle") {
        env = std::make_unique<CircleEnv>(cfg.circle, noise);
    } else {
        const RealMatrix M = a.matrix_file.empty() ? permutation_shrink_matrix() : load_matrix_fixture(a.matrix_file);
        p.d = M.rows();
        env = std::make_unique<LinearSystemEnv>(M, experiment_theta(M.rows(), a.theta_seed.value_or(a.seed)), noise);
    }
    p.validate();

    std::vector<RewardRecord> records;
    const auto est = estimate_period(*env, p, {}, a.rewards_csv.empty() ? nullptr : &records);
    json out = to_json(est);
    out["env"] = a.env;
    out["seed"] = a.seed;
    out["T_p"] = est.samples_per_dimension;

    const auto dir = output_dir(a.out, "period");
    write_artifact(dir, "period.json", out.dump(2) + "\n");
    std::ostringstream spectrum;
    spectrum.precision(17);
    spectrum << "dimension,beta,offset,numerator,denominator,magnitude,hit\n";
    for (std::size_t m = 0; m < est.per_dimension_log.size(); ++m)
        for (const auto& t : est.per_dimension_log[m])
            spectrum << m + 1 << ',' << t.beta << ',' << t.offset << ',' << t.numerator << ',' << t.denominator << ','
                     << t.magnitude << ',' << (t.hit ? "true" : "false") << '\n';
    write_artifact(dir, "spectrum.csv", spectrum.str());
    if (!a.rewards_csv.empty()) {
        std::ofstream csv(a.rewards_csv);
        if (!csv) throw DataError("cannot write '" + a.rewards_csv + "'");
        write_reward_csv(records, csv);
    }
    std::cout << out.dump(2) << '\n';
    if (a.expected && est.beta != *a.expected) {
        std::cerr << "FAIL: beta = " << est.beta << ", expected " << *a.expected << '\n';
        return kExitFail;
    }
    return kExitPass;
}

struct EigenArgs {
    std::string matrix_file, noise = "uniform", out;
    std::optional<std::uint64_t> theta_seed;
    std::uint64_t seed = 1234;
    std::int64_t L = 24;
    std::vector<double> c_sim{1.0};
    double delta = 0.2, R = 0.3, Delta = 0.1, kappa = 6.0, ball_radius = 1.0;
    std::optional<std::int64_t> reconstruct_r;
    std::optional<double> tolerance;
};

int run_eigen(const EigenArgs& a) {
    ExperimentConfig cfg = ExperimentConfig::defaults(ExperimentKind::eigen_permshrink);
    cfg.matrix_file = a.matrix_file;
    const RealMatrix M = experiment_matrix(cfg);
    cfg.eigen.d = M.rows();
    cfg.eigen.L = a.L;
    cfg.eigen.delta = a.delta;
    cfg.eigen.R = a.R;
    cfg.eigen.Delta = a.Delta;
    cfg.eigen.kappa = a.kappa;
    cfg.eigen.B = a.ball_radius;
    cfg.eigen_noise = parse_noise_kind(a.noise);
    cfg.eigen.validate();
    const std::uint64_t theta_seed = a.theta_seed.value_or(a.seed);

    json runs = json::array();
    // Shortest round-trip formatting, so 0.05 stays 0.05.
    std::ostringstream csv;
    csv << "c_sim,eigenvalue_error\n";
    bool ok = true;
    for (double c : a.c_sim) {
        EigenEstimate est;
        const auto r = run_eigen_seed(cfg, c, a.seed, theta_seed, &est);
        json run = to_json(est);
        run["c_sim"] = c;
        run["eigenvalue_error"] = r.max_error;
        run["absent_entries_zero"] = r.absent_zero;
        run["target_error"] = r.target_error;
        runs.push_back(std::move(run));
        csv << json(c).dump() << ',' << json(r.max_error).dump() << '\n';
        if (a.tolerance) ok = ok && r.absent_zero && r.max_error <= *a.tolerance;
    }
    json out{{"seed", a.seed}, {"theta_seed", theta_seed}, {"runs", std::move(runs)}};

    if (a.reconstruct_r) {
        const std::int64_t r = *a.reconstruct_r;
        if (r < 0) throw ConfigError("--reconstruct-r must be nonnegative");
        const RealVector theta = experiment_theta(M.rows(), theta_seed);
        const auto padded = pad_linear_system(M, theta, static_cast<std::size_t>(r));
        EigenConfig ecfg = cfg.eigen;
        ecfg.seed = a.seed;
        ecfg.N = scaled_sample_size(ecfg, M.rows() + r, a.c_sim.back());
        LinearSystemEnv env(padded.M, padded.theta, NoiseModel{cfg.eigen_noise, a.R, a.seed});
        const auto rec = reconstruct_unit_eigenvalues(env, ecfg, r);
        json vals = json::array();
        for (const auto& z : rec.eigenvalues) vals.push_back(format_complex(z));
        json oracle = json::array();
        for (const auto& z : distinct_eigen_oracle(M.cast<Complex>(), theta.cast<Complex>(), 1, 1.0))
            oracle.push_back(format_complex(z));
        out["reconstruction"] = {{"r", r}, {"power", rec.power}, {"N", rec.estimate.N},
                                 {"eigenvalues", std::move(vals)}, {"oracle", std::move(oracle)}};
    }

    const auto dir = output_dir(a.out, "eigen");
    write_artifact(dir, "eigen.json", out.dump(2) + "\n");
    write_artifact(dir, "rate.csv", csv.str());
    std::cout << out.dump(2) << '\n';
    return ok ? kExitPass : kExitFail;
}

int run_reproduce(const std::string& experiment, const std::string& config_path, const std::string& out,
                  const std::vector<std::uint64_t>& seeds) {
    ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = ExperimentConfig::from_kv(KeyValueConfig::load(config_path));
        if (!experiment.empty() && parse_experiment_kind(experiment) != cfg.kind)
            throw ConfigError("--experiment " + experiment + " disagrees with config kind " + to_string(cfg.kind));
    } else {
        if (experiment.empty()) throw ConfigError("reproduce needs --experiment or --config");
        cfg = ExperimentConfig::defaults(parse_experiment_kind(experiment));
    }
    if (!seeds.empty()) cfg.seeds = seeds;
    cfg.output_dir = output_dir(out.empty() ? cfg.output_dir : out, to_string(cfg.kind));

    const auto report = run_experiment(cfg);
    for (const auto& r : report.period_results)
        std::cout << "seed " << r.seed << ": beta = " << r.beta
                  << (r.anp_confirmed ? (*r.anp_confirmed ? " (anp confirmed)" : " (anp NOT confirmed)") : "")
                  << '\n';
    if (report.kind == ExperimentKind::eigen_permshrink) std::cout << emit_table(report, TableFormat::markdown);
    for (const auto& c : report.checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    std::cout << (report.passed ? "PASS " : "FAIL ") << to_string(report.kind) << ": " << report.summary << '\n'
              << "artifacts: " << cfg.output_dir << '\n';
    return report.passed ? kExitPass : kExitFail;
}

int run_check(const std::string& suite) {
    if (suite != "properties") throw ConfigError("unknown suite '" + suite + "'");
    bool ok = true;
    for (const auto& c : run_property_suite()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    return ok ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Period and eigenvalue estimation for dynamical systems under bandit feedback"};
    app.require_subcommand(1);

    PeriodArgs pa;
    auto* period = app.add_subcommand("period", "Estimate an aliquot nearly period");
    period->add_option("--env", pa.env, "lifegame, circle or linear")
        ->check(CLI::IsMember({"lifegame", "circle", "linear"}));
    period->add_option("--seed", pa.seed, "noise seed");
    period->add_option("--rho", pa.rho, "accuracy");
    period->add_option("--delta", pa.delta, "failure probability");
    period->add_option("--lmax", pa.lmax, "largest admissible period");
    period->add_option("--r-margin", pa.r_margin, "margin r with r*eps >= mu");
    period->add_option("--budget", pa.budget, "pull budget");
    period->add_option("--R", pa.R, "noise proxy");
    period->add_option("--noise", pa.noise, "gaussian, uniform or none");
    period->add_option("--fixture", pa.fixture, "LifeGame fixture file");
    period->add_option("--matrix-file", pa.matrix_file, "matrix for --env linear");
    period->add_option("--theta-seed", pa.theta_seed, "initial state seed for --env linear");
    period->add_option("--mu", pa.mu, "circle wobble scale");
    period->add_option("--alpha", pa.alpha, "circle rotation factor");
    period->add_option("--L", pa.L, "circle period");
    period->add_option("--initial-radius", pa.radius, "circle initial radius");
    period->add_option("--expected", pa.expected, "fail (exit 1) unless beta equals this");
    period->add_option("--rewards-csv", pa.rewards_csv, "write the reward stream here");
    period->add_option("--out", pa.out, "output directory");

    EigenArgs ea;
    auto* eigen = app.add_subcommand("eigen", "Estimate unit-circle eigenvalues of M^d");
    eigen->add_option("--matrix-file", ea.matrix_file, "matrix fixture (default: permutation-and-shrink)");
    eigen->add_option("--theta-seed", ea.theta_seed, "initial state seed (default: --seed)");
    eigen->add_option("--L", ea.L, "nearly-period length");
    eigen->add_option("--c-sim", ea.c_sim, "multiples of the minimal effective sample size");
    eigen->add_option("--delta", ea.delta, "failure probability");
    eigen->add_option("--R", ea.R, "noise proxy");
    eigen->add_option("--noise", ea.noise, "gaussian, uniform or none")
        ->check(CLI::IsMember({"gaussian", "uniform", "none"}));
    eigen->add_option("--seed", ea.seed, "arm and noise seed");
    eigen->add_option("--Delta", ea.Delta, "spectral gap");
    eigen->add_option("--kappa", ea.kappa, "conditioning");
    eigen->add_option("--ball-radius", ea.ball_radius, "trajectory bound");
    eigen->add_option("--reconstruct-r", ea.reconstruct_r, "pad by r and recover eigenvalues of M");
    eigen->add_option("--tolerance", ea.tolerance, "fail (exit 1) above this eigenvalue error");
    eigen->add_option("--out", ea.out, "output directory");

    std::string experiment, config_path, reproduce_out;
    std::vector<std::uint64_t> seeds;
    auto* reproduce = app.add_subcommand("reproduce", "Run a full experiment and its acceptance predicate");
    reproduce->add_option("--experiment", experiment, "period-lifegame, period-circle, eigen-permshrink or property-suite");
    reproduce->add_option("--config", config_path, "key-value config file");
    reproduce->add_option("--seeds", seeds, "override the seed list");
    reproduce->add_option("--out", reproduce_out, "output directory");

    std::string suite = "properties";
    auto* check = app.add_subcommand("check", "Run a check suite");
    check->add_option("--suite", suite, "suite name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    }

    try {
        if (*period) return run_period(pa);
        if (*eigen) return run_eigen(ea);
        if (*reproduce) return run_reproduce(experiment, config_path, reproduce_out, seeds);
        if (*check) return run_check(suite);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const BudgetError& e) {
        std::cerr << "budget exhausted: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFail;
    }
    return kExitFail;
}
