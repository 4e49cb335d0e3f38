#include "dynspec/config.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <sstream>

#include "dynspec/errors.hpp"

namespace dynspec {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < values.size(); ++i) os << (i ? " " : "") << values[i];
    return os.str();
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
    KeyValueConfig kv;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": key outside a section");
        kv.set(section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return kv;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    return parse(in);
}

void KeyValueConfig::set(const std::string& section, const std::string& key, std::string value) {
    sections_[section][key] = std::move(value);
}

std::optional<std::string> KeyValueConfig::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

double KeyValueConfig::get_double(const std::string& section, const std::string& key, double fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const double out = std::stod(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config [" + section + "] " + key + ": not a number: '" + *v + "'");
    }
}

std::int64_t KeyValueConfig::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
    const auto v = get(section, key);
    if (!v) return fallback;
    try {
        std::size_t used = 0;
        const auto out = std::stoll(*v, &used);
        if (used != v->size()) throw std::invalid_argument("trailing");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config [" + section + "] " + key + ": not an integer: '" + *v + "'");
    }
}

std::string KeyValueConfig::get_string(const std::string& section, const std::string& key, std::string fallback) const {
    return get(section, key).value_or(std::move(fallback));
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    const auto v = get(section, key);
    if (!v) return out;
    std::string item;
    for (char c : *v) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!item.empty()) out.push_back(std::move(item));
            item.clear();
        } else {
            item.push_back(c);
        }
    }
    if (!item.empty()) out.push_back(std::move(item));
    return out;
}

std::string KeyValueConfig::serialize() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [section, keys] : sections_) {
        if (!first) os << '\n';
        first = false;
        os << '[' << section << "]\n";
        for (const auto& [key, value] : keys) os << key << " = " << value << '\n';
    }
    return os.str();
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "period-lifegame") return ExperimentKind::period_lifegame;
    if (name == "period-circle") return ExperimentKind::period_circle;
    if (name == "eigen-permshrink") return ExperimentKind::eigen_permshrink;
    if (name == "property-suite") return ExperimentKind::property_suite;
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::period_lifegame: return "period-lifegame";
        case ExperimentKind::period_circle: return "period-circle";
        case ExperimentKind::eigen_permshrink: return "eigen-permshrink";
        case ExperimentKind::property_suite: return "property-suite";
    }
    return "period-lifegame";
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    switch (kind) {
        case ExperimentKind::period_lifegame:
            cfg.period = PeriodConfig{.rho = 0.98, .delta = 0.2, .L_max = 10, .r_margin = 0.0, .d = 5,
                                      .R = 0.3, .B = std::sqrt(5.0), .budget = std::nullopt};
            cfg.period_noise = NoiseKind::gaussian;
            cfg.expected_period = 8;
            break;
        case ExperimentKind::period_circle:
            cfg.period = PeriodConfig{.rho = 0.3, .delta = 0.2, .L_max = 8, .r_margin = 0.0, .d = 2,
                                      .R = 0.3, .B = 2.0, .budget = std::nullopt};
            cfg.period_noise = NoiseKind::uniform;
            cfg.circle = CircleParams{.mu = 0.001, .alpha = std::numbers::pi, .L = 5,
                                      .initial_radius = 1.0, .initial_angle = 0.0};
            cfg.expected_period = 5;
            break;
        case ExperimentKind::eigen_permshrink:
        case ExperimentKind::property_suite:
            break;
    }
    cfg.eigen = EigenConfig{.N = 9216, .L = 24, .d = 5, .delta = 0.2, .R = 0.3, .Delta = 0.1,
                            .kappa = 6.0, .B = 1.0, .seed = 0, .allow_undersized = false};
    return cfg;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
    const auto kind_name = kv.get("experiment", "kind");
    if (!kind_name) throw ConfigError("config: [experiment] kind is required");
    ExperimentConfig cfg = defaults(parse_experiment_kind(*kind_name));

    if (kv.get("experiment", "seeds")) {
        cfg.seeds.clear();
        for (const auto& s : kv.get_list("experiment", "seeds")) {
            try {
                cfg.seeds.push_back(std::stoull(s));
            } catch (const std::exception&) {
                throw ConfigError("config: bad seed '" + s + "'");
            }
        }
    }
    cfg.output_dir = kv.get_string("experiment", "output_dir", cfg.output_dir);

    auto& p = cfg.period;
    p.rho = kv.get_double("period", "rho", p.rho);
    p.delta = kv.get_double("period", "delta", p.delta);
    p.L_max = kv.get_int("period", "L_max", p.L_max);
    p.r_margin = kv.get_double("period", "r_margin", p.r_margin);
    p.d = kv.get_int("period", "dimension", p.d);
    p.R = kv.get_double("period", "R", p.R);
    p.B = kv.get_double("period", "ball_radius", p.B);
    if (kv.get("period", "budget")) p.budget = kv.get_int("period", "budget", 0);
    if (const auto n = kv.get("period", "noise")) cfg.period_noise = parse_noise_kind(*n);
    cfg.expected_period = kv.get_int("period", "expected_period", cfg.expected_period);
    cfg.anp_check_steps = kv.get_int("period", "anp_check_steps", cfg.anp_check_steps);

    cfg.lifegame_fixture = kv.get_string("lifegame", "fixture", cfg.lifegame_fixture);

    auto& c = cfg.circle;
    c.mu = kv.get_double("circle", "mu", c.mu);
    c.alpha = kv.get_double("circle", "alpha", c.alpha);
    c.L = static_cast<int>(kv.get_int("circle", "L", c.L));
    c.initial_radius = kv.get_double("circle", "initial_radius", c.initial_radius);
    c.initial_angle = kv.get_double("circle", "initial_angle", c.initial_angle);

    auto& e = cfg.eigen;
    e.L = kv.get_int("eigen", "L", e.L);
    e.d = kv.get_int("eigen", "dimension", e.d);
    e.delta = kv.get_double("eigen", "delta", e.delta);
    e.R = kv.get_double("eigen", "R", e.R);
    e.Delta = kv.get_double("eigen", "Delta", e.Delta);
    e.kappa = kv.get_double("eigen", "kappa", e.kappa);
    e.B = kv.get_double("eigen", "ball_radius", e.B);
    if (const auto n = kv.get("eigen", "noise")) cfg.eigen_noise = parse_noise_kind(*n);
    if (kv.get("eigen", "c_sim")) {
        cfg.c_sim.clear();
        for (const auto& s : kv.get_list("eigen", "c_sim")) {
            try {
                cfg.c_sim.push_back(std::stod(s));
            } catch (const std::exception&) {
                throw ConfigError("config: bad c_sim '" + s + "'");
            }
        }
    }
    cfg.matrix_file = kv.get_string("eigen", "matrix_file", cfg.matrix_file);
    if (kv.get("eigen", "tolerance")) {
        cfg.eigen_tolerance.clear();
        for (const auto& item : kv.get_list("eigen", "tolerance")) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) throw ConfigError("config: tolerance entries are c_sim:value");
            cfg.eigen_tolerance[std::stod(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
        }
    }
    if (kv.get("eigen", "reconstruct_r")) cfg.reconstruct_r = kv.get_int("eigen", "reconstruct_r", 0);
    return cfg;
}

KeyValueConfig ExperimentConfig::to_kv() const {
    KeyValueConfig kv;
    kv.set("experiment", "kind", to_string(kind));
    kv.set("experiment", "seeds", join(seeds));
    if (!output_dir.empty()) kv.set("experiment", "output_dir", output_dir);

    if (kind == ExperimentKind::period_lifegame || kind == ExperimentKind::period_circle) {
        kv.set("period", "rho", format_double(period.rho));
        kv.set("period", "delta", format_double(period.delta));
        kv.set("period", "L_max", std::to_string(period.L_max));
        kv.set("period", "r_margin", format_double(period.r_margin));
        kv.set("period", "dimension", std::to_string(period.d));
        kv.set("period", "R", format_double(period.R));
        kv.set("period", "ball_radius", format_double(period.B));
        kv.set("period", "noise", std::string(to_string(period_noise)));
        kv.set("period", "expected_period", std::to_string(expected_period));
        if (period.budget) kv.set("period", "budget", std::to_string(*period.budget));
    }
    if (kind == ExperimentKind::period_lifegame) {
        const auto fx = lifegame_fixture.empty() ? default_lifegame_fixture() : load_lifegame_fixture(lifegame_fixture);
        kv.set("lifegame", "height", std::to_string(fx.grid.height()));
        kv.set("lifegame", "width", std::to_string(fx.grid.width()));
        kv.set("lifegame", "observed_dimension", std::to_string(fx.observed.size()));
        if (!lifegame_fixture.empty()) kv.set("lifegame", "fixture", lifegame_fixture);
    }
    if (kind == ExperimentKind::period_circle) {
        kv.set("period", "anp_check_steps", std::to_string(anp_check_steps));
        kv.set("circle", "mu", format_double(circle.mu));
        kv.set("circle", "alpha", format_double(circle.alpha));
        kv.set("circle", "L", std::to_string(circle.L));
        kv.set("circle", "initial_radius", format_double(circle.initial_radius));
        kv.set("circle", "initial_angle", format_double(circle.initial_angle));
    }
    if (kind == ExperimentKind::eigen_permshrink) {
        kv.set("eigen", "L", std::to_string(eigen.L));
        kv.set("eigen", "dimension", std::to_string(eigen.d));
        kv.set("eigen", "delta", format_double(eigen.delta));
        kv.set("eigen", "R", format_double(eigen.R));
        kv.set("eigen", "Delta", format_double(eigen.Delta));
        kv.set("eigen", "kappa", format_double(eigen.kappa));
        kv.set("eigen", "ball_radius", format_double(eigen.B));
        kv.set("eigen", "noise", std::string(to_string(eigen_noise)));
        kv.set("eigen", "c_sim", join(c_sim));
        std::ostringstream tol;
        tol << std::setprecision(17);
        bool first = true;
        for (const auto& [c, t] : eigen_tolerance) {
            tol << (first ? "" : " ") << c << ':' << t;
            first = false;
        }
        kv.set("eigen", "tolerance", tol.str());
        if (!matrix_file.empty()) kv.set("eigen", "matrix_file", matrix_file);
        if (reconstruct_r) kv.set("eigen", "reconstruct_r", std::to_string(*reconstruct_r));
    }
    return kv;
}

}  // namespace dynspec
