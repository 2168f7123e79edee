#pragma once

// Batch front end: flat key = value scenario files, parameter sweeps,
// figure presets and the CSV writer.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "d2dcov/analytic.hpp"
#include "d2dcov/model.hpp"
#include "d2dcov/montecarlo.hpp"

namespace d2dcov {

/// Bad config text, flag or preset name.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

inline double parse_real(const std::string& text, const std::string& what)
{
    if (text == "inf" || text == "infinity") {
        return std::numeric_limits<double>::infinity();
    }
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError(what + ": not a number: '" + text + "'");
    }
    return v;
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& what)
{
    std::uint64_t v = 0;
    const char* first = text.data();
    const char* last = first + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError(what + ": not a non-negative integer: '" + text + "'");
    }
    return v;
}

inline bool parse_bool(const std::string& text, const std::string& what)
{
    if (text == "true" || text == "1" || text == "yes") {
        return true;
    }
    if (text == "false" || text == "0" || text == "no") {
        return false;
    }
    throw ConfigError(what + ": expected true/false, got '" + text + "'");
}

}  // namespace detail

/// Scenario fields that can be set or swept, including the dB-domain aliases.
inline const std::vector<std::string>& scenario_variables()
{
    static const std::vector<std::string> names = {
        "cell_radius_m",  "protection_radius_m", "density_per_m2", "pairing_distance_m", "sir_threshold_lin",
        "tau_db",         "p_cellular_w",        "pc_dbm",         "p_d2d_interferer_w", "pi_dbm",
        "p_d2d_tx_w",     "pd_dbm",              "path_loss_exp",  "power_control",      "fading_rate",
        "n_files",        "zipf_shape",          "field_radius_m",
    };
    return names;
}

inline bool is_scenario_variable(std::string_view name)
{
    const auto& names = scenario_variables();
    return std::find(names.begin(), names.end(), name) != names.end();
}

/// Assign one scenario variable; dB / dBm names are converted here.
inline void apply_setting(ScenarioParams& p, std::string_view name, double value)
{
    if (name == "cell_radius_m") {
        p.cell_radius_m = value;
    } else if (name == "protection_radius_m") {
        p.protection_radius_m = value;
    } else if (name == "density_per_m2") {
        p.density_per_m2 = value;
    } else if (name == "pairing_distance_m") {
        p.pairing_distance_m = value;
    } else if (name == "sir_threshold_lin") {
        p.sir_threshold_lin = value;
    } else if (name == "tau_db") {
        p.sir_threshold_lin = db_to_linear(value);
    } else if (name == "p_cellular_w") {
        p.p_cellular_w = value;
    } else if (name == "pc_dbm") {
        p.p_cellular_w = dbm_to_watts(value);
    } else if (name == "p_d2d_interferer_w") {
        p.p_d2d_interferer_w = value;
    } else if (name == "pi_dbm") {
        p.p_d2d_interferer_w = dbm_to_watts(value);
    } else if (name == "p_d2d_tx_w") {
        p.p_d2d_tx_w = value;
    } else if (name == "pd_dbm") {
        p.p_d2d_tx_w = dbm_to_watts(value);
    } else if (name == "path_loss_exp") {
        p.path_loss_exp = value;
    } else if (name == "power_control") {
        p.power_control = value;
    } else if (name == "fading_rate") {
        p.fading_rate = value;
    } else if (name == "n_files") {
        if (!(value >= 1.0) || value != std::floor(value)) {
            throw ConfigError("n_files must be a positive integer");
        }
        p.n_files = static_cast<std::size_t>(value);
    } else if (name == "zipf_shape") {
        p.zipf_shape = value;
    } else if (name == "field_radius_m") {
        p.field_radius_m = value;
    } else {
        throw ConfigError("unknown scenario variable '" + std::string(name) + "'");
    }
}

enum class BoundChoice { ub, lb, general };

inline BoundChoice parse_bound_choice(const std::string& s)
{
    if (s == "ub") {
        return BoundChoice::ub;
    }
    if (s == "lb") {
        return BoundChoice::lb;
    }
    if (s == "general") {
        return BoundChoice::general;
    }
    throw ConfigError("unknown bound '" + s + "' (expected ub, lb or general)");
}

/// General bounds take the row's zipf_shape.
inline BoundKind resolve_bound(BoundChoice c, const ScenarioParams& p)
{
    switch (c) {
    case BoundChoice::ub:
        return BoundKind::upper();
    case BoundChoice::lb:
        return BoundKind::lower();
    case BoundChoice::general:
        break;
    }
    return BoundKind::general(p.zipf_shape);
}

inline ThinningMode parse_thinning_mode(const std::string& s)
{
    if (s == "independent") {
        return ThinningMode::independent_retention;
    }
    if (s == "nearest") {
        return ThinningMode::nearest_neighbor;
    }
    throw ConfigError("unknown mc mode '" + s + "' (expected independent or nearest)");
}

struct McSpec {
    std::size_t trials = 0;
    std::uint64_t seed = 1;
    ThinningMode mode = ThinningMode::independent_retention;
};

/// One curve of a sweep: fixed overrides applied before the swept variable.
struct Curve {
    std::string label;
    std::vector<std::pair<std::string, double>> overrides;
    std::optional<BoundChoice> rate_bound;
};

struct SweepSpec {
    /// Empty: a single evaluation at the base parameters.
    std::string variable;
    std::vector<double> values;
    std::vector<BoundChoice> bounds = {BoundChoice::ub, BoundChoice::lb};
    std::optional<McSpec> mc;
    bool rate = false;
    BoundChoice rate_bound = BoundChoice::ub;
    std::vector<Curve> curves;
    /// Metadata written as '#' lines at the top of the CSV.
    std::vector<std::string> notes;
    QuadratureSpec quad;
};

/// start:stop:steps[:log] -> grid values (steps >= 2).
inline std::vector<double> parse_grid(const std::string& text)
{
    const auto parts = detail::split(text, ':');
    if (parts.size() != 3 && parts.size() != 4) {
        throw ConfigError("grid must be start:stop:steps[:log], got '" + text + "'");
    }
    const double start = detail::parse_real(parts[0], "grid start");
    const double stop = detail::parse_real(parts[1], "grid stop");
    const auto steps = detail::parse_unsigned(parts[2], "grid steps");
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log") {
        throw ConfigError("grid suffix must be 'log', got '" + parts[3] + "'");
    }
    if (steps < 2) {
        throw ConfigError("grid needs at least 2 steps");
    }
    if (log && !(start > 0.0 && stop > 0.0)) {
        throw ConfigError("log grid needs positive end points");
    }
    std::vector<double> values(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
        values[i] = log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                        : start + t * (stop - start);
    }
    values.back() = stop;
    return values;
}

/// var=start:stop:steps[:log]
inline std::pair<std::string, std::vector<double>> parse_sweep_arg(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("sweep must be var=start:stop:steps[:log], got '" + text + "'");
    }
    std::string var = detail::trim(std::string_view(text).substr(0, eq));
    if (!is_scenario_variable(var)) {
        throw ConfigError("cannot sweep unknown variable '" + var + "'");
    }
    return {var, parse_grid(detail::trim(std::string_view(text).substr(eq + 1)))};
}

struct ScenarioConfig {
    ScenarioParams params;
    SweepSpec sweep;
};

inline std::string violations_text(const std::vector<Violation>& v)
{
    std::string out;
    for (const auto& x : v) {
        if (!out.empty()) {
            out += "; ";
        }
        out += x.field + ": " + x.message;
    }
    return out;
}

/// Parse flat `key = value` text on top of `base`. Unknown keys, malformed
/// lines and invalid scenarios are ConfigErrors carrying the line number or
/// field name.
inline ScenarioConfig parse_config_text(std::string_view text, ScenarioConfig base = {})
{
    ScenarioConfig cfg = std::move(base);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto hash = raw.find('#');
        const std::string line = detail::trim(raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        }
        std::string key = detail::trim(std::string_view(line).substr(0, eq));
        if (key == "epsilon") {
            key = "power_control";
        }
        const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
        const std::string where = "line " + std::to_string(line_no) + " (" + key + ")";
        if (value.empty()) {
            throw ConfigError(where + ": missing value");
        }
        try {
            if (is_scenario_variable(key)) {
                apply_setting(cfg.params, key, detail::parse_real(value, where));
            } else if (key == "sweep") {
                auto [var, values] = parse_sweep_arg(value);
                cfg.sweep.variable = std::move(var);
                cfg.sweep.values = std::move(values);
            } else if (key == "sweep_values") {
                const auto eq2 = value.find('=');
                if (eq2 == std::string::npos) {
                    throw ConfigError(where + ": expected var=v1,v2,...");
                }
                const std::string var = detail::trim(std::string_view(value).substr(0, eq2));
                if (!is_scenario_variable(var)) {
                    throw ConfigError(where + ": cannot sweep unknown variable '" + var + "'");
                }
                cfg.sweep.variable = var;
                cfg.sweep.values.clear();
                for (const auto& v : detail::split(std::string_view(value).substr(eq2 + 1), ',')) {
                    cfg.sweep.values.push_back(detail::parse_real(v, where));
                }
            } else if (key == "bounds") {
                cfg.sweep.bounds.clear();
                for (const auto& b : detail::split(value, ',')) {
                    cfg.sweep.bounds.push_back(parse_bound_choice(b));
                }
            } else if (key == "mc_trials") {
                McSpec mc = cfg.sweep.mc.value_or(McSpec{});
                mc.trials = detail::parse_unsigned(value, where);
                cfg.sweep.mc = mc;
            } else if (key == "mc_mode") {
                McSpec mc = cfg.sweep.mc.value_or(McSpec{});
                mc.mode = parse_thinning_mode(value);
                cfg.sweep.mc = mc;
            } else if (key == "seed") {
                McSpec mc = cfg.sweep.mc.value_or(McSpec{});
                mc.seed = detail::parse_unsigned(value, where);
                cfg.sweep.mc = mc;
            } else if (key == "rate") {
                cfg.sweep.rate = detail::parse_bool(value, where);
            } else if (key == "rate_bound") {
                cfg.sweep.rate_bound = parse_bound_choice(value);
            } else if (key == "quad_rtol") {
                cfg.sweep.quad.rel_tol = detail::parse_real(value, where);
            } else {
                throw ConfigError(where + ": unknown key");
            }
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            throw ConfigError(msg.rfind("line ", 0) == 0 ? msg : where + ": " + msg);
        }
    }
    if (cfg.sweep.mc && cfg.sweep.mc->trials == 0) {
        cfg.sweep.mc.reset();
    }
    const auto violations = validate(cfg.params);
    if (!violations.empty()) {
        throw ConfigError("invalid scenario: " + violations_text(violations));
    }
    return cfg;
}

inline ScenarioConfig parse_config(const std::string& path, ScenarioConfig base = {})
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), std::move(base));
}

// ---------------------------------------------------------------------------
// presets

inline const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names = {"fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"};
    return names;
}

namespace detail {

inline std::vector<double> step_grid(double start, double stop, double step)
{
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::llround((stop - start) / step));
    for (std::size_t i = 0; i <= n; ++i) {
        v.push_back(start + step * static_cast<double>(i));
    }
    return v;
}

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline Curve curve_of(std::vector<std::pair<std::string, double>> overrides)
{
    Curve c;
    for (const auto& [k, v] : overrides) {
        if (!c.label.empty()) {
            c.label += ' ';
        }
        c.label += k + "=" + format_number(v);
    }
    c.overrides = std::move(overrides);
    return c;
}

}  // namespace detail

/// Parameter set and sweep of one figure reproduction. User counts in the
/// presets are turned into densities with lambda = users / (pi R^2).
inline ScenarioConfig preset_figure(const std::string& name)
{
    ScenarioConfig cfg;
    ScenarioParams& p = cfg.params;
    SweepSpec& s = cfg.sweep;
    const double r = p.cell_radius_m;
    auto users = [r](double n) { return density_for_users(n, r); };

    if (name == "fig4") {
        s.variable = "density_per_m2";
        s.values = parse_grid("0.01e-3:0.3e-3:30");
        for (double eps : {0.0, 0.1, 0.25, 0.5}) {
            s.curves.push_back(detail::curve_of({{"power_control", eps}}));
        }
        s.notes = {"fig4: coverage vs density_per_m2",
                   "p_i=1 mW, p_c=0.2 W, r_d=10 m, tau=15 dB, alpha=4; curves over power_control"};
    } else if (name == "fig5") {
        s.variable = "power_control";
        s.values = parse_grid("0:1:21");
        for (double lam : {0.03e-3, 0.1e-3, 0.3e-3, 1e-3}) {
            s.curves.push_back(detail::curve_of({{"density_per_m2", lam}}));
        }
        s.notes = {"fig5: coverage vs power_control",
                   "p_i=1 mW, p_c=0.2 W, r_d=10 m, tau=15 dB, alpha=4; curves over density_per_m2"};
    } else if (name == "fig6" || name == "fig7") {
        p.power_control = name == "fig6" ? 0.0 : 0.25;
        s.variable = "tau_db";
        s.values = detail::step_grid(-5.0, 30.0, 2.5);
        for (double n : {100.0, 250.0, 500.0, 1000.0}) {
            s.curves.push_back(detail::curve_of({{"density_per_m2", users(n)}}));
        }
        s.notes = {name + ": coverage vs tau_db",
                   std::string("p_i=1 mW, p_c=0.2 W, r_d=10 m, alpha=4, power_control=") +
                       (name == "fig6" ? "0" : "0.25") + "; curves for 100/250/500/1000 users"};
    } else if (name == "fig8") {
        p.power_control = 0.25;
        p.density_per_m2 = users(100.0);
        s.variable = "pairing_distance_m";
        s.values = detail::step_grid(1.0, 100.0, 1.0);
        for (double dbm : {-15.0, -10.0, -5.0, 0.0}) {
            s.curves.push_back(detail::curve_of({{"pi_dbm", dbm}}));
        }
        s.notes = {"fig8: coverage vs pairing_distance_m",
                   "p_c=0.2 W, tau=15 dB, alpha=4, power_control=0.25, 100 users; curves over pi_dbm"};
    } else if (name == "fig9") {
        p.p_cellular_w = 0.25;
        p.density_per_m2 = users(250.0);
        p.field_radius_m = r;
        s.variable = "tau_db";
        s.values = detail::step_grid(-5.0, 30.0, 0.5);
        for (double alpha : {1.8, 4.0}) {
            for (double eps : {0.0, 0.25}) {
                s.curves.push_back(detail::curve_of({{"path_loss_exp", alpha}, {"power_control", eps}}));
            }
        }
        s.notes = {"fig9: coverage vs tau_db",
                   "p_c=0.25 W, p_i=1 mW, r_d=10 m, 250 users, interferers confined to the cell; "
                   "curves over (path_loss_exp, power_control)"};
    } else if (name == "fig10") {
        p.density_per_m2 = users(1000.0);
        p.p_d2d_tx_w = 1e-3;
        s.variable = "pc_dbm";
        s.values = detail::step_grid(0.0, 30.0, 1.0);
        s.bounds.clear();
        s.rate = true;
        for (double rd : {10.0, 100.0}) {
            for (BoundChoice b : {BoundChoice::ub, BoundChoice::lb}) {
                Curve c = detail::curve_of({{"pairing_distance_m", rd}});
                c.label += b == BoundChoice::ub ? " rate_bound=ub" : " rate_bound=lb";
                c.rate_bound = b;
                s.curves.push_back(std::move(c));
            }
        }
        s.notes = {"fig10: D2D ergodic rate vs pc_dbm",
                   "p_i=p_d=1 mW, alpha=4, 1000 users; curves over pairing_distance_m and rate bound"};
    } else {
        throw ConfigError("unknown figure preset '" + name + "'");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// sweeps

struct SweepRow {
    std::string curve;
    std::string variable;
    double value = 0.0;
    std::optional<double> p_cov_ub;
    std::optional<double> p_cov_lb;
    std::optional<double> p_cov_general;
    std::optional<double> quad_err;
    std::optional<McEstimate> mc;
    std::optional<double> rate_d2d;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

struct SweepResult {
    std::vector<std::string> notes;
    std::vector<SweepRow> rows;

    bool all_ok() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.ok(); });
    }
};

struct SweepOptions {
    /// Worker threads for rows (analytic only) or for Monte Carlo trials.
    unsigned threads = 0;
};

namespace detail {

inline std::string sanitize_status(std::string s)
{
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') {
            c = ';';
        }
    }
    return s;
}

inline SweepRow evaluate_row(ScenarioParams p, const SweepSpec& spec, const Curve* curve, double value,
                             const SweepOptions& opts)
{
    SweepRow row;
    row.variable = spec.variable;
    row.value = value;
    if (curve) {
        row.curve = curve->label;
    }
    try {
        if (curve) {
            for (const auto& [k, v] : curve->overrides) {
                apply_setting(p, k, v);
            }
        }
        if (!spec.variable.empty()) {
            apply_setting(p, spec.variable, value);
        }
        const auto violations = validate(p);
        if (!violations.empty()) {
            throw ConfigError(violations_text(violations));
        }
        double err = 0.0;
        bool any_quad = false;
        for (BoundChoice b : spec.bounds) {
            const CoverageResult c = coverage_cellular(p, resolve_bound(b, p), spec.quad);
            err = std::max(err, c.error_estimate);
            any_quad = true;
            switch (b) {
            case BoundChoice::ub:
                row.p_cov_ub = c.probability;
                break;
            case BoundChoice::lb:
                row.p_cov_lb = c.probability;
                break;
            case BoundChoice::general:
                row.p_cov_general = c.probability;
                break;
            }
        }
        if (spec.rate) {
            const BoundChoice b = (curve && curve->rate_bound) ? *curve->rate_bound : spec.rate_bound;
            const RateResult r = ergodic_rate_d2d(p, resolve_bound(b, p), spec.quad);
            row.rate_d2d = r.bits_per_hz();
            err = std::max(err, r.error_estimate / std::numbers::ln2);
            any_quad = true;
        }
        if (any_quad) {
            row.quad_err = err;
        }
        if (spec.mc) {
            row.mc = estimate_coverage(p, spec.mc->mode, spec.mc->trials, spec.mc->seed, McOptions{opts.threads});
        }
    } catch (const std::exception& e) {
        row.status = sanitize_status(std::string("failed: ") + e.what());
    }
    return row;
}

}  // namespace detail

/// Evaluate every curve x grid point. Row order follows curve order, then
/// grid order. A failing row is marked in `status`; the rest still run.
inline SweepResult run_sweep(const ScenarioParams& params, const SweepSpec& spec, const SweepOptions& opts = {})
{
    struct Job {
        const Curve* curve;
        double value;
    };
    std::vector<Job> jobs;
    const std::vector<double> single = {0.0};
    const std::vector<double>& values = spec.variable.empty() ? single : spec.values;
    if (spec.curves.empty()) {
        for (double v : values) {
            jobs.push_back({nullptr, v});
        }
    } else {
        for (const auto& c : spec.curves) {
            for (double v : values) {
                jobs.push_back({&c, v});
            }
        }
    }

    SweepResult result;
    result.notes = spec.notes;
    result.rows.resize(jobs.size());

    unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    if (spec.mc) {
        workers = 1;  // trials are already spread over the workers
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs.size(), 1)));
    auto work = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < jobs.size(); i += stride) {
            result.rows[i] = detail::evaluate_row(params, spec, jobs[i].curve, jobs[i].value, opts);
        }
    };
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w, workers);
        }
    }
    return result;
}

inline constexpr std::string_view csv_header =
    "sweep_var,value,p_cov_ub,p_cov_lb,p_cov_general,quad_err,mc_mean,mc_ci_low,mc_ci_high,rate_d2d,status";

/// CSV with '#' metadata lines, the fixed header, and one row per grid
/// point; a '# curve: ...' line precedes each curve's rows. Numbers use
/// 10 significant digits, missing values are blank, lines end in LF.
inline void write_csv(const SweepResult& result, std::ostream& out)
{
    auto num = [](const std::optional<double>& v) { return v ? detail::format_number(*v) : std::string(); };
    for (const auto& n : result.notes) {
        out << "# " << n << '\n';
    }
    out << csv_header << '\n';
    std::string current_curve;
    for (const auto& row : result.rows) {
        if (!row.curve.empty() && row.curve != current_curve) {
            out << "# curve: " << row.curve << '\n';
            current_curve = row.curve;
        }
        out << row.variable << ',' << detail::format_number(row.value) << ',' << num(row.p_cov_ub) << ','
            << num(row.p_cov_lb) << ',' << num(row.p_cov_general) << ',' << num(row.quad_err) << ',';
        if (row.mc) {
            out << detail::format_number(row.mc->mean) << ',' << detail::format_number(row.mc->ci_low()) << ','
                << detail::format_number(row.mc->ci_high()) << ',';
        } else {
            out << ",,,";
        }
        out << num(row.rate_d2d) << ',' << row.status << '\n';
    }
}

inline void write_csv(const SweepResult& result, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_csv(result, out);
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

}  // namespace d2dcov
