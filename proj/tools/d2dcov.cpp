// d2dcov: coverage / rate sweeps to CSV.
//
//   d2dcov --figure fig7 --out fig7.csv
//   d2dcov --config scenario.cfg --sweep tau_db=-5:30:15 --bound ub --bound lb
//   d2dcov --sweep density_per_m2=3e-5:3e-4:4 --mc-trials 20000 --seed 7

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "d2dcov/cli.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Cellular coverage and D2D rate under a Zipf-marked D2D interferer field"};
    app.set_version_flag("--version", "d2dcov 1.0");

    std::string config_path;
    std::string figure;
    std::string sweep;
    std::vector<std::string> bounds;
    std::size_t mc_trials = 0;
    std::string mc_mode;
    std::uint64_t seed = 0;
    std::string out_path;
    double quad_rtol = 0.0;
    bool rate = false;
    unsigned threads = 0;
    bool list_presets = false;

    app.add_option("--config", config_path, "flat key = value scenario file")->check(CLI::ExistingFile);
    app.add_option("--figure", figure, "figure preset (fig4..fig10)");
    app.add_option("--sweep", sweep, "var=start:stop:steps[:log]");
    app.add_option("--bound", bounds, "ub, lb or general (repeatable)");
    auto* trials_opt = app.add_option("--mc-trials", mc_trials, "Monte Carlo trials per row (0 disables)");
    auto* mode_opt = app.add_option("--mc-mode", mc_mode, "independent or nearest");
    auto* seed_opt = app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out_path, "CSV output path (stdout when omitted)");
    auto* rtol_opt = app.add_option("--quad-rtol", quad_rtol, "relative quadrature tolerance")->check(CLI::PositiveNumber);
    app.add_flag("--rate", rate, "also compute the D2D ergodic rate");
    app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)");
    app.add_flag("--list-presets", list_presets, "print preset names and exit");

    CLI11_PARSE(app, argc, argv);

    if (list_presets) {
        for (const auto& n : d2dcov::preset_names()) {
            std::cout << n << '\n';
        }
        return 0;
    }

    d2dcov::SweepResult result;
    try {
        d2dcov::ScenarioConfig cfg;
        if (!figure.empty()) {
            cfg = d2dcov::preset_figure(figure);
        }
        if (!config_path.empty()) {
            cfg = d2dcov::parse_config(config_path, std::move(cfg));
        }
        if (!sweep.empty()) {
            auto [var, values] = d2dcov::parse_sweep_arg(sweep);
            cfg.sweep.variable = std::move(var);
            cfg.sweep.values = std::move(values);
        }
        if (!bounds.empty()) {
            cfg.sweep.bounds.clear();
            for (const auto& b : bounds) {
                cfg.sweep.bounds.push_back(d2dcov::parse_bound_choice(b));
            }
        }
        if (*trials_opt || *mode_opt || *seed_opt) {
            d2dcov::McSpec mc = cfg.sweep.mc.value_or(d2dcov::McSpec{});
            if (*trials_opt) {
                mc.trials = mc_trials;
            }
            if (*mode_opt) {
                mc.mode = d2dcov::parse_thinning_mode(mc_mode);
            }
            if (*seed_opt) {
                mc.seed = seed;
            }
            if (mc.trials > 0) {
                cfg.sweep.mc = mc;
            } else {
                cfg.sweep.mc.reset();
            }
        }
        if (*rtol_opt) {
            cfg.sweep.quad.rel_tol = quad_rtol;
        }
        if (rate) {
            cfg.sweep.rate = true;
        }
        const auto violations = d2dcov::validate(cfg.params);
        if (!violations.empty()) {
            throw d2dcov::ConfigError("invalid scenario: " + d2dcov::violations_text(violations));
        }
        cfg.sweep.quad.check();

        result = d2dcov::run_sweep(cfg.params, cfg.sweep, d2dcov::SweepOptions{threads});
        if (out_path.empty()) {
            d2dcov::write_csv(result, std::cout);
        } else {
            d2dcov::write_csv(result, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "d2dcov: " << e.what() << '\n';
        return 2;
    }

    if (!result.all_ok()) {
        std::size_t failed = 0;
        for (const auto& row : result.rows) {
            failed += row.ok() ? 0 : 1;
        }
        std::cerr << "d2dcov: " << failed << " of " << result.rows.size() << " rows failed\n";
        return 1;
    }
    return 0;
}
