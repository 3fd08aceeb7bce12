#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dmatch/config.hpp"
#include "dmatch/csv.hpp"
#include "dmatch/errors.hpp"
#include "dmatch/report.hpp"
#include "dmatch/simulator.hpp"
#include "dmatch/stability.hpp"
#include "dmatch/synthesis.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitConstraint = 2;
constexpr int kExitDiverged = 3;

struct CommonOpts {
    std::string config;
    std::string out_dir = ".";
    std::optional<double> tau_override;
    std::optional<double> step_override;
    bool allow_unstable = false;
};

dmatch::ScenarioFile load(const CommonOpts& opts) {
    auto file = dmatch::parse_scenario_file(opts.config);
    if (opts.tau_override) {
        file.scenario.tau = *opts.tau_override;
    }
    if (opts.step_override) {
        file.scenario.step = *opts.step_override;
    }
    // Delay terms are interpolated from step-spaced history; keep at least
    // ten samples per delay.
    if (file.scenario.tau > 0.0) {
        file.scenario.step = std::min(file.scenario.step, file.scenario.tau / 10.0);
    }
    return file;
}

int run_synth(const CommonOpts& opts) {
    const auto file = load(opts);
    auto report = dmatch::synth_report(file.chi, file.model,
                                       file.scenario.lambda01, file.scenario.lambda11);
    if (!report.constraints.all_pass()) {
        dmatch::print_report(std::cout, report);
        std::cerr << "constraint failed: " << report.constraints.first_failure() << "\n";
        return kExitConstraint;
    }
    const auto pa = dmatch::assemble_pa(file.chi);
    report.verdicts.push_back({file.scenario.tau,
                               dmatch::stability_verdict(pa, file.scenario.tau).stable,
                               dmatch::stability_verdict(pa, file.scenario.tau).margin_metric});
    dmatch::print_report(std::cout, report);
    return kExitOk;
}

int run_simulate(const CommonOpts& opts) {
    const auto file = load(opts);
    auto report = dmatch::synth_report(file.chi, file.model,
                                       file.scenario.lambda01, file.scenario.lambda11);
    if (!report.constraints.all_pass()) {
        dmatch::print_report(std::cout, report);
        std::cerr << "constraint failed: " << report.constraints.first_failure() << "\n";
        return kExitConstraint;
    }
    if (file.scenario.tau >= report.tau_max && !opts.allow_unstable) {
        dmatch::print_report(std::cout, report);
        std::cerr << "tau = " << file.scenario.tau << " s is not below tau_max = "
                  << report.tau_max << " s (use --allow-unstable to run anyway)\n";
        return kExitConstraint;
    }
    const auto sc = file.make_sim_scenario();
    const auto traj = dmatch::integrate_closed_loop(sc);
    report.trajectory = dmatch::summarize_trajectory(traj);
    report.verdicts.push_back(
        {sc.tau,
         dmatch::stability_verdict(dmatch::assemble_pa(file.chi), sc.tau).stable,
         dmatch::stability_verdict(dmatch::assemble_pa(file.chi), sc.tau).margin_metric});

    std::filesystem::path csv = opts.out_dir;
    csv /= file.csv_path.empty() ? "trajectory.csv" : file.csv_path;
    std::filesystem::create_directories(csv.parent_path().empty() ? "." : csv.parent_path());
    dmatch::write_trajectory_csv(traj, csv);
    report.csv_path = csv.string();

    dmatch::print_report(std::cout, report);
    if (traj.diverged) {
        std::cerr << "state overflow at t = " << traj.diverged_at
                  << " s; CSV truncated there\n";
        return kExitDiverged;
    }
    return kExitOk;
}

int run_sweep(const CommonOpts& opts, std::vector<double> taus,
              const std::string& range) {
    if (!range.empty()) {
        double start = 0.0, stop = 0.0, step = 0.0;
        if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3
            || step <= 0.0) {
            std::cerr << "bad --tau-range, expected start:stop:step\n";
            return kExitParse;
        }
        for (double t = start; t <= stop + 1e-12; t += step) {
            taus.push_back(t);
        }
    }
    if (taus.empty()) {
        std::cerr << "sweep needs at least one tau (--tau or --tau-range)\n";
        return kExitParse;
    }
    const auto base = load(opts);
    auto report = dmatch::synth_report(base.chi, base.model,
                                       base.scenario.lambda01, base.scenario.lambda11);
    if (!report.constraints.all_pass()) {
        std::cerr << "constraint failed: " << report.constraints.first_failure() << "\n";
        return kExitConstraint;
    }
    const auto pa = dmatch::assemble_pa(base.chi);
    std::cout.precision(10);
    std::cout << "tau_s,verdict,envelope_rate_1_per_s,max_matching_error,status\n";
    for (double tau : taus) {
        const auto verdict = dmatch::stability_verdict(pa, tau);
        std::cout << tau << "," << (verdict.stable ? "stable" : "unstable") << ",";
        try {
            auto file = base;
            file.scenario.tau = tau;
            if (tau > 0.0) {
                file.scenario.step = std::min(file.scenario.step, tau / 10.0);
            }
            const auto sc = file.make_sim_scenario();
            const auto traj = dmatch::integrate_closed_loop(sc);
            // Envelope rate from the last two 20% windows of |y2 - ref|.
            const std::size_t n = traj.t.size();
            double env_prev = 0.0, env_last = 0.0;
            for (std::size_t i = 3 * n / 5; i < 4 * n / 5; ++i) {
                env_prev = std::max(env_prev, std::abs(traj.err[i]));
            }
            for (std::size_t i = 4 * n / 5; i < n; ++i) {
                env_last = std::max(env_last, std::abs(traj.err[i]));
            }
            const double window = 0.2 * sc.horizon;
            const double rate = (env_prev > 0.0 && env_last > 0.0)
                                    ? std::log(env_last / env_prev) / window
                                    : 0.0;
            std::cout << rate << "," << traj.max_abs_err() << ","
                      << (traj.diverged ? "diverged" : "ok") << "\n";
        } catch (const std::exception& e) {
            std::cout << "," << "," << "error: " << e.what() << "\n";
        }
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delay-dependent model-matching controller synthesis and simulation "
                 "for a remotely controlled differential-drive robot"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::vector<double> sweep_taus;
    std::string sweep_range;

    auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
        auto* c = cmd->add_option("--config", opts.config, "scenario file (TOML-style)");
        if (needs_config) {
            c->required();
        }
        cmd->add_option("--out", opts.out_dir, "output directory");
        cmd->add_option("--step", opts.step_override, "integration step override, s");
    };

    auto* synth = app.add_subcommand("synth", "gains, constraints and delay margin; no simulation");
    add_common(synth);
    synth->add_option("--tau", opts.tau_override, "delay to report a verdict for, s");

    auto* simulate = app.add_subcommand("simulate", "closed-loop simulation, CSV trajectory");
    add_common(simulate);
    simulate->add_option("--tau", opts.tau_override, "delay override, s");
    simulate->add_flag("--allow-unstable", opts.allow_unstable,
                       "simulate even when tau >= tau_max");

    auto* sweep = app.add_subcommand("sweep", "verdict and matching error per delay");
    add_common(sweep);
    sweep->add_option("--tau", sweep_taus, "delays to sweep, s");
    sweep->add_option("--tau-range", sweep_range, "delay range start:stop:step, s");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            return run_synth(opts);
        }
        if (simulate->parsed()) {
            return run_simulate(opts);
        }
        return run_sweep(opts, sweep_taus, sweep_range);
    } catch (const dmatch::ParseError& e) {
        std::cerr << "parse error";
        if (e.line > 0) {
            std::cerr << " (line " << e.line << ")";
        }
        std::cerr << ": " << e.what() << "\n";
        return kExitParse;
    } catch (const dmatch::ConstraintViolation& e) {
        std::cerr << "constraint violation: " << e.what() << "\n";
        return kExitConstraint;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    }
}
