// navsim: synthesize, simulate, propagate, montecarlo, analyze.
//
// Exit codes: 0 ok, 2 configuration/input error, 3 synthesis failure,
// 4 runtime numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "navsim/errors.hpp"
#include "navsim/io.hpp"
#include "navsim/scenario.hpp"
#include "navsim/simulation.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitNumerical = 4;

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace navsim;

    CLI::App app{"Bearing-only LPV observer for cislunar navigation"};
    app.require_subcommand(1);

    std::string scenario_path, gain_path, out_path, csv_path, summary_path, gnuplot_path;
    std::optional<std::uint64_t> seed;
    std::uint64_t base_seed = 1;
    int runs = 20;
    unsigned threads = 0;
    double settle = kDefaultSettleTime;
    int restarts = SynthesisConfig{}.restarts;
    std::uint64_t synth_seed = SynthesisConfig{}.seed;
    std::optional<double> max_frequency;
    double pole_scale = SynthesisConfig{}.pole_scale;

    auto* syn = app.add_subcommand("synthesize", "Grid-certified H-infinity observer gain");
    syn->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    syn->add_option("--out", out_path, "Gain JSON to write")->required();
    syn->add_option("--restarts", restarts, "Compass-search restarts")->check(CLI::PositiveNumber);
    syn->add_option("--seed", synth_seed, "Search ordering seed");
    syn->add_option("--max-frequency", max_frequency,
                    "Cap on closed-loop spectral radius, rad/TU (default 1/step, 0 disables)");
    syn->add_option("--pole-scale", pole_scale, "Decay rate of the Riccati starting gain")->check(CLI::PositiveNumber);

    auto* sim = app.add_subcommand("simulate", "Closed-loop run to CSV");
    sim->add_option("--scenario", scenario_path)->required();
    sim->add_option("--gain", gain_path)->required();
    sim->add_option("--out", out_path, "Run CSV")->required();
    sim->add_option("--seed", seed, "Derive noise and disturbance seeds from N");
    sim->add_option("--summary", summary_path, "Also write summary JSON");
    sim->add_option("--gnuplot", gnuplot_path, "Also write a gnuplot script for the CSV");
    sim->add_option("--settle", settle, "Post-transient start, TU");

    auto* prop = app.add_subcommand("propagate", "Truth-only propagation, no disturbance");
    prop->add_option("--scenario", scenario_path)->required();
    prop->add_option("--out", out_path, "Trajectory CSV")->required();

    auto* mc = app.add_subcommand("montecarlo", "Seeded batch of closed-loop runs");
    mc->add_option("--scenario", scenario_path)->required();
    mc->add_option("--gain", gain_path)->required();
    mc->add_option("--runs", runs)->check(CLI::PositiveNumber);
    mc->add_option("--out", out_path, "Output directory")->required();
    mc->add_option("--seed", base_seed, "Base seed; run i uses base + i");
    mc->add_option("--threads", threads, "Worker threads (0 = all cores)");
    mc->add_option("--settle", settle, "Post-transient start, TU");

    auto* an = app.add_subcommand("analyze", "Recompute statistics from a run CSV");
    an->add_option("csv", csv_path)->required();
    an->add_option("--settle", settle, "Post-transient start, TU");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const auto t0 = std::chrono::steady_clock::now();
        if (*syn) {
            const Scenario sc = load_scenario(scenario_path);
            SynthesisConfig cfg = default_synthesis(sc);
            cfg.restarts = restarts;
            cfg.seed = synth_seed;
            cfg.pole_scale = pole_scale;
            if (max_frequency) cfg.max_frequency = *max_frequency;
            cfg.validate();
            const ObserverGain g = synthesize_for_scenario(sc, cfg);
            save_gain(g, out_path);
            std::printf("gamma_synthesis %.6e\ngamma_validation %.6e\nstability_margin %.6e\n"
                        "evaluations %ld\nelapsed_s %.2f\n",
                        g.gamma_synthesis, g.gamma, g.stability_margin, g.log.evaluations, seconds_since(t0));
        } else if (*sim) {
            Scenario sc = load_scenario(scenario_path);
            if (seed) sc = reseed(sc, *seed);
            const ObserverGain g = load_gain(gain_path);
            const RunResult r = run_scenario(sc, g, settle);
            export_csv(r, out_path);
            if (!summary_path.empty()) export_summary(r.stats, summary_path);
            if (!gnuplot_path.empty()) write_gnuplot_script(out_path, gnuplot_path);
            std::cout << summary_json(r.stats) << '\n';
        } else if (*prop) {
            const Scenario sc = load_scenario(scenario_path);
            const Trajectory traj = propagate(sc.initial_state, 0.0, sc.duration_tu, sc.integrator, sc.mu);
            export_trajectory(traj, sc.mu, out_path);
            const double c0 = jacobi_constant(traj.states.front(), sc.mu);
            double drift = 0.0;
            for (const auto& s : traj.states) drift = std::max(drift, std::abs(jacobi_constant(s, sc.mu) - c0));
            std::printf("samples %zu\njacobi %.17g\nrelative_drift %.3e\nelapsed_s %.3f\n", traj.size(), c0,
                        drift / std::abs(c0), seconds_since(t0));
        } else if (*mc) {
            const Scenario sc = load_scenario(scenario_path);
            const ObserverGain g = load_gain(gain_path);
            const MonteCarloResult res = monte_carlo(sc, g, runs, base_seed, out_path, threads, settle);
            export_summary(res, std::filesystem::path(out_path) / "summary.json");
            const auto& a = res.aggregate;
            std::printf("runs %zu\nposition_max %.6e\nposition_median %.6e\nposition_p95 %.6e\n"
                        "worst_axis_votes x=%d y=%d z=%d\nelapsed_s %.2f\n",
                        a.runs, a.position_max, a.position_median, a.position_p95, a.worst_axis_votes[0],
                        a.worst_axis_votes[1], a.worst_axis_votes[2], seconds_since(t0));
        } else if (*an) {
            std::cout << summary_json(analyze(std::filesystem::path(csv_path), settle)) << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SchemaError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SynthesisFailed& e) {
        std::cerr << "synthesis failed: " << e.what() << '\n';
        return kExitSynthesis;
    } catch (const NotObservable& e) {
        std::cerr << "synthesis failed: " << e.what() << '\n';
        return kExitSynthesis;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
