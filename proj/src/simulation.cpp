#include "navsim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "navsim/errors.hpp"
#include "navsim/io.hpp"

namespace navsim {

double SummaryStats::post_position_max() const noexcept {
    return std::max({post_max[0], post_max[1], post_max[2]});
}

int SummaryStats::worst_position_axis() const noexcept {
    int k = 0;
    for (int i = 1; i < 3; ++i) {
        if (post_max[i] > post_max[k]) k = i;
    }
    return k;
}

StatsAccumulator::StatsAccumulator(double settle_time) { s_.settle_time = settle_time; }

void StatsAccumulator::add(double t, const Vec6& e, RhoSource source) {
    const bool post = t > s_.settle_time;
    for (int i = 0; i < 6; ++i) {
        const double a = std::abs(e[i]);
        s_.max_abs[i] = std::max(s_.max_abs[i], a);
        sumsq_[i] += e[i] * e[i];
        if (post) s_.post_max[i] = std::max(s_.post_max[i], a);
    }
    ++s_.samples;
    if (post) ++s_.post_samples;
    if (source == RhoSource::EstimateFallback) ++s_.fallback_count;
    if (source == RhoSource::Clamped) ++s_.clamp_count;
}

SummaryStats StatsAccumulator::finish() const {
    SummaryStats out = s_;
    for (int i = 0; i < 6; ++i) {
        out.rms[i] = out.samples ? std::sqrt(sumsq_[i] / static_cast<double>(out.samples)) : 0.0;
    }
    return out;
}

SynthesisConfig default_synthesis(const Scenario& sc) {
    SynthesisConfig cfg;
    cfg.max_frequency = 1.0 / sc.integrator.step;
    return cfg;
}

ObserverGain synthesize_for_scenario(const Scenario& sc, const SynthesisConfig& cfg) {
    sc.validate();
    const PlantModel model = sc.plant_model();
    ObserverGain g = synthesize_gain(cfg, model);
    g.config_hash = config_hash(cfg, model);
    return g;
}

std::size_t grid_steps(double duration, double dt) {
    return static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
}

RunResult run_scenario(const Scenario& sc, const ObserverGain& gain, double settle_time) {
    sc.validate();
    if (!gain.box.covers(sc.box)) {
        throw BoxMismatch("gain was certified on a parameter box that does not cover the scenario box");
    }
    const ClosedLoopConfig cfg = sc.closed_loop();
    const double dt = sc.integrator.step;
    const std::size_t n = grid_steps(sc.duration_tu, dt);

    ShapedNoiseSource noise(sc.noise);
    DisturbanceGenerator disturbance(sc.disturbance);
    auto draw_noise = [&]() -> Vec6 { return sc.noise.enabled ? noise.next() : Vec6::Zero(); };

    RunResult r;
    r.t.reserve(n + 1);
    r.truth.reserve(n + 1);
    r.estimate.reserve(n + 1);
    r.y_m.reserve(n + 1);
    r.schedule.reserve(n + 1);
    StatsAccumulator acc(settle_time);

    auto record = [&](double t, const StateVector& x, const StateVector& xh, const StepDiagnostics& d) {
        r.t.push_back(t);
        r.truth.push_back(x);
        r.estimate.push_back(xh);
        r.y_m.push_back(d.y_m);
        r.schedule.push_back(d.schedule);
        acc.add(t, x - xh, d.schedule.source);
    };

    StateVector x = sc.initial_state;
    StateVector xh = sc.initial_state - sc.initial_estimate_error;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const Vec6 v = draw_noise();
        const Vec3 w = disturbance.next();
        const StepResult step = step_closed_loop(x, xh, t, dt, gain.L, v, w, cfg);
        record(t, x, xh, step.start);
        x = step.truth;
        xh = step.estimate;
    }
    // Diagnostics for the final row use one more noise draw.
    record(static_cast<double>(n) * dt, x, xh, evaluate_sensing(x, xh, draw_noise(), cfg));
    r.stats = acc.finish();
    return r;
}

namespace {

double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

MonteCarloAggregate aggregate(const std::vector<SummaryStats>& runs) {
    MonteCarloAggregate a;
    a.runs = runs.size();
    if (runs.empty()) return a;
    std::vector<double> pos;
    pos.reserve(runs.size());
    for (const auto& s : runs) {
        for (int i = 0; i < 6; ++i) a.post_max[i] = std::max(a.post_max[i], s.post_max[i]);
        pos.push_back(s.post_position_max());
        ++a.worst_axis_votes[s.worst_position_axis()];
    }
    a.position_max = *std::max_element(pos.begin(), pos.end());
    a.position_median = percentile(pos, 0.5);
    a.position_p95 = percentile(pos, 0.95);
    return a;
}

MonteCarloResult monte_carlo(const Scenario& sc, const ObserverGain& gain, int n_runs, std::uint64_t base_seed,
                             const std::filesystem::path& out_dir, unsigned threads, double settle_time) {
    if (n_runs < 1) throw ValidationError("runs", "must be at least 1");
    if (!gain.box.covers(sc.box)) {
        throw BoxMismatch("gain was certified on a parameter box that does not cover the scenario box");
    }
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
    }

    MonteCarloResult res;
    res.runs.resize(static_cast<std::size_t>(n_runs));
    for (int i = 0; i < n_runs; ++i) res.seeds.push_back(base_seed + static_cast<std::uint64_t>(i));

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n_runs));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < n_runs; i = next++) {
            try {
                const RunResult r = run_scenario(reseed(sc, res.seeds[i]), gain, settle_time);
                if (!out_dir.empty()) {
                    char name[32];
                    std::snprintf(name, sizeof name, "run_%04d.csv", i);
                    export_csv(r, out_dir / name);
                }
                res.runs[i] = r.stats;
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n_runs;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    res.aggregate = aggregate(res.runs);
    return res;
}

}  // namespace navsim
