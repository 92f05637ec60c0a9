#pragma once

// Closed-loop runs of truth plus observer on the scenario time grid, error
// statistics, and seeded Monte Carlo batches.

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "navsim/hinf.hpp"
#include "navsim/observer.hpp"
#include "navsim/scenario.hpp"

namespace navsim {

inline constexpr double kDefaultSettleTime = 0.5;  // TU

// Error columns ordered x, y, z, vx, vy, vz.
struct SummaryStats {
    std::array<double, 6> max_abs{};
    std::array<double, 6> rms{};
    std::array<double, 6> post_max{};  // t > settle_time
    double settle_time = kDefaultSettleTime;
    std::size_t samples = 0;
    std::size_t post_samples = 0;
    std::size_t fallback_count = 0;
    std::size_t clamp_count = 0;

    // Largest post-transient position component, DU.
    double post_position_max() const noexcept;
    // Index 0..2 of the largest post-transient position component.
    int worst_position_axis() const noexcept;
};

inline double du_to_km(double du) noexcept { return du * kKmPerDu; }

struct RunResult {
    std::vector<double> t;
    std::vector<StateVector> truth;
    std::vector<StateVector> estimate;
    std::vector<Vec6> y_m;
    std::vector<RhoSchedule> schedule;
    SummaryStats stats;

    std::size_t size() const noexcept { return t.size(); }
    Vec6 error(std::size_t k) const { return truth[k] - estimate[k]; }
};

// Accumulates statistics row by row so the online and CSV paths share code.
class StatsAccumulator {
public:
    explicit StatsAccumulator(double settle_time = kDefaultSettleTime);

    // Counts follow the row's rho source tag, which is all a CSV retains.
    void add(double t, const Vec6& error, RhoSource source);
    SummaryStats finish() const;

private:
    SummaryStats s_;
    std::array<double, 6> sumsq_{};
};

// Synthesis defaults for a scenario: the model takes the scenario box and
// noise weights, and the closed-loop spectral radius is capped at 1 / step so
// the fixed-step RK4 loop stays well inside its stability region.
SynthesisConfig default_synthesis(const Scenario& sc);

// synthesize_gain on the scenario model, stamped with the config hash.
ObserverGain synthesize_for_scenario(const Scenario& sc, const SynthesisConfig& cfg);

// Number of closed-loop steps on the fixed grid: floor(duration / dt), with a
// relative slack so 3 / 1e-3 gives 3000.
std::size_t grid_steps(double duration, double dt);

// Closed-loop run with fixed-step RK4 at sc.integrator.step. Noise and
// disturbance are drawn once per step. Throws BoxMismatch when the gain was
// certified on a box that does not cover the scenario box.
RunResult run_scenario(const Scenario& sc, const ObserverGain& gain, double settle_time = kDefaultSettleTime);

struct MonteCarloAggregate {
    std::size_t runs = 0;
    std::array<double, 6> post_max{};   // max over runs
    double position_max = 0.0;          // max over runs of post_position_max
    double position_median = 0.0;
    double position_p95 = 0.0;
    std::array<int, 3> worst_axis_votes{};
};

struct MonteCarloResult {
    std::vector<std::uint64_t> seeds;
    std::vector<SummaryStats> runs;
    MonteCarloAggregate aggregate;
};

MonteCarloAggregate aggregate(const std::vector<SummaryStats>& runs);

// Run i uses reseed(sc, base_seed + i). When out_dir is non-empty each run's
// CSV is written there as run_NNNN.csv. Runs execute on up to `threads`
// workers (0 = hardware concurrency).
MonteCarloResult monte_carlo(const Scenario& sc, const ObserverGain& gain, int n_runs, std::uint64_t base_seed,
                             const std::filesystem::path& out_dir = {}, unsigned threads = 0,
                             double settle_time = kDefaultSettleTime);

}  // namespace navsim
