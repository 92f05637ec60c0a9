#pragma once

// Scenario configuration: initial conditions, integrator, parameter box,
// sensing noise, acceleration disturbance and schedule policy, loaded from
// strictly validated JSON.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "navsim/cr3bp.hpp"
#include "navsim/integrator.hpp"
#include "navsim/lft_model.hpp"
#include "navsim/observer.hpp"
#include "navsim/sensing.hpp"

namespace navsim {

enum class DisturbanceDistribution { Uniform, Gaussian };

struct DisturbanceConfig {
    DisturbanceDistribution distribution = DisturbanceDistribution::Uniform;
    // Uniform: half-width of [-a, a]. Gaussian: standard deviation.
    double amplitude = 0.01;
    std::uint64_t seed = 2;

    void validate() const;
};

// Three independent acceleration components per draw.
class DisturbanceGenerator {
public:
    explicit DisturbanceGenerator(const DisturbanceConfig& cfg);

    Vec3 next();

private:
    DisturbanceConfig cfg_;
    std::mt19937_64 rng_;
};

struct Scenario {
    MassRatio mu;
    StateVector initial_state = (StateVector() << 1.02950089, 0.0, -0.18680810, 0.0, -0.11898000, 0.0)
                                    .finished();
    // x(0) - xh(0)
    Vec6 initial_estimate_error = (Vec6() << 0.26, -0.13, 0.13, 0.68, -0.29, 0.29).finished() * 1e-4;
    double duration_tu = 3.0;
    IntegratorConfig integrator = IntegratorConfig::rkf45();
    ParamBox box;
    NoiseModelConfig noise;
    DisturbanceConfig disturbance;
    ParamSchedulePolicy policy;

    void validate() const;

    PlantModel plant_model() const;
    ClosedLoopConfig closed_loop() const;
};

// Derives both stochastic seeds from a single run seed.
Scenario reseed(Scenario sc, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Missing keys take defaults; unknown keys are rejected.
// Throws ParseError (with byte offset) or ValidationError (dotted field name).
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);

std::string scenario_to_json(const Scenario& sc);

}  // namespace navsim
