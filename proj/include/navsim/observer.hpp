#pragma once

// Full-order LPV observer
//     xh' = (A(rho) + L C_y(rho)) xh - L (y_m - d(rho)) + b(rho)
// scheduled on ranges recovered from the measured bearings.

#include <string_view>

#include "navsim/cr3bp.hpp"
#include "navsim/lft_model.hpp"
#include "navsim/sensing.hpp"

namespace navsim {

enum class RhoSource { Measured, EstimateFallback, Clamped };

std::string_view to_string(RhoSource s) noexcept;
RhoSource rho_source_from_string(std::string_view s);

struct ParamSchedulePolicy {
    double collinearity_threshold = kDefaultCollinearityThreshold;
    bool clamp = true;

    void validate() const;
};

struct RhoSchedule {
    ParamPoint rho;
    RhoSource source = RhoSource::Measured;  // Clamped wins over the origin tag
    bool fallback = false;
    bool clamped = false;
    double one_minus_c2 = 0.0;
    double residual = 0.0;
};

// Ranges from the renormalized measured bearings; on near-collinear or
// non-positive solutions the ranges of the current estimate are used.
// The result is clamped into the box when the policy asks for it.
RhoSchedule schedule_rho(const BearingMeasurement& y_m, const StateVector& x_hat,
                         const ParamSchedulePolicy& policy, const ParamBox& box, MassRatio mu);

Vec6 observer_derivative(const StateVector& x_hat, const Vec6& y_m, const ParamPoint& rho,
                         const Mat6& L, MassRatio mu);

struct ClosedLoopConfig {
    MassRatio mu;
    ParamBox box;
    NoiseModelConfig noise;
    ParamSchedulePolicy policy;
};

struct StepDiagnostics {
    Vec6 error = Vec6::Zero();  // truth - estimate
    Vec6 y_m = Vec6::Zero();
    RhoSchedule schedule;
};

struct StepResult {
    StateVector truth;
    StateVector estimate;
    StepDiagnostics start;  // evaluated at the beginning of the step
};

// Measurement and rho schedule at one instant with the held noise sample.
StepDiagnostics evaluate_sensing(const StateVector& truth, const StateVector& x_hat,
                                 const Vec6& noise, const ClosedLoopConfig& cfg);

// Advances truth and estimate together with one RK4 step. Noise and
// disturbance samples are held across the step; the measurement and rho
// schedule are re-evaluated at every stage from the stage truth state.
StepResult step_closed_loop(const StateVector& truth, const StateVector& x_hat, double t, double dt,
                            const Mat6& L, const Vec6& noise, const Vec3& disturbance,
                            const ClosedLoopConfig& cfg);

}  // namespace navsim
