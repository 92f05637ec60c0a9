#include "navsim/observer.hpp"

#include <cmath>
#include <string>

#include "navsim/errors.hpp"
#include "navsim/integrator.hpp"

namespace navsim {

std::string_view to_string(RhoSource s) noexcept {
    switch (s) {
        case RhoSource::Measured:
            return "measured";
        case RhoSource::EstimateFallback:
            return "estimate-fallback";
        case RhoSource::Clamped:
            return "clamped";
    }
    return "measured";
}

RhoSource rho_source_from_string(std::string_view s) {
    if (s == "measured") return RhoSource::Measured;
    if (s == "estimate-fallback") return RhoSource::EstimateFallback;
    if (s == "clamped") return RhoSource::Clamped;
    throw SchemaError("unknown rho_source tag '" + std::string(s) + "'");
}

void ParamSchedulePolicy::validate() const {
    if (!(collinearity_threshold > 0.0) || !std::isfinite(collinearity_threshold)) {
        throw ValidationError("schedule_policy.collinearity_threshold", "must be positive");
    }
}

RhoSchedule schedule_rho(const BearingMeasurement& y_m, const StateVector& x_hat,
                         const ParamSchedulePolicy& policy, const ParamBox& box, MassRatio mu) {
    RhoSchedule out;
    RangeSolution sol;
    const auto status = solve_ranges(y_m.e1, y_m.e2, policy.collinearity_threshold, sol);
    out.one_minus_c2 = sol.geom.conditioning;
    if (status == RangeStatus::Ok) {
        out.rho = {sol.r1, sol.r2};
        out.source = RhoSource::Measured;
    } else {
        out.rho = param_point(x_hat, mu);
        out.source = RhoSource::EstimateFallback;
        out.fallback = true;
    }
    if (policy.clamp && !box.contains(out.rho)) {
        out.rho = box.clamp(out.rho);
        out.clamped = true;
        out.source = RhoSource::Clamped;
    }
    out.residual = closure_residual(out.rho.r1, out.rho.r2, y_m.e1.normalized(), y_m.e2.normalized());
    return out;
}

Vec6 observer_derivative(const StateVector& x_hat, const Vec6& y_m, const ParamPoint& rho,
                         const Mat6& L, MassRatio mu) {
    const Mat6 C = measurement_C(rho);
    const Vec6 innovation = C * x_hat + measurement_d(rho, mu) - y_m;
    return plant_A(rho, mu) * x_hat + plant_b(rho, mu) + L * innovation;
}

StepDiagnostics evaluate_sensing(const StateVector& truth, const StateVector& x_hat,
                                 const Vec6& noise, const ClosedLoopConfig& cfg) {
    StepDiagnostics d;
    const auto meas = measure(truth, noise, cfg.noise, cfg.box, cfg.mu);
    d.y_m = meas.stacked();
    d.schedule = schedule_rho(meas, x_hat, cfg.policy, cfg.box, cfg.mu);
    d.error = truth - x_hat;
    return d;
}

StepResult step_closed_loop(const StateVector& truth, const StateVector& x_hat, double t, double dt,
                            const Mat6& L, const Vec6& noise, const Vec3& disturbance,
                            const ClosedLoopConfig& cfg) {
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step_closed_loop: dt must be positive");
    }
    using Vec12 = Eigen::Matrix<double, 12, 1>;

    StepResult out;
    out.start = evaluate_sensing(truth, x_hat, noise, cfg);

    bool first_stage = true;
    auto f = [&](double, const Vec12& y) {
        const StateVector x = y.head<6>();
        const StateVector xh = y.tail<6>();
        const StepDiagnostics sens = first_stage ? out.start : evaluate_sensing(x, xh, noise, cfg);
        first_stage = false;
        Vec12 dy;
        dy.head<6>() = cr3bp_derivative(x, cfg.mu, disturbance);
        dy.tail<6>() = observer_derivative(xh, sens.y_m, sens.schedule.rho, L, cfg.mu);
        return dy;
    };

    Vec12 y;
    y << truth, x_hat;
    const Vec12 next = rk4_step(f, t, y, dt);
    out.truth = next.head<6>();
    out.estimate = next.tail<6>();
    if (!out.truth.allFinite() || !out.estimate.allFinite()) {
        throw StepFailure("non-finite state in closed-loop step at t=" + std::to_string(t));
    }
    return out;
}

}  // namespace navsim
