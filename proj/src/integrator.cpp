#include "navsim/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "navsim/errors.hpp"

namespace navsim {

IntegratorConfig IntegratorConfig::rk4(double step) {
    IntegratorConfig c;
    c.method = IntegratorMethod::Rk4;
    c.step = step;
    return c;
}

IntegratorConfig IntegratorConfig::rkf45(double tol) {
    IntegratorConfig c;
    c.method = IntegratorMethod::Rkf45;
    c.abs_tol = tol;
    c.rel_tol = tol;
    return c;
}

void IntegratorConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError(std::string("integrator.") + name, "must be positive and finite");
        }
    };
    positive(step, "step");
    positive(abs_tol, "abs_tol");
    positive(rel_tol, "rel_tol");
    positive(max_step, "max_step");
    positive(min_step, "min_step");
    if (min_step > max_step) {
        throw ValidationError("integrator.min_step", "exceeds max_step");
    }
}

namespace {

// Fehlberg 4(5) tableau.
constexpr double kC[6] = {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0};
constexpr double kA[6][5] = {
    {0, 0, 0, 0, 0},
    {1.0 / 4.0, 0, 0, 0, 0},
    {3.0 / 32.0, 9.0 / 32.0, 0, 0, 0},
    {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0, 0},
    {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0},
    {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0},
};
constexpr double kB5[6] = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0,
                           2.0 / 55.0};
constexpr double kB4[6] = {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0};

void check_span(double t0, double t1) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) {
        throw ValidationError("t_span", "must be finite and non-decreasing");
    }
}

Trajectory propagate_rk4(const StateVector& s0, double t0, double t1, const IntegratorConfig& cfg,
                         const DisturbanceSource& disturbance, MassRatio mu) {
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(s0);

    const double span = t1 - t0;
    const auto n = static_cast<std::size_t>(std::ceil(span / cfg.step - 1e-9));
    traj.times.reserve(n + 1);
    traj.states.reserve(n + 1);

    StateVector s = s0;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * cfg.step;
        const double t_next = (k + 1 == n) ? t1 : t0 + static_cast<double>(k + 1) * cfg.step;
        const Vec3 d = disturbance ? disturbance(t) : Vec3::Zero();
        auto f = [&](double, const Vec6& y) { return cr3bp_derivative(y, mu, d); };
        s = rk4_step(f, t, s, t_next - t);
        traj.times.push_back(t_next);
        traj.states.push_back(s);
    }
    return traj;
}

Trajectory propagate_rkf45(const StateVector& s0, double t0, double t1, const IntegratorConfig& cfg,
                           const DisturbanceSource& disturbance, MassRatio mu) {
    Trajectory traj;
    traj.times.push_back(t0);
    traj.states.push_back(s0);
    if (t1 == t0) {
        return traj;
    }

    double t = t0;
    StateVector s = s0;
    double h = std::min(cfg.max_step, std::min(1e-3, t1 - t0));

    while (t < t1) {
        h = std::min(h, t1 - t);
        const bool last = (t + h >= t1);
        const Vec3 d = disturbance ? disturbance(t) : Vec3::Zero();

        Vec6 k[6];
        for (int i = 0; i < 6; ++i) {
            Vec6 yi = s;
            for (int j = 0; j < i; ++j) {
                yi += h * kA[i][j] * k[j];
            }
            k[i] = cr3bp_derivative(yi, mu, d);
        }
        Vec6 y5 = s;
        Vec6 y4 = s;
        for (int i = 0; i < 6; ++i) {
            y5 += h * kB5[i] * k[i];
            y4 += h * kB4[i] * k[i];
        }

        double err = 0.0;
        for (int i = 0; i < 6; ++i) {
            const double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(s[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(y5[i] - y4[i]) / scale);
        }
        if (!std::isfinite(err)) {
            throw StepFailure("non-finite error estimate at t=" + std::to_string(t));
        }

        if (err <= 1.0) {
            t = last ? t1 : t + h;
            s = y5;
            traj.times.push_back(t);
            traj.states.push_back(s);
        } else if (h <= cfg.min_step) {
            std::ostringstream os;
            os << "tolerance not met at minimum step " << cfg.min_step << " (t=" << t << ")";
            throw StepFailure(os.str());
        }

        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::clamp(h * factor, cfg.min_step, cfg.max_step);
    }
    return traj;
}

}  // namespace

Trajectory propagate(const StateVector& s0, double t0, double t1, const IntegratorConfig& cfg,
                     const DisturbanceSource& disturbance, MassRatio mu) {
    cfg.validate();
    check_span(t0, t1);
    check_proximity(primary_distances(s0, mu));
    if (cfg.method == IntegratorMethod::Rk4) {
        return propagate_rk4(s0, t0, t1, cfg, disturbance, mu);
    }
    return propagate_rkf45(s0, t0, t1, cfg, disturbance, mu);
}

Trajectory propagate(const StateVector& s0, double t0, double t1, const IntegratorConfig& cfg,
                     MassRatio mu) {
    return propagate(s0, t0, t1, cfg, DisturbanceSource{}, mu);
}

}  // namespace navsim
