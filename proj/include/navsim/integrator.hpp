#pragma once

#include <functional>
#include <vector>

#include "navsim/cr3bp.hpp"

namespace navsim {

enum class IntegratorMethod { Rk4, Rkf45 };

struct IntegratorConfig {
    IntegratorMethod method = IntegratorMethod::Rkf45;
    double step = 1e-3;       // RK4 step, TU
    double abs_tol = 1e-12;   // RKF45
    double rel_tol = 1e-12;
    double max_step = 0.05;
    double min_step = 1e-12;

    static IntegratorConfig rk4(double step = 1e-3);
    static IntegratorConfig rkf45(double tol = 1e-12);

    // Throws ValidationError naming the offending field.
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<StateVector> states;

    std::size_t size() const noexcept { return times.size(); }
    const StateVector& back() const { return states.back(); }
};

// Acceleration disturbance, sampled once at the start of each macro-step and
// held across it.
using DisturbanceSource = std::function<Vec3(double t)>;

Trajectory propagate(const StateVector& s0, double t0, double t1, const IntegratorConfig& cfg,
                     const DisturbanceSource& disturbance, MassRatio mu);

// Unperturbed overload.
Trajectory propagate(const StateVector& s0, double t0, double t1, const IntegratorConfig& cfg,
                     MassRatio mu);

// Classic fourth-order Runge-Kutta step for any fixed-size Eigen vector.
template <class Vec, class F>
Vec rk4_step(F&& f, double t, const Vec& y, double h) {
    const Vec k1 = f(t, y);
    const Vec k2 = f(t + 0.5 * h, (y + 0.5 * h * k1).eval());
    const Vec k3 = f(t + 0.5 * h, (y + 0.5 * h * k2).eval());
    const Vec k4 = f(t + h, (y + h * k3).eval());
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace navsim
