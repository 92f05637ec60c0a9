#pragma once

// Independent reference computations for the H-infinity tests: plain SVD of
// the frequency response, dense log sweeps, and time-domain sinusoid runs.

#include <cmath>
#include <complex>
#include <random>
#include <utility>

#include <Eigen/Dense>

#include "navsim/hinf.hpp"

namespace navsim::test {

using Cx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline CMat freq_response(const StateSpace& s, double w) {
    const auto n = s.A.rows();
    CMat M = CMat::Identity(n, n) * Cx(0.0, w) - s.A.cast<Cx>();
    return s.C.cast<Cx>() * M.partialPivLu().solve(s.B.cast<Cx>()) + s.D.cast<Cx>();
}

inline double sigma_svd(const StateSpace& s, double w) {
    Eigen::JacobiSVD<CMat> svd(freq_response(s, w));
    return svd.singularValues()(0);
}

// wn^2 / (s^2 + 2 zeta wn s + wn^2)
inline StateSpace resonant(double zeta, double wn) {
    StateSpace s{Eigen::MatrixXd(2, 2), Eigen::MatrixXd(2, 1), Eigen::MatrixXd(1, 2), Eigen::MatrixXd::Zero(1, 1)};
    s.A << 0, 1, -wn * wn, -2 * zeta * wn;
    s.B << 0, wn * wn;
    s.C << 1, 0;
    return s;
}

inline StateSpace random_stable(std::mt19937_64& rng, int n, int m, int p) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    StateSpace s{Eigen::MatrixXd(n, n), Eigen::MatrixXd(n, m), Eigen::MatrixXd(p, n), Eigen::MatrixXd::Zero(p, m)};
    for (int i = 0; i < s.A.size(); ++i) s.A.data()[i] = g(rng);
    for (int i = 0; i < s.B.size(); ++i) s.B.data()[i] = g(rng);
    for (int i = 0; i < s.C.size(); ++i) s.C.data()[i] = g(rng);
    if (u(rng) > 0.5) {
        for (int i = 0; i < s.D.size(); ++i) s.D.data()[i] = 0.3 * g(rng);
    }
    const double shift = Eigen::EigenSolver<Eigen::MatrixXd>(s.A).eigenvalues().real().maxCoeff() + u(rng);
    s.A -= shift * Eigen::MatrixXd::Identity(n, n);
    return s;
}

struct SweepPeak {
    double omega = 0.0;
    double gain = 0.0;
};

// Log sweep spanning three decades beyond the modal frequencies, plus w = 0,
// then golden-section refinement between the neighbours of the best point.
inline SweepPeak sweep_peak_oracle(const StateSpace& s, int points) {
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(s.A).eigenvalues();
    const double lo = std::max(1e-12, ev.cwiseAbs().minCoeff()) * 1e-3;
    const double hi = ev.cwiseAbs().maxCoeff() * 1e3 + 1e-9;
    SweepPeak best{0.0, sigma_svd(s, 0.0)};
    const double step_ratio = std::pow(hi / lo, 1.0 / (points - 1));
    int best_k = -1;
    for (int k = 0; k < points; ++k) {
        const double w = lo * std::pow(step_ratio, k);
        const double g = sigma_svd(s, w);
        if (g > best.gain) {
            best = {w, g};
            best_k = k;
        }
    }
    if (best_k >= 0) {
        double a = best.omega / step_ratio, b = best.omega * step_ratio;
        const double phi = 0.5 * (std::sqrt(5.0) - 1);
        for (int it = 0; it < 100; ++it) {
            const double c = b - phi * (b - a), d = a + phi * (b - a);
            if (sigma_svd(s, c) > sigma_svd(s, d)) {
                b = d;
            } else {
                a = c;
            }
        }
        const double w = 0.5 * (a + b);
        const double g = sigma_svd(s, w);
        if (g > best.gain) best = {w, g};
    }
    return best;
}

inline double sweep_oracle(const StateSpace& s, int points) { return sweep_peak_oracle(s, points).gain; }

// Worst frequency and the matching right singular vector.
inline std::pair<double, CVec> worst_direction(const StateSpace& s, int points = 10000) {
    const SweepPeak pk = sweep_peak_oracle(s, points);
    Eigen::JacobiSVD<CMat> svd(freq_response(s, pk.omega), Eigen::ComputeFullV);
    return {pk.omega, svd.matrixV().col(0)};
}

// Drives x' = A x + B u with u_i(t) = |v_i| cos(w t + arg v_i) by RK4 until
// transients have died out, then returns RMS(y) / RMS(u) over whole periods.
inline double sinusoid_rms_gain(const StateSpace& s, double w, const CVec& v) {
    const auto n = s.A.rows();
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(s.A).eigenvalues();
    const double decay = -ev.real().maxCoeff();
    const double fastest = ev.cwiseAbs().maxCoeff();
    auto input = [&](double t) {
        Eigen::VectorXd u(v.size());
        for (int i = 0; i < v.size(); ++i) u[i] = std::abs(v[i]) * std::cos(w * t + std::arg(v[i]));
        return u;
    };
    const double period = w > 0 ? 2 * M_PI / w : 1.0;
    double h = 0.2 / fastest;
    if (w > 0) h = std::min(h, period / 200);
    const double settle = 40.0 / decay;
    const int periods = 5;
    const auto settle_steps = static_cast<long>(std::ceil(settle / h));
    const auto measure_steps = static_cast<long>(std::ceil(periods * period / h));
    h = w > 0 ? periods * period / measure_steps : h;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    auto f = [&](double t, const Eigen::VectorXd& xs) -> Eigen::VectorXd { return s.A * xs + s.B * input(t); };
    double t = 0;
    double sum_y = 0, sum_u = 0;
    for (long k = 0; k < settle_steps + measure_steps; ++k) {
        if (k >= settle_steps) {
            const Eigen::VectorXd u = input(t);
            const Eigen::VectorXd y = s.C * x + s.D * u;
            sum_y += y.squaredNorm();
            sum_u += u.squaredNorm();
        }
        const Eigen::VectorXd k1 = f(t, x);
        const Eigen::VectorXd k2 = f(t + h / 2, x + h / 2 * k1);
        const Eigen::VectorXd k3 = f(t + h / 2, x + h / 2 * k2);
        const Eigen::VectorXd k4 = f(t + h, x + h * k3);
        x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += h;
    }
    return std::sqrt(sum_y / sum_u);
}

}  // namespace navsim::test
