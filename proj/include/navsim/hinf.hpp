#pragma once

// Static H-infinity observer gain synthesis for the frozen-parameter error
// dynamics
//     e'  = (A(rho) + L C_y(rho)) e + (B_w + L D_w(rho)) w
//     z~  = C_z e
// certified on a grid over the parameter box.

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "navsim/lft_model.hpp"

namespace navsim {

inline constexpr double kInfiniteGain = std::numeric_limits<double>::infinity();

// Continuous-time LTI realization (A, B, C, D).
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;
};

struct ErrorSystem {
    Mat6 A;
    Mat69 B;
    Mat36 C;
    Eigen::Matrix<double, 3, 9> D;

    StateSpace as_state_space() const;
};

ErrorSystem error_system(const ParamPoint& rho, const Mat6& L, const PlantModel& model);

// Largest real part of the eigenvalues of A.
double spectral_abscissa(const Eigen::MatrixXd& A);

// Strictly stable with a small margin scaled to |A|.
bool is_hurwitz(const Eigen::MatrixXd& A);

// Largest singular value of C (jw I - A)^-1 B + D.
double sigma_max(const StateSpace& sys, double omega);

// Peak gain over a log-spaced frequency sweep plus w = 0. A lower bound on
// the H-infinity norm.
double sweep_peak(const StateSpace& sys, int points = 200);

// H-infinity norm by bisection on the Hamiltonian imaginary-axis eigenvalue
// test, with the lower bound lifted to the peak gain seen at crossing
// frequencies. The true norm lies within gamma*(1 +/- tol).
// Throws Unstable when A is not Hurwitz.
double hinf_norm(const StateSpace& sys, double tol = 1e-6);
double hinf_norm(const ErrorSystem& sys, double tol = 1e-6);

// Max over the grid of the frozen-parameter norm; kInfiniteGain when any
// grid point is unstable.
double worst_case_gamma(const Mat6& L, std::span<const ParamPoint> grid, const PlantModel& model,
                        double tol = 1e-6, double max_frequency = 0.0);

// Largest eigenvalue magnitude of A.
double spectral_radius(const Eigen::MatrixXd& A);

int observability_rank(const Eigen::MatrixXd& A, const Eigen::MatrixXd& C);

// Stabilizing solution of A P + P A' - P G P + Q = 0 (filter form), via the
// matrix sign function of the associated Hamiltonian.
Eigen::MatrixXd solve_filter_riccati(const Eigen::MatrixXd& A, const Eigen::MatrixXd& G,
                                     const Eigen::MatrixXd& Q);

// Riccati observer at the nominal parameter with prescribed decay rate
// pole_scale: every eigenvalue of A + L C_y has real part below -pole_scale.
// Throws NotObservable when (A, C_y) loses rank.
Mat6 initial_gain(const ParamPoint& nominal, double pole_scale, const PlantModel& model);

struct SynthesisConfig {
    int synthesis_n1 = 3;
    int synthesis_n2 = 3;
    int validation_n1 = 7;
    int validation_n2 = 7;
    double gamma_tol = 1e-6;
    int restarts = 5;
    int max_sweeps = 200;          // per restart
    double initial_step = 0.25;    // relative to entry magnitude
    double min_step = 1e-4;
    double pole_scale = 1.0;
    double adequacy = 0.10;        // validation vs synthesis gamma
    int max_densify = 4;
    // Upper bound on the closed-loop spectral radius at every grid point,
    // rad/TU; 0 disables the bound.
    double max_frequency = 0.0;
    std::uint64_t seed = 7;        // restart ordering / perturbation

    void validate() const;
};

struct SynthesisLog {
    int restarts_run = 0;
    int sweeps = 0;
    long evaluations = 0;
    int densify_rounds = 0;
    double initial_objective = kInfiniteGain;
    double final_objective = kInfiniteGain;
    std::vector<double> objective_trace;  // best objective after each sweep
};

struct ObserverGain {
    Mat6 L = Mat6::Zero();
    double gamma = kInfiniteGain;            // validation grid
    double gamma_synthesis = kInfiniteGain;  // synthesis grid (incl. densified points)
    double stability_margin = 0.0;           // -max spectral abscissa on validation grid
    ParamBox box;
    int synthesis_n1 = 3, synthesis_n2 = 3;
    int validation_n1 = 7, validation_n2 = 7;
    std::vector<ParamPoint> extra_points;    // added during densification
    std::string config_hash;
    SynthesisLog log;
};

// Multi-start compass search over the 36 entries of L minimizing the
// worst-case gamma on the synthesis grid. Throws SynthesisFailed when no
// restart yields a gain that stabilizes the validation grid.
ObserverGain synthesize_gain(const SynthesisConfig& cfg, const PlantModel& model);

}  // namespace navsim
