#pragma once

// Parameter-dependent (LPV) realization of the CR3BP plant and of the
// bearing sensor, scheduled on rho = (r1, r2).

#include <vector>

#include <Eigen/Dense>

#include "navsim/cr3bp.hpp"

namespace navsim {

using Mat69 = Eigen::Matrix<double, 6, 9>;
using Mat36 = Eigen::Matrix<double, 3, 6>;

inline constexpr double kArcsecToRad = 4.84813681109536e-6;

struct ParamPoint {
    double r1 = 1.0;
    double r2 = 1.0;

    bool valid() const noexcept { return r1 > 0.0 && r2 > 0.0; }
};

ParamPoint param_point(const StateVector& s, MassRatio mu);

struct ParamBox {
    double r1_min = 0.9495;
    double r1_max = 1.1112;
    double r2_min = 0.0111;
    double r2_max = 0.2010;

    // Throws ValidationError("param_box", ...) unless 0 < min < max.
    void validate() const;

    bool contains(const ParamPoint& p) const noexcept;
    // True when `other` lies inside this box.
    bool covers(const ParamBox& other) const noexcept;
    ParamPoint clamp(const ParamPoint& p) const noexcept;
    ParamPoint center() const noexcept { return {0.5 * (r1_min + r1_max), 0.5 * (r2_min + r2_max)}; }
};

// Multiplicative uncertainty r = nominal * (1 + delta * spread).
struct UncertainParam {
    double nominal = 0.0;
    double spread = 0.0;
    double delta = 0.0;

    bool out_of_box() const noexcept { return delta > 1.0 || delta < -1.0; }
};

UncertainParam normalize_param(double r, double min, double max);
double denormalize(const UncertainParam& p);

// Range-dependent noise weight, linear from eta_min at r_min to eta_max at
// r_max. r is clamped to [r_min, r_max] before interpolation.
double range_weight(double r, double r_min, double r_max, double eta_min, double eta_max);

Mat6 plant_A(const ParamPoint& rho, MassRatio mu);
Vec6 plant_b(const ParamPoint& rho, MassRatio mu);
Mat6 measurement_C(const ParamPoint& rho);
Vec6 measurement_d(const ParamPoint& rho, MassRatio mu);
// Etas in radians.
Mat69 noise_D(const ParamPoint& rho, double eta_min, double eta_max, const ParamBox& box);
Mat69 input_B_w();
Mat36 output_C_z();

// Frozen-rho realization of the full plant.
struct PlantMatrices {
    Mat6 A;
    Vec6 b;
    Mat69 B_w;
    Mat6 C_y;
    Mat69 D_w;
    Vec6 d;
    Mat36 C_z;
};

// Everything needed to build PlantMatrices at any rho in the box.
struct PlantModel {
    MassRatio mu;
    ParamBox box;
    double eta_min = 50.0 * kArcsecToRad;   // rad
    double eta_max = 500.0 * kArcsecToRad;  // rad

    PlantMatrices at(const ParamPoint& rho) const;
};

// Partitioned constant block M of G(Delta) = M22 + M21 Delta (I - M11 Delta)^-1 M12.
struct LftBlock {
    Eigen::MatrixXd M11;
    Eigen::MatrixXd M12;
    Eigen::MatrixXd M21;
    Eigen::MatrixXd M22;
};

// Throws IllPosed when I - M11*Delta has condition number above 1e12.
Eigen::MatrixXd lft_eval(const LftBlock& M, const Eigen::MatrixXd& Delta);

// Scalar block whose upper LFT with delta reproduces nominal*(1 + delta*spread).
LftBlock multiplicative_block(const UncertainParam& p);

// n1 x n2 uniform grid over the box, r1 varying slowest. Both counts >= 2.
std::vector<ParamPoint> param_grid(const ParamBox& box, int n1, int n2);

}  // namespace navsim
