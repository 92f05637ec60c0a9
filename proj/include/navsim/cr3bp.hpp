#pragma once

// Normalized Earth-Moon circular restricted three-body dynamics in the
// rotating frame. Earth sits at (-mu, 0, 0), the Moon at (1 - mu, 0, 0).

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace navsim {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;

// (x, y, z, vx, vy, vz) in DU and DU/TU.
using StateVector = Vec6;

// 1 DU and 1 TU for the Earth-Moon system.
inline constexpr double kKmPerDu = 384400.0;
inline constexpr double kSecondsPerTu = 375190.0;

// States closer than this to either primary are rejected.
inline constexpr double kProximityGuard = 1e-6;

class MassRatio {
public:
    static constexpr double kEarthMoon = 0.012150585;

    constexpr MassRatio() = default;
    // Throws ValidationError unless 0 < mu < 0.5.
    explicit MassRatio(double mu);

    constexpr double value() const noexcept { return mu_; }

private:
    double mu_ = kEarthMoon;
};

struct PrimaryDistances {
    double r1 = 0.0;  // spacecraft to Earth
    double r2 = 0.0;  // spacecraft to Moon
};

PrimaryDistances primary_distances(const StateVector& s, MassRatio mu);

// U = (x^2 + y^2)/2 + (1 - mu)/r1 + mu/r2
double effective_potential(const StateVector& s, MassRatio mu);

Vec3 potential_gradient(const StateVector& s, MassRatio mu);

// Equations of motion with an additive acceleration disturbance d.
Vec6 cr3bp_derivative(const StateVector& s, MassRatio mu, const Vec3& d = Vec3::Zero());

// C = 2U - |v|^2
double jacobi_constant(const StateVector& s, MassRatio mu);

// Throws DegenerateDistance when either range is inside kProximityGuard.
void check_proximity(const PrimaryDistances& r);

}  // namespace navsim
