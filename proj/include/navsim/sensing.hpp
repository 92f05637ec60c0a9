#pragma once

// Bearing-only sensing: line-of-sight unit vectors to Earth and Moon, range
// weighted additive noise, and closed-form range recovery from two bearings.

#include <cstdint>
#include <random>

#include "navsim/cr3bp.hpp"
#include "navsim/lft_model.hpp"

namespace navsim {

inline constexpr double kDefaultCollinearityThreshold = 1e-4;

struct LineOfSight {
    Vec3 e1;  // spacecraft -> Earth
    Vec3 e2;  // spacecraft -> Moon
};

LineOfSight unit_vectors(const StateVector& s, MassRatio mu);

struct NoiseModelConfig {
    double eta_min_arcsec = 50.0;
    double eta_max_arcsec = 500.0;
    double cutoff_hz = 0.1;           // physical seconds
    double sample_rate = 1000.0;      // samples per TU
    double seconds_per_tu = kSecondsPerTu;
    std::uint64_t seed = 1;
    bool enabled = true;

    double eta_min_rad() const noexcept { return eta_min_arcsec * kArcsecToRad; }
    double eta_max_rad() const noexcept { return eta_max_arcsec * kArcsecToRad; }
    // Cutoff in cycles per TU.
    double cutoff_per_tu() const noexcept { return cutoff_hz * seconds_per_tu; }

    void validate() const;
};

struct BearingMeasurement {
    Vec3 e1;
    Vec3 e2;

    Vec6 stacked() const;
    static BearingMeasurement from_stacked(const Vec6& y);
};

// y = (e1; e2) + blkdiag(W1(r1) I3, W2(r2) I3) * noise, weights in radians.
BearingMeasurement measure(const StateVector& s, const Vec6& noise, const NoiseModelConfig& cfg,
                           const ParamBox& box, MassRatio mu);

// Per-channel unit-variance Gaussian noise through a first-order low-pass
// filter, rescaled to unit stationary variance. Samples are held between
// sample instants. When the cutoff lies above the sampling Nyquist rate the
// filter pole is negligible and the output is per-sample white noise.
class ShapedNoiseSource {
public:
    explicit ShapedNoiseSource(const NoiseModelConfig& cfg);

    // Draws the next sample.
    Vec6 next();
    // Zero-order-hold value at time t. Times must be non-decreasing.
    Vec6 at(double t);

    // Filter pole per sample; 0 means white.
    double pole() const noexcept { return pole_; }

private:
    double rate_;
    double pole_;
    double gain_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    Vec6 state_ = Vec6::Zero();
    std::int64_t index_ = -1;
};

struct LosGeometry {
    double c = 0.0;      // e1 . e2
    double alpha = 0.0;  // e1 . ex
    double beta = 0.0;   // e2 . ex
    double conditioning = 0.0;  // 1 - c^2
    double residual = 0.0;      // DU
};

struct RangeSolution {
    double r1 = 0.0;
    double r2 = 0.0;
    LosGeometry geom;
};

enum class RangeStatus { Ok, NearCollinear, NonPositiveRange };

// Non-throwing core of reconstruct_ranges. Inputs are renormalized.
RangeStatus solve_ranges(const Vec3& e1, const Vec3& e2, double threshold, RangeSolution& out);

// Throws NearCollinear when 1 - c^2 < threshold, NonPositiveRange when either
// recovered range is not positive.
RangeSolution reconstruct_ranges(const Vec3& e1, const Vec3& e2,
                                 double threshold = kDefaultCollinearityThreshold);

// |ex - (r2 e2 - r1 e1)|, zero for a consistent (r1, r2, e1, e2) triple.
double closure_residual(double r1, double r2, const Vec3& e1, const Vec3& e2);

}  // namespace navsim
