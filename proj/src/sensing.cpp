#include "navsim/sensing.hpp"

#include <cmath>
#include <numbers>

#include "navsim/errors.hpp"

namespace navsim {

LineOfSight unit_vectors(const StateVector& s, MassRatio mu) {
    const auto r = primary_distances(s, mu);
    check_proximity(r);
    const double m = mu.value();
    const Vec3 rel1(s[0] + m, s[1], s[2]);
    const Vec3 rel2(s[0] - 1.0 + m, s[1], s[2]);
    return {-rel1 / r.r1, -rel2 / r.r2};
}

void NoiseModelConfig::validate() const {
    if (!(eta_min_arcsec > 0.0) || !(eta_min_arcsec <= eta_max_arcsec) ||
        !std::isfinite(eta_max_arcsec)) {
        throw ValidationError("noise", "requires 0 < eta_min_arcsec <= eta_max_arcsec");
    }
    if (!(cutoff_hz > 0.0) || !std::isfinite(cutoff_hz)) {
        throw ValidationError("noise.cutoff_hz", "must be positive");
    }
    if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
        throw ValidationError("noise.sample_rate", "must be positive");
    }
    if (!(seconds_per_tu > 0.0)) {
        throw ValidationError("noise.seconds_per_tu", "must be positive");
    }
}

Vec6 BearingMeasurement::stacked() const {
    Vec6 y;
    y << e1, e2;
    return y;
}

BearingMeasurement BearingMeasurement::from_stacked(const Vec6& y) {
    return {y.head<3>(), y.tail<3>()};
}

BearingMeasurement measure(const StateVector& s, const Vec6& noise, const NoiseModelConfig& cfg,
                           const ParamBox& box, MassRatio mu) {
    const auto los = unit_vectors(s, mu);
    BearingMeasurement m{los.e1, los.e2};
    if (!cfg.enabled) {
        return m;
    }
    const auto r = primary_distances(s, mu);
    const double w1 = range_weight(r.r1, box.r1_min, box.r1_max, cfg.eta_min_rad(), cfg.eta_max_rad());
    const double w2 = range_weight(r.r2, box.r2_min, box.r2_max, cfg.eta_min_rad(), cfg.eta_max_rad());
    m.e1 += w1 * noise.head<3>();
    m.e2 += w2 * noise.tail<3>();
    return m;
}

ShapedNoiseSource::ShapedNoiseSource(const NoiseModelConfig& cfg)
    : rate_(cfg.sample_rate), rng_(cfg.seed) {
    cfg.validate();
    // exp underflows to exactly 0 for cutoffs far above the sample rate.
    pole_ = std::exp(-2.0 * std::numbers::pi * cfg.cutoff_per_tu() / cfg.sample_rate);
    gain_ = std::sqrt(1.0 - pole_ * pole_);
}

Vec6 ShapedNoiseSource::next() {
    Vec6 g;
    for (int i = 0; i < 6; ++i) {
        g[i] = normal_(rng_);
    }
    // First sample starts from the stationary distribution.
    state_ = index_ < 0 ? g : (pole_ * state_ + gain_ * g).eval();
    ++index_;
    return state_;
}

Vec6 ShapedNoiseSource::at(double t) {
    const auto target = static_cast<std::int64_t>(std::floor(t * rate_ + 1e-9));
    while (index_ < target) {
        next();
    }
    return state_;
}

RangeStatus solve_ranges(const Vec3& e1_in, const Vec3& e2_in, double threshold, RangeSolution& out) {
    const Vec3 e1 = e1_in.normalized();
    const Vec3 e2 = e2_in.normalized();
    LosGeometry g;
    g.c = e1.dot(e2);
    g.alpha = e1[0];
    g.beta = e2[0];
    g.conditioning = 1.0 - g.c * g.c;
    out.geom = g;
    if (!(g.conditioning >= threshold)) {
        out.r1 = out.r2 = 0.0;
        return RangeStatus::NearCollinear;
    }
    out.r1 = (g.c * g.beta - g.alpha) / g.conditioning;
    out.r2 = (g.beta - g.c * g.alpha) / g.conditioning;
    out.geom.residual = closure_residual(out.r1, out.r2, e1, e2);
    if (!(out.r1 > 0.0) || !(out.r2 > 0.0)) {
        return RangeStatus::NonPositiveRange;
    }
    return RangeStatus::Ok;
}

RangeSolution reconstruct_ranges(const Vec3& e1, const Vec3& e2, double threshold) {
    RangeSolution sol;
    switch (solve_ranges(e1, e2, threshold, sol)) {
        case RangeStatus::NearCollinear:
            throw NearCollinear("line-of-sight vectors nearly collinear (1 - c^2 = " +
                                std::to_string(sol.geom.conditioning) + ")");
        case RangeStatus::NonPositiveRange:
            throw NonPositiveRange("recovered range not positive (r1 = " + std::to_string(sol.r1) +
                                   ", r2 = " + std::to_string(sol.r2) + ")");
        case RangeStatus::Ok:
            break;
    }
    return sol;
}

double closure_residual(double r1, double r2, const Vec3& e1, const Vec3& e2) {
    return (Vec3::UnitX() - (r2 * e2 - r1 * e1)).norm();
}

}  // namespace navsim
