#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "navsim/errors.hpp"
#include "navsim/sensing.hpp"
#include "support.hpp"

using namespace navsim;

namespace {

// Spacecraft in the xy plane at (x0, y) whose angle Earth-S-Moon has
// sin^2 = target, on the obtuse branch near the Earth-Moon line.
StateVector state_with_conditioning(double target, MassRatio mu) {
    const double x0 = 0.7;
    auto cond = [&](double y) {
        StateVector s = StateVector::Zero();
        s[0] = x0;
        s[1] = y;
        const auto los = unit_vectors(s, mu);
        const double c = los.e1.dot(los.e2);
        return 1 - c * c;
    };
    // cond rises from 0 at y = 0 to 1 where the angle is a right angle.
    double lo = 1e-9, hi = 0.45;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cond(mid) < target ? lo : hi) = mid;
    }
    StateVector s = StateVector::Zero();
    s[0] = x0;
    s[1] = 0.5 * (lo + hi);
    return s;
}

}  // namespace

TEST_CASE("line-of-sight vectors are unit and point at the primaries") {
    const MassRatio mu;
    const StateVector s = test::reference_state();
    const auto los = unit_vectors(s, mu);
    CHECK(los.e1.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(los.e2.norm() == doctest::Approx(1.0).epsilon(1e-15));
    const auto r = primary_distances(s, mu);
    const Vec3 p = s.head<3>();
    CHECK((p + r.r1 * los.e1 - Vec3(-mu.value(), 0, 0)).norm() < 1e-14);
    CHECK((p + r.r2 * los.e2 - Vec3(1 - mu.value(), 0, 0)).norm() < 1e-14);
}

TEST_CASE("noiseless measurement equals the stacked bearings") {
    const MassRatio mu;
    const ParamBox box;
    NoiseModelConfig cfg;
    std::mt19937_64 rng(3);
    for (int k = 0; k < 1000; ++k) {
        const StateVector s = test::random_state_in_box(rng, box, mu);
        const auto los = unit_vectors(s, mu);
        const auto m = measure(s, Vec6::Zero(), cfg, box, mu);
        CHECK(m.e1 == los.e1);
        CHECK(m.e2 == los.e2);
        const ParamPoint rho = param_point(s, mu);
        CHECK((measurement_C(rho) * s + measurement_d(rho, mu) - m.stacked()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("unit noise at the near endpoints perturbs by eta_min") {
    const MassRatio mu;
    const ParamBox box;
    NoiseModelConfig cfg;
    // A state with r1 at the box minimum, along the Earth-Moon line side.
    StateVector s = StateVector::Zero();
    s[0] = -mu.value() + box.r1_min;
    s[2] = 0.0;
    const Vec6 unit = (Vec6() << 1, 0, 0, 0, 0, 0).finished();
    const auto clean = measure(s, Vec6::Zero(), cfg, box, mu);
    const auto noisy = measure(s, unit, cfg, box, mu);
    CHECK((noisy.e1 - clean.e1).norm() == doctest::Approx(cfg.eta_min_rad()).epsilon(1e-12));
}

TEST_CASE("measurement noise standard deviation matches the weight") {
    const MassRatio mu;
    const ParamBox box;
    NoiseModelConfig cfg;
    ShapedNoiseSource src(cfg);
    const StateVector s = test::reference_state();
    const auto r = primary_distances(s, mu);
    const double w1 = range_weight(r.r1, box.r1_min, box.r1_max, cfg.eta_min_rad(), cfg.eta_max_rad());
    const double w2 = range_weight(r.r2, box.r2_min, box.r2_max, cfg.eta_min_rad(), cfg.eta_max_rad());
    const Vec6 clean = measure(s, Vec6::Zero(), cfg, box, mu).stacked();
    Vec6 sumsq = Vec6::Zero();
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
        const Vec6 dv = measure(s, src.next(), cfg, box, mu).stacked() - clean;
        sumsq += dv.cwiseProduct(dv);
    }
    for (int i = 0; i < 6; ++i) {
        const double sd = std::sqrt(sumsq[i] / n);
        CHECK(sd == doctest::Approx(i < 3 ? w1 : w2).epsilon(0.1));
    }
}

TEST_CASE("noise source is deterministic per seed") {
    NoiseModelConfig cfg;
    cfg.seed = 42;
    ShapedNoiseSource a(cfg), b(cfg);
    cfg.seed = 43;
    ShapedNoiseSource c(cfg);
    bool differs = false;
    for (int k = 0; k < 100; ++k) {
        const Vec6 va = a.next();
        CHECK(va == b.next());
        differs = differs || va != c.next();
    }
    CHECK(differs);
}

TEST_CASE("default noise is white at the simulation rate") {
    NoiseModelConfig cfg;
    ShapedNoiseSource src(cfg);
    CHECK(src.pole() < 1e-100);
    double sum = 0, sumsq = 0;
    const int n = 100000;
    for (int k = 0; k < n; ++k) {
        const double v = src.next()[0];
        sum += v;
        sumsq += v * v;
    }
    const double var = sumsq / n - (sum / n) * (sum / n);
    CHECK(var >= 0.9);
    CHECK(var <= 1.1);
}

TEST_CASE("shaped noise has unit variance and first-order autocorrelation") {
    NoiseModelConfig cfg;
    cfg.cutoff_hz = 1e-6;  // 0.375 cycles/TU against 1000 samples/TU
    ShapedNoiseSource src(cfg);
    const double a = src.pole();
    CHECK(a == doctest::Approx(std::exp(-2 * M_PI * cfg.cutoff_per_tu() / cfg.sample_rate)));
    const int n = 200000;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = src.next()[2];
    auto acf = [&](int lag) {
        double s = 0, v = 0;
        for (int k = 0; k + lag < n; ++k) s += x[k] * x[k + lag];
        for (double xi : x) v += xi * xi;
        return (s / (n - lag)) / (v / n);
    };
    double var = 0;
    for (double xi : x) var += xi * xi;
    var /= n;
    // An AR(1) process with pole a has correlation a^lag. The record spans few
    // correlation times, so the bands are loose.
    CHECK(var == doctest::Approx(1.0).epsilon(0.35));
    CHECK(acf(1) == doctest::Approx(a).epsilon(0.01));
    const int long_lag = static_cast<int>(8.0 / (1 - a));
    CHECK(std::abs(acf(long_lag)) < 0.05 + std::pow(a, long_lag));
}

TEST_CASE("shaped noise decorrelates at lags much longer than the filter time") {
    NoiseModelConfig cfg;
    cfg.cutoff_hz = 1e-5;
    ShapedNoiseSource src(cfg);
    const int n = 100000;
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k) x[k] = src.next()[0];
    const double tau = 1.0 / (1 - src.pole());
    const int lag = static_cast<int>(20 * tau);
    double s = 0, v = 0;
    for (int k = 0; k + lag < n; ++k) s += x[k] * x[k + lag];
    for (double xi : x) v += xi * xi;
    CHECK(std::abs((s / (n - lag)) / (v / n)) < 0.05);
    double m2 = v / n;
    CHECK(m2 == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("zero-order hold indexing") {
    NoiseModelConfig cfg;
    ShapedNoiseSource a(cfg), b(cfg);
    const Vec6 first = a.at(0.0);
    CHECK(a.at(0.0004) == first);
    const Vec6 second = a.at(0.001);
    CHECK(second != first);
    CHECK(b.next() == first);
    CHECK(b.next() == second);
}

TEST_CASE("range reconstruction round trip") {
    const MassRatio mu;
    const ParamBox box;
    std::mt19937_64 rng(7);
    for (int k = 0; k < 1000; ++k) {
        const StateVector s = test::random_state_in_box(rng, box, mu);
        const auto los = unit_vectors(s, mu);
        const auto r = primary_distances(s, mu);
        const auto sol = reconstruct_ranges(los.e1, los.e2);
        CHECK(std::abs(sol.r1 - r.r1) <= 1e-12);
        CHECK(std::abs(sol.r2 - r.r2) <= 1e-12);
        CHECK(closure_residual(r.r1, r.r2, los.e1, los.e2) <= 1e-14);
    }
}

TEST_CASE("collinear geometry is rejected") {
    const MassRatio mu;
    StateVector s = StateVector::Zero();
    s[0] = 0.5;  // between the primaries
    const auto los = unit_vectors(s, mu);
    CHECK_THROWS_AS(reconstruct_ranges(los.e1, los.e2), NearCollinear);
    s[0] = 1.5;  // beyond the Moon
    const auto los2 = unit_vectors(s, mu);
    CHECK_THROWS_AS(reconstruct_ranges(los2.e1, los2.e2), NearCollinear);
    RangeSolution sol;
    CHECK(solve_ranges(los2.e1, los2.e2, 1e-4, sol) == RangeStatus::NearCollinear);
}

TEST_CASE("reversed bearings give non-positive ranges") {
    const MassRatio mu;
    const auto los = unit_vectors(test::reference_state(), mu);
    CHECK_THROWS_AS(reconstruct_ranges(-los.e1, -los.e2), NonPositiveRange);
}

TEST_CASE("unnormalized inputs are renormalized") {
    const MassRatio mu;
    const auto los = unit_vectors(test::reference_state(), mu);
    const auto a = reconstruct_ranges(los.e1, los.e2);
    const auto b = reconstruct_ranges(3.0 * los.e1, 0.5 * los.e2);
    CHECK(a.r1 == doctest::Approx(b.r1).epsilon(1e-14));
    CHECK(a.r2 == doctest::Approx(b.r2).epsilon(1e-14));
}

TEST_CASE("noisy bearings leave a small nonzero residual") {
    const MassRatio mu;
    const ParamBox box;
    NoiseModelConfig cfg;
    ShapedNoiseSource src(cfg);
    const StateVector s = test::reference_state();
    const auto r = primary_distances(s, mu);
    const double w1 = range_weight(r.r1, box.r1_min, box.r1_max, cfg.eta_min_rad(), cfg.eta_max_rad());
    const double w2 = range_weight(r.r2, box.r2_min, box.r2_max, cfg.eta_min_rad(), cfg.eta_max_rad());
    // Out-of-plane bearing error is not absorbed by the two ranges; the
    // miss distance scales with range times bearing error.
    const double scale = r.r1 * w1 + r.r2 * w2;
    for (int k = 0; k < 100; ++k) {
        const auto m = measure(s, src.next(), cfg, box, mu);
        const auto sol = reconstruct_ranges(m.e1, m.e2);
        CHECK(sol.geom.residual > 0.0);
        CHECK(sol.geom.residual < 10 * scale);
    }
}

TEST_CASE("range error grows as the geometry approaches collinearity") {
    const MassRatio mu;
    double previous = 0.0;
    for (double target : {0.9, 0.5, 0.1, 0.01}) {
        const StateVector s = state_with_conditioning(target, mu);
        const auto los = unit_vectors(s, mu);
        const double c = los.e1.dot(los.e2);
        CHECK(1 - c * c == doctest::Approx(target).epsilon(1e-6));
        // Fixed bearing error perpendicular to e1 in the plane of motion.
        const Vec3 perp = Vec3::UnitZ().cross(los.e1).normalized();
        const auto sol = reconstruct_ranges(los.e1 + 1e-7 * perp, los.e2);
        const auto r = primary_distances(s, mu);
        const double err = std::abs(sol.r1 - r.r1) + std::abs(sol.r2 - r.r2);
        CHECK(err > previous);
        previous = err;
    }
}
