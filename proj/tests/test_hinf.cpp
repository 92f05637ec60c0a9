#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "navsim/errors.hpp"
#include "navsim/hinf.hpp"
#include "oracles.hpp"

using namespace navsim;

namespace {

StateSpace first_order(double a) {
    StateSpace s{Eigen::MatrixXd(1, 1), Eigen::MatrixXd(1, 1), Eigen::MatrixXd(1, 1), Eigen::MatrixXd::Zero(1, 1)};
    s.A(0, 0) = -a;
    s.B(0, 0) = 1.0;
    s.C(0, 0) = 1.0;
    return s;
}

}  // namespace

TEST_CASE("analytic first-order norms") {
    CHECK(hinf_norm(first_order(1.0)) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hinf_norm(first_order(2.0)) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("analytic resonant second-order norm") {
    for (double zeta : {0.1, 0.3, 0.05}) {
        const double expected = 1.0 / (2 * zeta * std::sqrt(1 - zeta * zeta));
        CHECK(hinf_norm(test::resonant(zeta, 1.0)) == doctest::Approx(expected).epsilon(1e-6));
    }
    // Above zeta = 1/sqrt(2) the peak is at DC.
    CHECK(hinf_norm(test::resonant(0.9, 1.0)) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("feedthrough only") {
    StateSpace s = first_order(1.0);
    s.C(0, 0) = 0.0;
    s.D(0, 0) = -3.0;
    CHECK(hinf_norm(s) == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("norm matches a dense frequency sweep on random stable systems") {
    std::mt19937_64 rng(2024);
    for (int k = 0; k < 20; ++k) {
        const StateSpace s = test::random_stable(rng, 2 + k % 5, 1 + k % 3, 1 + (k / 3) % 3);
        const double oracle = test::sweep_oracle(s, 10000);
        const double g = hinf_norm(s);
        CHECK(g == doctest::Approx(oracle).epsilon(1e-3));
        // The sweep is a lower bound.
        CHECK(g >= oracle * (1 - 1e-6));
    }
}

TEST_CASE("sigma_max agrees with an SVD at sample frequencies") {
    std::mt19937_64 rng(1);
    const StateSpace s = test::random_stable(rng, 5, 3, 2);
    for (double w : {0.0, 0.1, 1.0, 10.0}) {
        CHECK(sigma_max(s, w) == doctest::Approx(test::sigma_svd(s, w)).epsilon(1e-10));
    }
}

TEST_CASE("unstable systems are rejected") {
    StateSpace s = first_order(-1.0);
    CHECK_THROWS_AS(hinf_norm(s), Unstable);
    CHECK_FALSE(is_hurwitz(s.A));
    CHECK(spectral_abscissa(s.A) == doctest::Approx(1.0));
}

TEST_CASE("filter Riccati solution satisfies the equation and stabilizes") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd A(4, 4), C(2, 4), B(4, 2);
        for (int i = 0; i < A.size(); ++i) A.data()[i] = n(rng);
        for (int i = 0; i < C.size(); ++i) C.data()[i] = n(rng);
        for (int i = 0; i < B.size(); ++i) B.data()[i] = n(rng);
        const Eigen::MatrixXd G = C.transpose() * C;
        const Eigen::MatrixXd Q = B * B.transpose() + 1e-3 * Eigen::MatrixXd::Identity(4, 4);
        const Eigen::MatrixXd P = solve_filter_riccati(A, G, Q);
        const Eigen::MatrixXd res = A * P + P * A.transpose() - P * G * P + Q;
        CHECK(res.norm() < 1e-8 * (1 + P.norm() * P.norm()));
        CHECK((P - P.transpose()).norm() < 1e-9 * (1 + P.norm()));
        CHECK(P.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff() > 0);
        CHECK(is_hurwitz(A - P * G));
    }
}

TEST_CASE("observability of the bearing plant") {
    const PlantModel model;
    for (const auto& rho : param_grid(model.box, 3, 3)) {
        const auto P = model.at(rho);
        CHECK(observability_rank(P.A, P.C_y) == 6);
    }
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd C(1, 2);
    C << 1, 0;
    CHECK(observability_rank(A, C) == 1);
}

TEST_CASE("Riccati starting gain has the prescribed decay at the nominal point") {
    const PlantModel model;
    for (double alpha : {0.5, 1.0, 2.0}) {
        const Mat6 L = initial_gain(model.box.center(), alpha, model);
        const auto P = model.at(model.box.center());
        CHECK(spectral_abscissa(P.A + L * P.C_y) < -alpha);
    }
}

TEST_CASE("error system blocks") {
    const PlantModel model;
    const ParamPoint rho = model.box.center();
    const Mat6 L = initial_gain(rho, 1.0, model);
    const auto e = error_system(rho, L, model);
    const auto P = model.at(rho);
    CHECK((e.A - (P.A + L * P.C_y)).norm() == 0.0);
    CHECK((e.B.rightCols<6>() - L * P.D_w.rightCols<6>()).norm() < 1e-15 * (1 + L.norm()));
    CHECK(e.B.block<3, 3>(3, 0).isIdentity());
    CHECK(e.C == output_C_z());
    CHECK(e.D.isZero());
}

TEST_CASE("worst-case gamma is the grid maximum and infinite when unstable") {
    const PlantModel model;
    const auto grid = param_grid(model.box, 3, 3);
    const Mat6 L = initial_gain(model.box.center(), 1.0, model);
    double m = 0;
    for (const auto& p : grid) m = std::max(m, hinf_norm(error_system(p, L, model)));
    CHECK(worst_case_gamma(L, grid, model) == doctest::Approx(m).epsilon(1e-5));
    CHECK(std::isinf(worst_case_gamma(Mat6::Zero(), grid, model)));
    // The frequency cap turns fast gains into an infinite objective.
    CHECK(std::isinf(worst_case_gamma(L, grid, model, 1e-6, 1.0)));
}

TEST_CASE("synthesis configuration validation") {
    SynthesisConfig cfg;
    cfg.validation_n1 = 6;  // 3 -> 6 does not nest
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = SynthesisConfig{};
    cfg.restarts = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("short synthesis improves on its start, certifies the grid and is deterministic") {
    const PlantModel model;
    SynthesisConfig cfg;
    cfg.restarts = 1;
    cfg.max_sweeps = 8;
    cfg.max_frequency = 1000.0;
    const ObserverGain a = synthesize_gain(cfg, model);
    const ObserverGain b = synthesize_gain(cfg, model);
    CHECK(a.L == b.L);
    CHECK(std::isfinite(a.gamma));
    CHECK(a.log.final_objective <= a.log.initial_objective);
    for (std::size_t i = 1; i < a.log.objective_trace.size(); ++i) {
        CHECK(a.log.objective_trace[i] <= a.log.objective_trace[i - 1]);
    }
    for (const auto& p : param_grid(model.box, 7, 7)) {
        const auto e = error_system(p, a.L, model);
        CHECK(is_hurwitz(e.A));
        CHECK(spectral_radius(e.A) <= cfg.max_frequency * (1 + 1e-12));
    }
    CHECK(a.gamma <= a.gamma_synthesis * (1 + cfg.adequacy) + 1e-15);
}

TEST_CASE("steady-state sinusoidal gain stays below the norm") {
    std::mt19937_64 rng(77);
    const StateSpace s = test::random_stable(rng, 4, 2, 2);
    const double g = hinf_norm(s);
    const auto [w, v] = test::worst_direction(s);
    const double gain = test::sinusoid_rms_gain(s, w, v);
    CHECK(gain <= g * 1.05);
    CHECK(gain >= g * 0.95);
}
