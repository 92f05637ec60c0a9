#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "navsim/errors.hpp"
#include "navsim/hinf.hpp"
#include "navsim/integrator.hpp"
#include "navsim/io.hpp"
#include "navsim/sensing.hpp"
#include "navsim/simulation.hpp"

namespace py = pybind11;
using namespace navsim;

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::VectorXd to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <class V>
RowMatrix stack_rows(const std::vector<V>& rows) {
    RowMatrix m(rows.size(), 6);
    for (std::size_t k = 0; k < rows.size(); ++k) m.row(k) = rows[k].transpose();
    return m;
}

py::dict stats_dict(const SummaryStats& s) {
    py::dict d;
    d["max_abs"] = s.max_abs;
    d["rms"] = s.rms;
    d["post_max"] = s.post_max;
    d["settle_time"] = s.settle_time;
    d["samples"] = s.samples;
    d["post_samples"] = s.post_samples;
    d["fallback_count"] = s.fallback_count;
    d["clamp_count"] = s.clamp_count;
    d["post_position_max"] = s.post_position_max();
    d["post_position_max_km"] = du_to_km(s.post_position_max());
    d["worst_position_axis"] = "xyz"[s.worst_position_axis()];
    return d;
}

py::dict run_dict(const RunResult& r) {
    const std::size_t n = r.size();
    std::vector<Vec6> err(n);
    Eigen::VectorXd r1(n), r2(n);
    std::vector<std::string> source(n);
    for (std::size_t k = 0; k < n; ++k) {
        err[k] = r.error(k);
        r1[k] = r.schedule[k].rho.r1;
        r2[k] = r.schedule[k].rho.r2;
        source[k] = to_string(r.schedule[k].source);
    }
    py::dict d;
    d["t"] = to_vector(r.t);
    d["truth"] = stack_rows(r.truth);
    d["estimate"] = stack_rows(r.estimate);
    d["error"] = stack_rows(err);
    d["y_m"] = stack_rows(r.y_m);
    d["r1_used"] = r1;
    d["r2_used"] = r2;
    d["rho_source"] = source;
    d["stats"] = stats_dict(r.stats);
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bearings-only cislunar navigation: CR3BP dynamics, LPV observer synthesis and closed-loop runs.";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ParseError>(m, "ParseError", config.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", config.ptr());
    py::register_exception<BoxMismatch>(m, "BoxMismatch", config.ptr());
    py::register_exception<SchemaError>(m, "SchemaError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());
    py::register_exception<SynthesisFailed>(m, "SynthesisFailed", base.ptr());
    py::register_exception<NotObservable>(m, "NotObservable", base.ptr());
    py::register_exception<Unstable>(m, "Unstable", base.ptr());
    py::register_exception<StepFailure>(m, "StepFailure", base.ptr());
    py::register_exception<DegenerateDistance>(m, "DegenerateDistance", base.ptr());
    py::register_exception<NearCollinear>(m, "NearCollinear", base.ptr());
    py::register_exception<NonPositiveRange>(m, "NonPositiveRange", base.ptr());

    m.attr("EARTH_MOON_MU") = MassRatio::kEarthMoon;
    m.attr("KM_PER_DU") = kKmPerDu;

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_static("load", &load_scenario, py::arg("path"))
        .def_static("parse", &parse_scenario, py::arg("text"))
        .def("to_json", &scenario_to_json)
        .def("reseed", &reseed, py::arg("seed"))
        .def_property_readonly("mu", [](const Scenario& s) { return s.mu.value(); })
        .def_readwrite("initial_state", &Scenario::initial_state)
        .def_readwrite("initial_estimate_error", &Scenario::initial_estimate_error)
        .def_readwrite("duration_tu", &Scenario::duration_tu)
        .def_property(
            "step", [](const Scenario& s) { return s.integrator.step; },
            [](Scenario& s, double h) {
                s.integrator.step = h;
                s.integrator.validate();
            })
        .def_property(
            "noise_enabled", [](const Scenario& s) { return s.noise.enabled; },
            [](Scenario& s, bool on) { s.noise.enabled = on; })
        .def_property(
            "disturbance_amplitude", [](const Scenario& s) { return s.disturbance.amplitude; },
            [](Scenario& s, double a) {
                s.disturbance.amplitude = a;
                s.disturbance.validate();
            })
        .def_property_readonly("box", [](const Scenario& s) {
            return py::make_tuple(s.box.r1_min, s.box.r1_max, s.box.r2_min, s.box.r2_max);
        });

    py::class_<ObserverGain>(m, "ObserverGain")
        .def_static("load", &load_gain, py::arg("path"))
        .def_static("from_json", &gain_from_json, py::arg("text"))
        .def("save", [](const ObserverGain& g, const std::filesystem::path& p) { save_gain(g, p); }, py::arg("path"))
        .def("to_json", &gain_to_json)
        .def_readonly("L", &ObserverGain::L)
        .def_readonly("gamma", &ObserverGain::gamma)
        .def_readonly("gamma_synthesis", &ObserverGain::gamma_synthesis)
        .def_readonly("stability_margin", &ObserverGain::stability_margin)
        .def_readonly("config_hash", &ObserverGain::config_hash);

    m.def(
        "jacobi_constant", [](const StateVector& s, double mu) { return jacobi_constant(s, MassRatio(mu)); },
        py::arg("state"), py::arg("mu") = MassRatio::kEarthMoon);

    m.def(
        "propagate",
        [](const StateVector& s0, double t0, double t1, const std::string& method, double tol, double step,
           double mu) {
            IntegratorConfig cfg;
            if (method == "rkf45") {
                cfg = IntegratorConfig::rkf45(tol);
            } else if (method == "rk4") {
                cfg = IntegratorConfig::rk4(step);
            } else {
                throw ValidationError("method", "expected rk4 or rkf45");
            }
            Trajectory tr;
            {
                py::gil_scoped_release release;
                tr = propagate(s0, t0, t1, cfg, MassRatio(mu));
            }
            return py::make_tuple(to_vector(tr.times), stack_rows(tr.states));
        },
        py::arg("state"), py::arg("t0"), py::arg("t1"), py::arg("method") = "rkf45", py::arg("tol") = 1e-12,
        py::arg("step") = 1e-3, py::arg("mu") = MassRatio::kEarthMoon,
        "Returns (times, states) with states as an N x 6 array.");

    m.def(
        "reconstruct_ranges",
        [](const Vec3& e1, const Vec3& e2, double threshold) {
            const auto sol = reconstruct_ranges(e1, e2, threshold);
            return py::make_tuple(sol.r1, sol.r2);
        },
        py::arg("e1"), py::arg("e2"), py::arg("threshold") = kDefaultCollinearityThreshold,
        "Earth and Moon ranges from the two unit bearings.");

    m.def(
        "hinf_norm",
        [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& C, const Eigen::MatrixXd& D,
           double tol) { return hinf_norm(StateSpace{A, B, C, D}, tol); },
        py::arg("A"), py::arg("B"), py::arg("C"), py::arg("D"), py::arg("tol") = 1e-6);

    m.def(
        "synthesize",
        [](const Scenario& sc, int restarts, std::uint64_t seed, double max_frequency) {
            SynthesisConfig cfg = default_synthesis(sc);
            cfg.restarts = restarts;
            cfg.seed = seed;
            if (max_frequency > 0) cfg.max_frequency = max_frequency;
            py::gil_scoped_release release;
            return synthesize_for_scenario(sc, cfg);
        },
        py::arg("scenario"), py::arg("restarts") = SynthesisConfig{}.restarts,
        py::arg("seed") = SynthesisConfig{}.seed, py::arg("max_frequency") = 0.0);

    m.def(
        "initial_gain",
        [](const Scenario& sc, double pole_scale) {
            ObserverGain g;
            g.L = initial_gain(sc.box.center(), pole_scale, sc.plant_model());
            g.box = sc.box;
            g.gamma = g.gamma_synthesis = worst_case_gamma(g.L, param_grid(sc.box, 7, 7), sc.plant_model());
            g.config_hash = "initial";
            return g;
        },
        py::arg("scenario"), py::arg("pole_scale") = 1.0,
        "Riccati gain at the box centre, without the grid search.");

    m.def(
        "worst_case_gamma",
        [](const ObserverGain& g, const Scenario& sc, int n1, int n2) {
            return worst_case_gamma(g.L, param_grid(sc.box, n1, n2), sc.plant_model());
        },
        py::arg("gain"), py::arg("scenario"), py::arg("n1") = 7, py::arg("n2") = 7);

    m.def(
        "simulate",
        [](const Scenario& sc, const ObserverGain& g, std::optional<std::uint64_t> seed, double settle) {
            const Scenario run = seed ? reseed(sc, *seed) : sc;
            RunResult r;
            {
                py::gil_scoped_release release;
                r = run_scenario(run, g, settle);
            }
            return run_dict(r);
        },
        py::arg("scenario"), py::arg("gain"), py::arg("seed") = py::none(), py::arg("settle") = kDefaultSettleTime);

    m.def(
        "simulate_to_csv",
        [](const Scenario& sc, const ObserverGain& g, const std::filesystem::path& out,
           std::optional<std::uint64_t> seed) {
            const Scenario run = seed ? reseed(sc, *seed) : sc;
            SummaryStats stats;
            {
                py::gil_scoped_release release;
                const RunResult r = run_scenario(run, g);
                export_csv(r, out);
                stats = r.stats;
            }
            return stats_dict(stats);
        },
        py::arg("scenario"), py::arg("gain"), py::arg("out"), py::arg("seed") = py::none());

    m.def(
        "monte_carlo",
        [](const Scenario& sc, const ObserverGain& g, int runs, std::uint64_t seed, const std::string& out_dir,
           unsigned threads) {
            MonteCarloResult mc;
            {
                py::gil_scoped_release release;
                mc = monte_carlo(sc, g, runs, seed, out_dir, threads);
            }
            py::dict d;
            py::list per_run;
            for (const auto& s : mc.runs) per_run.append(stats_dict(s));
            d["seeds"] = mc.seeds;
            d["runs"] = per_run;
            d["post_max"] = mc.aggregate.post_max;
            d["position_max"] = mc.aggregate.position_max;
            d["position_median"] = mc.aggregate.position_median;
            d["position_p95"] = mc.aggregate.position_p95;
            d["worst_axis_votes"] = mc.aggregate.worst_axis_votes;
            return d;
        },
        py::arg("scenario"), py::arg("gain"), py::arg("runs"), py::arg("seed") = 1, py::arg("out_dir") = "",
        py::arg("threads") = 0);

    m.def(
        "analyze",
        [](const std::filesystem::path& csv, double settle) { return stats_dict(analyze(csv, settle)); },
        py::arg("csv"), py::arg("settle") = kDefaultSettleTime);

}
