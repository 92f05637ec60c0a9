#include "navsim/scenario.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"
#include "navsim/errors.hpp"

namespace navsim {

using nlohmann::json;

void DisturbanceConfig::validate() const {
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
        throw ValidationError("disturbance.amplitude", "must be finite and non-negative");
    }
}

DisturbanceGenerator::DisturbanceGenerator(const DisturbanceConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

Vec3 DisturbanceGenerator::next() {
    Vec3 d;
    if (cfg_.distribution == DisturbanceDistribution::Uniform) {
        std::uniform_real_distribution<double> u(-cfg_.amplitude, cfg_.amplitude);
        for (int i = 0; i < 3; ++i) d[i] = u(rng_);
    } else {
        std::normal_distribution<double> n(0.0, cfg_.amplitude);
        for (int i = 0; i < 3; ++i) d[i] = n(rng_);
    }
    return d;
}

void Scenario::validate() const {
    if (!initial_state.allFinite()) throw ValidationError("initial_state", "must be finite");
    if (!initial_estimate_error.allFinite()) {
        throw ValidationError("initial_estimate_error", "must be finite");
    }
    if (!(duration_tu > 0.0) || !std::isfinite(duration_tu)) {
        throw ValidationError("duration_tu", "must be positive");
    }
    integrator.validate();
    box.validate();
    noise.validate();
    disturbance.validate();
    policy.validate();
    check_proximity(primary_distances(initial_state, mu));
}

PlantModel Scenario::plant_model() const {
    return {mu, box, noise.eta_min_rad(), noise.eta_max_rad()};
}

ClosedLoopConfig Scenario::closed_loop() const { return {mu, box, noise, policy}; }

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Scenario reseed(Scenario sc, std::uint64_t seed) {
    sc.noise.seed = splitmix64(2 * seed);
    sc.disturbance.seed = splitmix64(2 * seed + 1);
    return sc;
}

namespace {

// Walks one JSON object, tracking the dotted path for error messages.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    void allow(std::initializer_list<const char*> keys) const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) throw ValidationError(field(it.key()), "unknown key");
        }
    }

    bool has(const char* key) const { return obj_.contains(key); }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_number()) throw ValidationError(field(key), "expected a number");
        out = v.get<double>();
    }

    void seed(const char* key, std::uint64_t& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ValidationError(field(key), "expected a non-negative integer");
        }
        out = v.get<std::uint64_t>();
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_boolean()) throw ValidationError(field(key), "expected true or false");
        out = v.get<bool>();
    }

    void text(const char* key, std::string& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_string()) throw ValidationError(field(key), "expected a string");
        out = v.get<std::string>();
    }

    void vec6(const char* key, Vec6& out) const {
        if (!has(key)) return;
        const auto& v = obj_.at(key);
        if (!v.is_array() || v.size() != 6) throw ValidationError(field(key), "expected 6 numbers");
        for (int i = 0; i < 6; ++i) {
            if (!v[i].is_number()) throw ValidationError(field(key), "expected 6 numbers");
            out[i] = v[i].get<double>();
        }
    }

    Reader child(const char* key) const { return Reader(obj_.at(key), field(key)); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& obj_;
    std::string path_;
};

void read_integrator(const Reader& r, IntegratorConfig& cfg) {
    r.allow({"method", "step", "abs_tol", "rel_tol", "max_step", "min_step"});
    std::string method = cfg.method == IntegratorMethod::Rk4 ? "rk4" : "rkf45";
    r.text("method", method);
    if (method == "rk4") {
        cfg.method = IntegratorMethod::Rk4;
    } else if (method == "rkf45") {
        cfg.method = IntegratorMethod::Rkf45;
    } else {
        throw ValidationError(r.field("method"), "expected \"rk4\" or \"rkf45\"");
    }
    r.number("step", cfg.step);
    r.number("abs_tol", cfg.abs_tol);
    r.number("rel_tol", cfg.rel_tol);
    r.number("max_step", cfg.max_step);
    r.number("min_step", cfg.min_step);
}

void read_box(const Reader& r, ParamBox& box) {
    r.allow({"r1_min", "r1_max", "r2_min", "r2_max"});
    r.number("r1_min", box.r1_min);
    r.number("r1_max", box.r1_max);
    r.number("r2_min", box.r2_min);
    r.number("r2_max", box.r2_max);
}

void read_noise(const Reader& r, NoiseModelConfig& cfg) {
    r.allow({"eta_min_arcsec", "eta_max_arcsec", "cutoff_hz", "sample_rate", "seed", "enabled"});
    r.number("eta_min_arcsec", cfg.eta_min_arcsec);
    r.number("eta_max_arcsec", cfg.eta_max_arcsec);
    r.number("cutoff_hz", cfg.cutoff_hz);
    r.number("sample_rate", cfg.sample_rate);
    r.seed("seed", cfg.seed);
    r.boolean("enabled", cfg.enabled);
}

void read_disturbance(const Reader& r, DisturbanceConfig& cfg) {
    r.allow({"distribution", "amplitude", "seed"});
    std::string dist = "uniform";
    r.text("distribution", dist);
    if (dist == "uniform") {
        cfg.distribution = DisturbanceDistribution::Uniform;
    } else if (dist == "gaussian") {
        cfg.distribution = DisturbanceDistribution::Gaussian;
    } else {
        throw ValidationError(r.field("distribution"), "expected \"uniform\" or \"gaussian\"");
    }
    r.number("amplitude", cfg.amplitude);
    r.seed("seed", cfg.seed);
}

void read_policy(const Reader& r, ParamSchedulePolicy& p) {
    r.allow({"collinearity_threshold", "clamp"});
    r.number("collinearity_threshold", p.collinearity_threshold);
    r.boolean("clamp", p.clamp);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("scenario parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    Reader root(doc, "");
    root.allow({"mu", "initial_state", "initial_estimate_error", "duration_tu", "integrator", "param_box",
                "noise", "disturbance", "schedule_policy"});

    Scenario sc;
    double mu = sc.mu.value();
    root.number("mu", mu);
    sc.mu = MassRatio(mu);
    root.vec6("initial_state", sc.initial_state);
    root.vec6("initial_estimate_error", sc.initial_estimate_error);
    root.number("duration_tu", sc.duration_tu);
    if (root.has("integrator")) read_integrator(root.child("integrator"), sc.integrator);
    sc.integrator.validate();
    if (root.has("param_box")) read_box(root.child("param_box"), sc.box);
    sc.noise.sample_rate = 1.0 / sc.integrator.step;
    if (root.has("noise")) read_noise(root.child("noise"), sc.noise);
    if (root.has("disturbance")) read_disturbance(root.child("disturbance"), sc.disturbance);
    if (root.has("schedule_policy")) read_policy(root.child("schedule_policy"), sc.policy);
    sc.validate();
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open scenario file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_to_json(const Scenario& sc) {
    auto arr = [](const Vec6& v) {
        json a = json::array();
        for (int i = 0; i < 6; ++i) a.push_back(v[i]);
        return a;
    };
    json j;
    j["mu"] = sc.mu.value();
    j["initial_state"] = arr(sc.initial_state);
    j["initial_estimate_error"] = arr(sc.initial_estimate_error);
    j["duration_tu"] = sc.duration_tu;
    j["integrator"] = {{"method", sc.integrator.method == IntegratorMethod::Rk4 ? "rk4" : "rkf45"},
                       {"step", sc.integrator.step},
                       {"abs_tol", sc.integrator.abs_tol},
                       {"rel_tol", sc.integrator.rel_tol},
                       {"max_step", sc.integrator.max_step},
                       {"min_step", sc.integrator.min_step}};
    j["param_box"] = {{"r1_min", sc.box.r1_min},
                      {"r1_max", sc.box.r1_max},
                      {"r2_min", sc.box.r2_min},
                      {"r2_max", sc.box.r2_max}};
    j["noise"] = {{"eta_min_arcsec", sc.noise.eta_min_arcsec},
                  {"eta_max_arcsec", sc.noise.eta_max_arcsec},
                  {"cutoff_hz", sc.noise.cutoff_hz},
                  {"sample_rate", sc.noise.sample_rate},
                  {"seed", sc.noise.seed},
                  {"enabled", sc.noise.enabled}};
    j["disturbance"] = {
        {"distribution", sc.disturbance.distribution == DisturbanceDistribution::Uniform ? "uniform" : "gaussian"},
        {"amplitude", sc.disturbance.amplitude},
        {"seed", sc.disturbance.seed}};
    j["schedule_policy"] = {{"collinearity_threshold", sc.policy.collinearity_threshold},
                            {"clamp", sc.policy.clamp}};
    return j.dump(2);
}

}  // namespace navsim
