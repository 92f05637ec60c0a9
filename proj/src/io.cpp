#include "navsim/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "navsim/errors.hpp"

namespace navsim {

using nlohmann::json;

namespace {

constexpr std::size_t kRunColumns = 30;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_double(std::string_view s, std::size_t row) {
    // strtod rather than from_chars: gcc 11 lacks the floating overloads.
    std::string tmp(s);
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size()) {
        throw SchemaError("row " + std::to_string(row) + ": bad number '" + tmp + "'");
    }
    return v;
}

json array6(const std::array<double, 6>& a) { return json(std::vector<double>(a.begin(), a.end())); }

json stats_json(const SummaryStats& s) {
    std::array<double, 6> km{};
    for (int i = 0; i < 3; ++i) km[i] = du_to_km(s.post_max[i]);
    return {{"samples", s.samples},
            {"post_samples", s.post_samples},
            {"settle_time_tu", s.settle_time},
            {"max_abs", array6(s.max_abs)},
            {"rms", array6(s.rms)},
            {"post_max", array6(s.post_max)},
            {"post_max_position_km", std::vector<double>(km.begin(), km.begin() + 3)},
            {"post_position_max", s.post_position_max()},
            {"post_position_max_km", du_to_km(s.post_position_max())},
            {"worst_position_axis", std::string(1, "xyz"[s.worst_position_axis()])},
            {"fallback_count", s.fallback_count},
            {"clamp_count", s.clamp_count}};
}

json box_json(const ParamBox& b) {
    return {{"r1_min", b.r1_min}, {"r1_max", b.r1_max}, {"r2_min", b.r2_min}, {"r2_max", b.r2_max}};
}

}  // namespace

const std::string& run_csv_header() {
    static const std::string h =
        "t,x,y,z,vx,vy,vz,xh,yh,zh,vxh,vyh,vzh,ex,ey,ez,evx,evy,evz,"
        "ym1,ym2,ym3,ym4,ym5,ym6,r1_used,r2_used,rho_source,one_minus_c2,closure_residual";
    return h;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_run_csv(const RunResult& r, std::ostream& out) {
    out << run_csv_header() << '\n';
    std::string line;
    auto put = [&](double v) {
        line += format_double(v);
        line += ',';
    };
    for (std::size_t k = 0; k < r.size(); ++k) {
        line.clear();
        put(r.t[k]);
        const Vec6 e = r.error(k);
        for (int i = 0; i < 6; ++i) put(r.truth[k][i]);
        for (int i = 0; i < 6; ++i) put(r.estimate[k][i]);
        for (int i = 0; i < 6; ++i) put(e[i]);
        for (int i = 0; i < 6; ++i) put(r.y_m[k][i]);
        const auto& s = r.schedule[k];
        put(s.rho.r1);
        put(s.rho.r2);
        line += to_string(s.source);
        line += ',';
        put(s.one_minus_c2);
        line += format_double(s.residual);
        line += '\n';
        out << line;
    }
}

void export_csv(const RunResult& r, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_run_csv(r, out);
    finish(out, path);
}

SummaryStats analyze(std::istream& in, double settle_time) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty run CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != run_csv_header()) throw SchemaError("run CSV header does not match the expected columns");

    StatsAccumulator acc(settle_time);
    std::size_t row = 0;
    bool complete = true;
    while (std::getline(in, line)) {
        ++row;
        complete = !in.eof();
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) throw SchemaError("row " + std::to_string(row) + ": empty line");
        const auto cols = split(line);
        if (cols.size() != kRunColumns) {
            throw SchemaError("row " + std::to_string(row) + ": expected " + std::to_string(kRunColumns) +
                              " columns, got " + std::to_string(cols.size()));
        }
        const double t = parse_double(cols[0], row);
        Vec6 e;
        for (int i = 0; i < 6; ++i) e[i] = parse_double(cols[13 + i], row);
        for (std::size_t c = 1; c < kRunColumns; ++c) {
            if (c != 27) parse_double(cols[c], row);
        }
        acc.add(t, e, rho_source_from_string(cols[27]));
    }
    if (row == 0) throw SchemaError("run CSV has no data rows");
    if (!complete) throw SchemaError("run CSV is truncated (last row lacks a line terminator)");
    return acc.finish();
}

SummaryStats analyze(const std::filesystem::path& path, double settle_time) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return analyze(in, settle_time);
}

std::string summary_json(const SummaryStats& s) { return stats_json(s).dump(2); }

std::string summary_json(const MonteCarloResult& mc) {
    const auto& a = mc.aggregate;
    json runs = json::array();
    for (std::size_t i = 0; i < mc.runs.size(); ++i) {
        json r = stats_json(mc.runs[i]);
        r["seed"] = mc.seeds[i];
        runs.push_back(std::move(r));
    }
    json j = {{"runs", a.runs},
              {"post_max", array6(a.post_max)},
              {"position_max", a.position_max},
              {"position_median", a.position_median},
              {"position_p95", a.position_p95},
              {"position_max_km", du_to_km(a.position_max)},
              {"worst_axis_votes", {{"x", a.worst_axis_votes[0]}, {"y", a.worst_axis_votes[1]}, {"z", a.worst_axis_votes[2]}}},
              {"per_run", std::move(runs)}};
    return j.dump(2);
}

void export_summary(const SummaryStats& s, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << summary_json(s) << '\n';
    finish(out, path);
}

void export_summary(const MonteCarloResult& mc, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << summary_json(mc) << '\n';
    finish(out, path);
}

std::string config_hash(const SynthesisConfig& cfg, const PlantModel& model) {
    std::ostringstream s;
    s.precision(17);
    s << model.mu.value() << ' ' << model.box.r1_min << ' ' << model.box.r1_max << ' ' << model.box.r2_min << ' '
      << model.box.r2_max << ' ' << model.eta_min << ' ' << model.eta_max << ' ' << cfg.synthesis_n1 << ' '
      << cfg.synthesis_n2 << ' ' << cfg.validation_n1 << ' ' << cfg.validation_n2 << ' ' << cfg.gamma_tol << ' '
      << cfg.restarts << ' ' << cfg.max_sweeps << ' ' << cfg.initial_step << ' ' << cfg.min_step << ' '
      << cfg.pole_scale << ' ' << cfg.adequacy << ' ' << cfg.max_densify << ' ' << cfg.max_frequency << ' '
      << cfg.seed;
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, h);
    return buf;
}

std::string gain_to_json(const ObserverGain& g) {
    json rows = json::array();
    for (int i = 0; i < 6; ++i) {
        json row = json::array();
        for (int j = 0; j < 6; ++j) row.push_back(g.L(i, j));
        rows.push_back(std::move(row));
    }
    json extra = json::array();
    for (const auto& p : g.extra_points) extra.push_back({p.r1, p.r2});
    json j = {{"L", std::move(rows)},
              {"gamma", g.gamma},
              {"box", box_json(g.box)},
              {"grids",
               {{"synthesis", {g.synthesis_n1, g.synthesis_n2}},
                {"validation", {g.validation_n1, g.validation_n2}},
                {"extra_points", std::move(extra)}}},
              {"config_hash", g.config_hash},
              {"diagnostics",
               {{"gamma_synthesis", g.gamma_synthesis},
                {"stability_margin", g.stability_margin},
                {"evaluations", g.log.evaluations},
                {"sweeps", g.log.sweeps},
                {"restarts", g.log.restarts_run},
                {"densify_rounds", g.log.densify_rounds}}}};
    return j.dump(2);
}

ObserverGain gain_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("gain parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("gain", "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (k != "L" && k != "gamma" && k != "box" && k != "grids" && k != "config_hash" && k != "diagnostics") {
            throw ValidationError(k, "unknown key in gain file");
        }
    }
    for (const char* k : {"L", "gamma", "box", "grids", "config_hash"}) {
        if (!j.contains(k)) throw ValidationError(k, "missing from gain file");
    }

    ObserverGain g;
    try {
        const auto& L = j.at("L");
        if (!L.is_array() || L.size() != 6) throw ValidationError("L", "expected 6 rows of 6 numbers");
        for (int r = 0; r < 6; ++r) {
            if (!L[r].is_array() || L[r].size() != 6) throw ValidationError("L", "expected 6 rows of 6 numbers");
            for (int c = 0; c < 6; ++c) g.L(r, c) = L[r][c].get<double>();
        }
        g.gamma = j.at("gamma").get<double>();
        const auto& b = j.at("box");
        g.box = {b.at("r1_min").get<double>(), b.at("r1_max").get<double>(), b.at("r2_min").get<double>(),
                 b.at("r2_max").get<double>()};
        const auto& grids = j.at("grids");
        g.synthesis_n1 = grids.at("synthesis").at(0).get<int>();
        g.synthesis_n2 = grids.at("synthesis").at(1).get<int>();
        g.validation_n1 = grids.at("validation").at(0).get<int>();
        g.validation_n2 = grids.at("validation").at(1).get<int>();
        if (grids.contains("extra_points")) {
            for (const auto& p : grids.at("extra_points")) g.extra_points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
        }
        g.config_hash = j.at("config_hash").get<std::string>();
        if (j.contains("diagnostics")) {
            const auto& d = j.at("diagnostics");
            g.gamma_synthesis = d.value("gamma_synthesis", g.gamma);
            g.stability_margin = d.value("stability_margin", 0.0);
        }
    } catch (const json::exception& e) {
        throw ValidationError("gain", e.what());
    }
    if (!g.L.allFinite()) throw ValidationError("L", "must be finite");
    g.box.validate();
    return g;
}

void save_gain(const ObserverGain& g, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << gain_to_json(g) << '\n';
    finish(out, path);
}

ObserverGain load_gain(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open gain file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return gain_from_json(buf.str());
}

void export_trajectory(const Trajectory& traj, MassRatio mu, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "t,x,y,z,vx,vy,vz,jacobi\n";
    std::string line;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        line = format_double(traj.times[k]);
        for (int i = 0; i < 6; ++i) {
            line += ',';
            line += format_double(traj.states[k][i]);
        }
        line += ',';
        line += format_double(jacobi_constant(traj.states[k], mu));
        line += '\n';
        out << line;
    }
    finish(out, path);
}

void write_gnuplot_script(const std::filesystem::path& csv, const std::filesystem::path& script) {
    auto out = open_out(script);
    out << "set datafile separator ','\n"
           "set key autotitle columnhead\n"
           "set logscale y\n"
           "set xlabel 't [TU]'\n"
           "set ylabel '|position error| [DU]'\n"
           "plot '"
        << csv.string()
        << "' using 1:(abs($14)) with lines title 'x', "
           "'' using 1:(abs($15)) with lines title 'y', "
           "'' using 1:(abs($16)) with lines title 'z'\n";
    finish(out, script);
}

}  // namespace navsim
