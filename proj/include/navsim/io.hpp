#pragma once

// File formats: run CSV, summary JSON, observer gain JSON, propagated
// trajectory CSV, and a gnuplot script for quick looks.

#include <filesystem>
#include <iosfwd>
#include <string>

#include "navsim/hinf.hpp"
#include "navsim/integrator.hpp"
#include "navsim/simulation.hpp"

namespace navsim {

// Column names of the run CSV, in order.
const std::string& run_csv_header();

// All numbers at 17 significant digits so a reload reproduces every double.
std::string format_double(double v);

void write_run_csv(const RunResult& r, std::ostream& out);
// Throws IoError.
void export_csv(const RunResult& r, const std::filesystem::path& path);

// Recomputes the statistics from the stored error columns. Throws SchemaError
// on a wrong header, short rows, bad numbers or an empty body.
SummaryStats analyze(std::istream& in, double settle_time = kDefaultSettleTime);
SummaryStats analyze(const std::filesystem::path& path, double settle_time = kDefaultSettleTime);

std::string summary_json(const SummaryStats& s);
std::string summary_json(const MonteCarloResult& mc);
void export_summary(const SummaryStats& s, const std::filesystem::path& path);
void export_summary(const MonteCarloResult& mc, const std::filesystem::path& path);

// FNV-1a over a canonical dump of everything that determines the gain.
std::string config_hash(const SynthesisConfig& cfg, const PlantModel& model);

std::string gain_to_json(const ObserverGain& g);
// Throws ParseError / ValidationError.
ObserverGain gain_from_json(const std::string& text);
void save_gain(const ObserverGain& g, const std::filesystem::path& path);
ObserverGain load_gain(const std::filesystem::path& path);

// Columns t, x..vz, jacobi.
void export_trajectory(const Trajectory& traj, MassRatio mu, const std::filesystem::path& path);

// Plots the three position error components of a run CSV on a log scale.
void write_gnuplot_script(const std::filesystem::path& csv, const std::filesystem::path& script);

}  // namespace navsim
