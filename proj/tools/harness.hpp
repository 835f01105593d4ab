#pragma once

// Experiment harness: scenario configuration, estimation/manipulation
// runners and their file outputs. Shared by the command-line tool and the
// acceptance suite.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfc/control.hpp"
#include "pfc/estimate_io.hpp"
#include "pfc/estimator.hpp"
#include "pfc/eval.hpp"
#include "pfc/sim.hpp"

namespace pfc::harness {

struct ObjectSpec {
  double length = 0.10;  // m
  double height = 0.05;  // m
  double mass = 0.1;     // kg
};

struct SurfaceSpec {
  double slope_deg = 0.0;
  double mu = 0.5;
};

struct ControlSpec {
  double kp = 2.5;
  double kd = 0.79;
  double beta_pivot = 10.0;
  double beta_slide = 2.0;
  int hold_steps = 20;
  int timeout_steps = 40000;
  double pivot_tolerance_deg = 0.5;
  double slide_tolerance = 0.002;  // m
};

struct TaskEntry {
  std::string kind = "pivot";  // pivot | slide
  double target = 0.0;         // rad or m, signed
};

struct GridSpec {
  std::vector<double> lengths = {0.05, 0.10, 0.30};
  std::vector<double> mus = {0.5, 0.6, 0.7};
  std::vector<double> slopes_deg = {0.0};
};

struct Scenario {
  ObjectSpec object;
  SurfaceSpec surface;
  SimConfig sim;
  EstimatorConfig estimator;
  ControlSpec control;
  std::vector<TaskEntry> tasks = {{"pivot", -20.0 * M_PI / 180.0}, {"slide", 0.06}};
  GridSpec grid;
  MetricConfig metric;
  int repetitions = 10;
  int trials = 5;
  std::uint64_t seed = 1;
};

/// Fully defaulted scenario serialized as JSON, and the reverse. Unknown
/// keys are rejected with a field diagnostic.
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::uint64_t scenario_hash(const Scenario& s);

Simulator make_simulator(const Scenario& s);

struct EstimationRun {
  double v = 0.0;
  PolyhedralCone cone;
  EstimateProvenance provenance;
  ExploreStats stats;
  int rep = 0;
  std::uint64_t run_seed = 0;
  double worst_violation_rad = 0.0;  // vs the live ground-truth cone
  // Per-sample record for external verification: the scaled sample and the
  // ground-truth cone edges at record time.
  std::vector<std::pair<Vec3, std::vector<Vec3>>> sample_trace;
  bool keep_sample_trace = false;
};

/// One estimation repetition: initialize, explore, finalize, label, score.
EstimationRun run_estimation(const Scenario& s, int rep, bool keep_sample_trace = false);

struct CellResult {
  double length = 0.0;
  double mu = 0.0;
  double slope_deg = 0.0;
  std::vector<EstimationRun> runs;
  Summary v_summary;
};

/// Sweep over the scenario grid; repetitions per cell.
std::vector<CellResult> run_sweep(const Scenario& s, bool keep_sample_trace = false);

struct PhaseResult {
  std::string kind;
  TaskStatus status = TaskStatus::Success;
  int steps = 0;
  double duration = 0.0;
  double final_error = 0.0;
  double pivot_drift = 0.0;  // m, pivot-contact motion over a pivot phase
};

struct ManipulationTrial {
  bool success = true;
  std::vector<PhaseResult> phases;
  TrajectoryLog log;
  BodyState final_state;
  double net_slide = 0.0;  // m along the tangent over slide phases
};

/// One manipulation trial from the rest pose with the given labelled cone.
ManipulationTrial run_manipulation(const Scenario& s, const PolyhedralCone& cone);

/// CSV emission. All writes go through a temp file and an atomic rename.
void write_text_file(const std::string& path, const std::string& content);
std::string metric_csv(const std::vector<CellResult>& cells);
std::string summary_csv(const std::vector<CellResult>& cells);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  int column(const std::string& name) const;  // -1 when absent
};
CsvTable read_csv_file(const std::string& path);

}  // namespace pfc::harness
