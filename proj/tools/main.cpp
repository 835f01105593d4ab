#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "harness.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace pfc;
using namespace pfc::harness;

namespace {

Scenario resolve_scenario(const std::string& config_path, std::uint64_t seed_override,
                          bool has_seed) {
  Scenario s = config_path.empty() ? Scenario{} : load_scenario_file(config_path);
  if (has_seed) s.seed = seed_override;
  return s;
}

std::string cell_dir_name(const CellResult& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "L%g_mu%g_s%g", c.length, c.mu, c.slope_deg);
  return buf;
}

void write_estimates(const fs::path& dir, const std::vector<EstimationRun>& runs) {
  fs::create_directories(dir);
  for (const EstimationRun& r : runs) {
    std::ostringstream os;
    write_estimate(os, r.cone, r.provenance);
    write_text_file((dir / ("estimate_r" + std::to_string(r.rep) + ".est")).string(),
                    os.str());
  }
}

int warn_count(const std::vector<EstimationRun>& runs) {
  int n = 0;
  for (const EstimationRun& r : runs) n += static_cast<int>(r.stats.warnings.size());
  return n;
}

PolyhedralCone cone_from_source(const Scenario& s, const std::string& source) {
  if (source == "analytical") return make_simulator(s).ground_truth_cone();
  EstimateDocument doc = read_estimate_file(source);
  if (!doc.cone.labelled)
    throw ConfigError("estimate file " + source + " carries no labels");
  return doc.cone;
}

std::string manipulation_csv(const std::vector<ManipulationTrial>& trials) {
  std::ostringstream os;
  os << "trial,phase,kind,status,steps,duration,final_error,pivot_drift,net_slide\n";
  auto status_str = [](TaskStatus st) {
    switch (st) {
      case TaskStatus::Success: return "success";
      case TaskStatus::Timeout: return "timeout";
      case TaskStatus::ContactLost: return "contact_lost";
    }
    return "unknown";
  };
  for (size_t t = 0; t < trials.size(); ++t) {
    for (size_t p = 0; p < trials[t].phases.size(); ++p) {
      const PhaseResult& ph = trials[t].phases[p];
      char buf[256];
      std::snprintf(buf, sizeof buf, "%zu,%zu,%s,%s,%d,%.12g,%.12g,%.12g,%.12g\n", t, p,
                    ph.kind.c_str(), status_str(ph.status), ph.steps, ph.duration,
                    ph.final_error, ph.pivot_drift, trials[t].net_slide);
      os << buf;
    }
  }
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyhedral friction cone estimation and contact-mode control toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", cone_source = "analytical";
  std::string estimate_path, estimate2_path, plot_kind = "box", plot_in, plot_out;
  std::uint64_t seed = 0;
  bool print_config = false;
  int trials_override = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Scenario config JSON");
    cmd->add_option("--seed", seed, "Seed override");
    cmd->add_option("--out-dir", out_dir, "Output directory");
    cmd->add_flag("--print-config", print_config,
                  "Print the fully defaulted config and exit");
  };

  CLI::App* cmd_estimate =
      app.add_subcommand("estimate", "Estimate the friction cone for one configuration");
  add_common(cmd_estimate);

  CLI::App* cmd_sweep =
      app.add_subcommand("sweep", "Run the estimation grid and summarize the metric");
  add_common(cmd_sweep);

  CLI::App* cmd_manipulate =
      app.add_subcommand("manipulate", "Run the pivot/slide task list with a cone");
  add_common(cmd_manipulate);
  cmd_manipulate->add_option("--cone", cone_source,
                             "'analytical' or a path to an estimate document");
  cmd_manipulate->add_option("--trials", trials_override, "Trial count override");

  CLI::App* cmd_metric = app.add_subcommand(
      "metric", "Volume-overlap score of an estimate against the analytical cone");
  cmd_metric->add_option("--config", config_path, "Scenario config JSON");
  cmd_metric->add_option("--estimate", estimate_path, "Estimate document")->required();
  cmd_metric->add_option("--estimate2", estimate2_path,
                         "Second estimate; score the two against each other");

  CLI::App* cmd_plot = app.add_subcommand("plot", "Render CSV results as SVG");
  cmd_plot->add_option("--kind", plot_kind, "box | traj");
  cmd_plot->add_option("--in", plot_in, "Input CSV (comma separated list for traj)")
      ->required();
  cmd_plot->add_option("--out", plot_out, "Output SVG path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const bool has_seed = app.count_all() && (cmd_estimate->count("--seed") ||
                                              cmd_sweep->count("--seed") ||
                                              cmd_manipulate->count("--seed"));
    if (cmd_estimate->parsed() || cmd_sweep->parsed() || cmd_manipulate->parsed()) {
      Scenario s = resolve_scenario(config_path, seed, has_seed);
      if (print_config) {
        std::cout << scenario_to_json(s);
        return 0;
      }
      fs::create_directories(out_dir);

      if (cmd_estimate->parsed()) {
        CellResult cell;
        cell.length = s.object.length;
        cell.mu = s.surface.mu;
        cell.slope_deg = s.surface.slope_deg;
        std::vector<double> vs;
        for (int rep = 0; rep < s.repetitions; ++rep) {
          cell.runs.push_back(run_estimation(s, rep));
          vs.push_back(cell.runs.back().v);
        }
        cell.v_summary = summarize(vs);
        write_estimates(out_dir, cell.runs);
        write_text_file((fs::path(out_dir) / "metric.csv").string(), metric_csv({cell}));
        std::printf("estimate: %d runs, v median %.3f (min %.3f, max %.3f), %d warnings\n",
                    cell.v_summary.count, cell.v_summary.median, cell.v_summary.min,
                    cell.v_summary.max, warn_count(cell.runs));
        return 0;
      }

      if (cmd_sweep->parsed()) {
        std::vector<CellResult> cells = run_sweep(s);
        for (const CellResult& c : cells)
          write_estimates(fs::path(out_dir) / cell_dir_name(c), c.runs);
        write_text_file((fs::path(out_dir) / "metric.csv").string(), metric_csv(cells));
        write_text_file((fs::path(out_dir) / "summary.csv").string(), summary_csv(cells));
        for (const CellResult& c : cells)
          std::printf("cell %s: v median %.3f iqr [%.3f, %.3f]\n", cell_dir_name(c).c_str(),
                      c.v_summary.median, c.v_summary.q1, c.v_summary.q3);
        return 0;
      }

      // manipulate
      PolyhedralCone cone = cone_from_source(s, cone_source);
      const int trials = trials_override > 0 ? trials_override : s.trials;
      std::vector<ManipulationTrial> results;
      int failures = 0;
      for (int t = 0; t < trials; ++t) {
        results.push_back(run_manipulation(s, cone));
        const ManipulationTrial& tr = results.back();
        if (!tr.success) ++failures;
        std::ostringstream os;
        tr.log.write_csv(os);
        write_text_file(
            (fs::path(out_dir) / ("traj_t" + std::to_string(t) + ".csv")).string(),
            os.str());
        for (const PhaseResult& ph : tr.phases)
          std::printf("trial %d %s: %s in %.2fs, error %.4g, drift %.4g m\n", t,
                      ph.kind.c_str(),
                      ph.status == TaskStatus::Success ? "success" : "FAILED", ph.duration,
                      ph.final_error, ph.pivot_drift);
      }
      write_text_file((fs::path(out_dir) / "manipulation.csv").string(),
                      manipulation_csv(results));
      if (failures > 0) {
        std::fprintf(stderr, "manipulate: %d of %d trials failed\n", failures, trials);
        return 1;
      }
      return 0;
    }

    if (cmd_metric->parsed()) {
      Scenario s = config_path.empty() ? Scenario{} : load_scenario_file(config_path);
      EstimateDocument a = read_estimate_file(estimate_path);
      double v = 0.0;
      if (!estimate2_path.empty()) {
        EstimateDocument b = read_estimate_file(estimate2_path);
        v = metric_v(a.cone, b.cone, s.metric);
      } else {
        v = metric_v(a.cone, make_simulator(s).ground_truth_cone(), s.metric);
      }
      std::printf("v = %.6f\n", v);
      return 0;
    }

    if (cmd_plot->parsed()) {
      std::string svg;
      if (plot_kind == "box") {
        svg = box_plot_svg(read_csv_file(plot_in));
      } else if (plot_kind == "traj") {
        std::vector<CsvTable> tables;
        std::string cur;
        std::stringstream ss(plot_in);
        while (std::getline(ss, cur, ',')) tables.push_back(read_csv_file(cur));
        svg = trajectory_plot_svg(tables);
      } else {
        throw ConfigError("plot: --kind must be box or traj");
      }
      write_text_file(plot_out, svg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
