#include "harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace pfc::harness {

using nlohmann::json;

namespace {

constexpr double kDeg = M_PI / 180.0;

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void check_keys(const json& j, const std::vector<std::string>& allowed,
                const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
      throw ConfigError("config: unknown field '" + it.key() + "' in " + where);
  }
}

}  // namespace

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["object"] = {{"length", s.object.length},
                 {"height", s.object.height},
                 {"mass", s.object.mass}};
  j["surface"] = {{"slope_deg", s.surface.slope_deg}, {"mu", s.surface.mu}};
  j["sim"] = {{"dt", s.sim.dt},
              {"motion_thresh_pos", s.sim.motion_thresh_pos},
              {"motion_thresh_ang", s.sim.motion_thresh_ang},
              {"max_force", s.sim.max_force},
              {"speed_gain", s.sim.speed_gain},
              {"snap_tol", s.sim.snap_tol},
              {"gravity", s.sim.gravity},
              {"stiction_multiplier", s.sim.stiction_multiplier},
              {"char_length", s.sim.char_length}};
  j["estimator"] = {{"n_init", s.estimator.n_init},
                    {"sigma", s.estimator.sigma},
                    {"press_force", s.estimator.press_force},
                    {"gamma0_rel", s.estimator.gamma0_rel},
                    {"gamma_growth", s.estimator.gamma_growth},
                    {"max_gamma_levels", s.estimator.max_gamma_levels},
                    {"max_probes", s.estimator.max_probes},
                    {"eps_simplify_deg", s.estimator.eps_simplify_deg},
                    {"explored_dedup_deg", s.estimator.explored_dedup_deg},
                    {"jump_thresh", s.estimator.jump_thresh},
                    {"beta_label", s.estimator.beta_label},
                    {"label_gain", s.estimator.label_gain}};
  j["control"] = {{"kp", s.control.kp},
                  {"kd", s.control.kd},
                  {"beta_pivot", s.control.beta_pivot},
                  {"beta_slide", s.control.beta_slide},
                  {"hold_steps", s.control.hold_steps},
                  {"timeout_steps", s.control.timeout_steps},
                  {"pivot_tolerance_deg", s.control.pivot_tolerance_deg},
                  {"slide_tolerance", s.control.slide_tolerance}};
  json tasks = json::array();
  for (const TaskEntry& t : s.tasks) {
    if (t.kind == "pivot") {
      tasks.push_back({{"kind", t.kind}, {"target_deg", t.target / kDeg}});
    } else {
      tasks.push_back({{"kind", t.kind}, {"target", t.target}});
    }
  }
  j["tasks"] = tasks;
  j["grid"] = {{"lengths", s.grid.lengths},
               {"mus", s.grid.mus},
               {"slopes_deg", s.grid.slopes_deg}};
  j["metric"] = {{"truncation_height", s.metric.truncation_height}};
  j["repetitions"] = s.repetitions;
  j["trials"] = s.trials;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  Scenario s;
  check_keys(j, {"object", "surface", "sim", "estimator", "control", "tasks", "grid",
                 "metric", "repetitions", "trials", "seed"},
             "scenario");
  if (j.contains("object")) {
    const json& o = j["object"];
    check_keys(o, {"length", "height", "mass"}, "object");
    get_if_present(o, "length", s.object.length);
    get_if_present(o, "height", s.object.height);
    get_if_present(o, "mass", s.object.mass);
  }
  if (j.contains("surface")) {
    const json& o = j["surface"];
    check_keys(o, {"slope_deg", "mu"}, "surface");
    get_if_present(o, "slope_deg", s.surface.slope_deg);
    get_if_present(o, "mu", s.surface.mu);
  }
  if (j.contains("sim")) {
    const json& o = j["sim"];
    check_keys(o,
               {"dt", "motion_thresh_pos", "motion_thresh_ang", "max_force", "speed_gain",
                "snap_tol", "gravity", "stiction_multiplier", "char_length"},
               "sim");
    get_if_present(o, "dt", s.sim.dt);
    get_if_present(o, "motion_thresh_pos", s.sim.motion_thresh_pos);
    get_if_present(o, "motion_thresh_ang", s.sim.motion_thresh_ang);
    get_if_present(o, "max_force", s.sim.max_force);
    get_if_present(o, "speed_gain", s.sim.speed_gain);
    get_if_present(o, "snap_tol", s.sim.snap_tol);
    get_if_present(o, "gravity", s.sim.gravity);
    get_if_present(o, "stiction_multiplier", s.sim.stiction_multiplier);
    get_if_present(o, "char_length", s.sim.char_length);
  }
  if (j.contains("estimator")) {
    const json& o = j["estimator"];
    check_keys(o,
               {"n_init", "sigma", "press_force", "gamma0_rel", "gamma_growth",
                "max_gamma_levels", "max_probes", "eps_simplify_deg", "explored_dedup_deg",
                "jump_thresh", "beta_label", "label_gain"},
               "estimator");
    get_if_present(o, "n_init", s.estimator.n_init);
    get_if_present(o, "sigma", s.estimator.sigma);
    get_if_present(o, "press_force", s.estimator.press_force);
    get_if_present(o, "gamma0_rel", s.estimator.gamma0_rel);
    get_if_present(o, "gamma_growth", s.estimator.gamma_growth);
    get_if_present(o, "max_gamma_levels", s.estimator.max_gamma_levels);
    get_if_present(o, "max_probes", s.estimator.max_probes);
    get_if_present(o, "eps_simplify_deg", s.estimator.eps_simplify_deg);
    get_if_present(o, "explored_dedup_deg", s.estimator.explored_dedup_deg);
    get_if_present(o, "jump_thresh", s.estimator.jump_thresh);
    get_if_present(o, "beta_label", s.estimator.beta_label);
    get_if_present(o, "label_gain", s.estimator.label_gain);
  }
  if (j.contains("control")) {
    const json& o = j["control"];
    check_keys(o,
               {"kp", "kd", "beta_pivot", "beta_slide", "hold_steps", "timeout_steps",
                "pivot_tolerance_deg", "slide_tolerance"},
               "control");
    get_if_present(o, "kp", s.control.kp);
    get_if_present(o, "kd", s.control.kd);
    get_if_present(o, "beta_pivot", s.control.beta_pivot);
    get_if_present(o, "beta_slide", s.control.beta_slide);
    get_if_present(o, "hold_steps", s.control.hold_steps);
    get_if_present(o, "timeout_steps", s.control.timeout_steps);
    get_if_present(o, "pivot_tolerance_deg", s.control.pivot_tolerance_deg);
    get_if_present(o, "slide_tolerance", s.control.slide_tolerance);
  }
  if (j.contains("tasks")) {
    s.tasks.clear();
    for (const json& t : j["tasks"]) {
      check_keys(t, {"kind", "target", "target_deg"}, "tasks[]");
      TaskEntry e;
      e.kind = t.at("kind").get<std::string>();
      if (e.kind != "pivot" && e.kind != "slide")
        throw ConfigError("config: task kind must be pivot or slide, got " + e.kind);
      if (t.contains("target_deg")) {
        e.target = t.at("target_deg").get<double>() * kDeg;
      } else if (t.contains("target")) {
        e.target = t.at("target").get<double>();
      } else {
        throw ConfigError("config: task needs target or target_deg");
      }
      s.tasks.push_back(e);
    }
  }
  if (j.contains("grid")) {
    const json& o = j["grid"];
    check_keys(o, {"lengths", "mus", "slopes_deg"}, "grid");
    get_if_present(o, "lengths", s.grid.lengths);
    get_if_present(o, "mus", s.grid.mus);
    get_if_present(o, "slopes_deg", s.grid.slopes_deg);
  }
  if (j.contains("metric")) {
    const json& o = j["metric"];
    check_keys(o, {"truncation_height"}, "metric");
    get_if_present(o, "truncation_height", s.metric.truncation_height);
  }
  get_if_present(j, "repetitions", s.repetitions);
  get_if_present(j, "trials", s.trials);
  get_if_present(j, "seed", s.seed);
  if (s.repetitions < 1) throw ConfigError("config: repetitions must be >= 1");
  if (s.trials < 1) throw ConfigError("config: trials must be >= 1");
  return s;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return scenario_from_json(ss.str());
}

std::uint64_t scenario_hash(const Scenario& s) { return fnv1a(scenario_to_json(s)); }

Simulator make_simulator(const Scenario& s) {
  Surface surf{s.surface.slope_deg * kDeg, Vec2::Zero(), s.surface.mu};
  BodyState body =
      resting_pose(Vec2(s.object.length / 2, s.object.height / 2), s.object.mass, surf);
  return Simulator(body, surf, s.sim);
}

EstimationRun run_estimation(const Scenario& s, int rep, bool keep_sample_trace) {
  Simulator sim = make_simulator(s);
  EstimatorConfig cfg = s.estimator;
  cfg.seed = mix_seed(s.seed, static_cast<std::uint64_t>(rep) + 1);

  EstimationRun out;
  out.rep = rep;
  out.run_seed = cfg.seed;
  out.keep_sample_trace = keep_sample_trace;

  EstimationSession session(sim, cfg);
  session.on_sample = [&](const Wrench& w, const BodyState&) {
    const Vec3 ws = w.scaled(sim.char_length());
    const PolyhedralCone truth = sim.ground_truth_cone();
    const ClassifyResult r = classify_mode(truth, -Wrench::from_scaled(ws, sim.char_length()));
    if (r.label != ModeLabel::Static || r.status != ClassifyStatus::Ok) {
      const ConeProjection p = project_onto_cone(truth, ws, r);
      if (ws.norm() > 1e-12) {
        const double ang = std::asin(std::min(1.0, p.distance / ws.norm()));
        out.worst_violation_rad = std::max(out.worst_violation_rad, ang);
      }
    }
    if (keep_sample_trace) out.sample_trace.push_back({ws, truth.edges});
  };

  session.initialize();
  out.stats = session.explore();
  PolyhedralCone finalized = session.finalize();
  LabelReport report = session.label_faces(finalized);
  out.cone = report.cone;
  out.stats.warnings.insert(out.stats.warnings.end(), report.stats.warnings.begin(),
                            report.stats.warnings.end());

  const PolyhedralCone truth = sim.ground_truth_cone();
  out.v = metric_v(out.cone, truth, s.metric);
  out.provenance.seed = cfg.seed;
  out.provenance.config_hash = scenario_hash(s);
  out.provenance.phi = sim.state().phi;
  return out;
}

std::vector<CellResult> run_sweep(const Scenario& s, bool keep_sample_trace) {
  std::vector<CellResult> cells;
  for (double slope : s.grid.slopes_deg)
    for (double mu : s.grid.mus)
      for (double length : s.grid.lengths) {
        Scenario cell = s;
        cell.object.length = length;
        cell.surface.mu = mu;
        cell.surface.slope_deg = slope;
        // The cell seed deliberately ignores the slope: slope studies then
        // reuse identical perturbation streams per repetition and compare
        // the slope effect alone.
        const std::uint64_t key =
            static_cast<std::uint64_t>(std::llround(length * 1e6)) * 1000003ULL ^
            static_cast<std::uint64_t>(std::llround(mu * 1e6));
        cell.seed = mix_seed(s.seed, 0x5eedULL + key);
        CellResult res;
        res.length = length;
        res.mu = mu;
        res.slope_deg = slope;
        std::vector<double> vs;
        for (int rep = 0; rep < s.repetitions; ++rep) {
          try {
            res.runs.push_back(run_estimation(cell, rep, keep_sample_trace));
          } catch (const Error& e) {
            // A failed repetition scores zero and is visible downstream
            // through the missing labels.
            EstimationRun failed;
            failed.rep = rep;
            failed.v = 0.0;
            failed.stats.warnings.push_back(std::string("run failed: ") + e.what());
            res.runs.push_back(std::move(failed));
          }
          vs.push_back(res.runs.back().v);
        }
        res.v_summary = summarize(vs);
        cells.push_back(std::move(res));
      }
  return cells;
}

ManipulationTrial run_manipulation(const Scenario& s, const PolyhedralCone& cone) {
  ManipulationTrial trial;
  Simulator sim = make_simulator(s);
  sim.set_logging(true);

  PolyhedralCone current = cone;
  ModeLabel last_pivot = ModeLabel::Static;
  const Vec2 t_b = sim.surface().tangent();

  for (const TaskEntry& entry : s.tasks) {
    TaskSpec task;
    Gains gains;
    gains.kp = s.control.kp;
    gains.kd = s.control.kd;
    task.hold_steps = s.control.hold_steps;
    task.timeout_steps = s.control.timeout_steps;

    PhaseResult phase;
    phase.kind = entry.kind;

    if (entry.kind == "pivot") {
      task.kind = TaskSpec::Kind::Pivot;
      task.target = entry.target;
      task.tolerance = s.control.pivot_tolerance_deg * kDeg;
      gains.beta = s.control.beta_pivot;

      // Pivot-contact drift: the physical corner the motion anchors on.
      auto pre = sim.contacts();
      const ModeLabel mode = entry.target < 0 ? ModeLabel::PivotCw : ModeLabel::PivotCcw;
      Vec2 corner_w(0, 0);
      bool have_corner = false;
      if (pre.size() == 2) {
        corner_w = (mode == ModeLabel::PivotCw ? pre[1] : pre[0]).position_w;
        have_corner = true;
      } else if (pre.size() == 1) {
        corner_w = pre[0].position_w;
        have_corner = true;
      }
      const Vec2 before = sim.state().to_base(corner_w);

      TaskResult r = run_task(sim, current, task, gains);
      current = r.cone;
      last_pivot = mode;
      phase.status = r.status;
      phase.steps = r.steps;
      phase.duration = r.duration;
      phase.final_error = r.final_error;
      if (have_corner) phase.pivot_drift = (sim.state().to_base(corner_w) - before).norm();
    } else {
      task.kind = TaskSpec::Kind::Slide;
      task.target = entry.target;
      task.tolerance = s.control.slide_tolerance;
      task.resting_face = sim.last_contact_count() == 1 ? last_pivot : ModeLabel::Static;
      gains.beta = s.control.beta_slide;

      const Vec2 before = sim.state().position();
      TaskResult r = run_task(sim, current, task, gains);
      current = r.cone;
      phase.status = r.status;
      phase.steps = r.steps;
      phase.duration = r.duration;
      phase.final_error = r.final_error;
      trial.net_slide += (sim.state().position() - before).dot(t_b);
    }
    trial.phases.push_back(phase);
    if (phase.status != TaskStatus::Success) {
      trial.success = false;
      break;
    }
  }
  trial.final_state = sim.state();
  trial.log = sim.log();
  return trial;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + tmp + " for writing");
    os << content;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw ConfigError("cannot rename " + tmp + " to " + path);
}

namespace {
std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace

std::string metric_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "length,mu,slope_deg,rep,seed,v\n";
  for (const CellResult& c : cells)
    for (const EstimationRun& r : c.runs)
      os << fmt_g(c.length) << ',' << fmt_g(c.mu) << ',' << fmt_g(c.slope_deg) << ','
         << r.rep << ',' << r.run_seed << ',' << fmt_g(r.v) << "\n";
  return os.str();
}

std::string summary_csv(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  os << "length,mu,slope_deg,count,min,q1,median,q3,max\n";
  for (const CellResult& c : cells)
    os << fmt_g(c.length) << ',' << fmt_g(c.mu) << ',' << fmt_g(c.slope_deg) << ','
       << c.v_summary.count << ',' << fmt_g(c.v_summary.min) << ',' << fmt_g(c.v_summary.q1)
       << ',' << fmt_g(c.v_summary.median) << ',' << fmt_g(c.v_summary.q3) << ','
       << fmt_g(c.v_summary.max) << "\n";
  return os.str();
}

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open csv file " + path);
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(ch);
      }
    }
    cells.push_back(cur);
    if (first) {
      t.header = cells;
      first = false;
    } else {
      t.rows.push_back(cells);
    }
  }
  if (t.header.empty()) throw ConfigError("csv file " + path + " is empty");
  return t;
}

}  // namespace pfc::harness
