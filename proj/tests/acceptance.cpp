// Acceptance suite: runs every gate criterion end to end and prints one
// pass/fail line each. Exit code equals the number of failed criteria.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "harness.hpp"
#include "oracles.hpp"
#include "pfc/control.hpp"
#include "pfc/estimator.hpp"
#include "pfc/eval.hpp"

namespace fs = std::filesystem;
using namespace pfc;
using namespace pfc::harness;

namespace {

constexpr double kDeg = M_PI / 180.0;
int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string read_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// --- criterion 1: classification vs the quasi-static enumeration oracle ---

void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s;  // defaults: 10 cm, mu 0.5, flat
  Simulator sim = make_simulator(s);
  const PolyhedralCone cone = sim.ground_truth_cone();
  auto contacts = sim.contacts();
  oracle::TwoContactSetup setup{contacts[0].position_w, contacts[1].position_w, Vec2(0, 1),
                                s.surface.mu, sim.char_length()};

  Rng rng(20260808);
  int agree = 0, mismatch = 0, checked = 0, skipped = 0;
  for (int i = 0; i < 10000; ++i) {
    Vec3 dir(rng.gaussian(), rng.gaussian(), rng.gaussian());
    if (dir.norm() < 1e-9) continue;
    dir.normalize();
    const Wrench w_a = Wrench::from_scaled(rng.uniform(0.1, 10.0) * dir, sim.char_length());
    const ClassifyResult got = classify_mode(cone, w_a);
    if (got.ambiguous) {
      ++skipped;
      continue;  // inside the 0.5 degree boundary band
    }
    const oracle::ModeOracleResult want = oracle::enumerate_modes(setup, w_a);
    if (want.gap < 1e-9) {
      ++skipped;
      continue;
    }
    ++checked;
    const bool ok = want.separation ? got.status == ClassifyStatus::Separation
                                    : (got.status == ClassifyStatus::Ok &&
                                       to_string(got.label) == to_string(want.label));
    if (ok) {
      ++agree;
    } else {
      ++mismatch;
    }
  }
  const double secs = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "mode classification vs enumeration oracle: %d/%d agree (%d in-band skipped), "
                "%.2f s",
                agree, checked, skipped, secs);
  report(1, mismatch == 0 && checked > 8000 && secs < 10.0, buf);
}

// --- criterion 2: iterated edge transform stays on the contact plane ---

void criterion_2() {
  const Vec2 p_a(-0.05, -0.025);
  const double mu = 0.5, L = 1.0;
  auto edge_at = [&](double side, double phi) {
    const Vec2 f_b = rot2(side * std::atan(mu)) * Vec2(0, 1);
    const Vec2 f = rot2(phi).transpose() * f_b;
    Vec3 w(f.x(), f.y(), cross2(p_a, f) / L);
    return w.normalized();
  };
  Vec3 r = edge_at(-1.0, 0.0), l = edge_at(1.0, 0.0);
  const Vec3 m = coplanarity_normal(r, l);
  // Angle between near-parallel unit vectors through the cross product;
  // acos saturates at the double-precision floor around 2e-8.
  auto angle_err = [](const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
  };
  double worst_plane = 0.0, worst_angle = 0.0;
  for (int k = 1; k <= 45; ++k) {
    r = transform_edge(r, 1.0 * kDeg, m);
    l = transform_edge(l, 1.0 * kDeg, m);
    worst_plane = std::max({worst_plane, std::abs(m.dot(r)), std::abs(m.dot(l))});
    worst_angle = std::max({worst_angle, angle_err(r, edge_at(-1.0, k * kDeg)),
                            angle_err(l, edge_at(1.0, k * kDeg))});
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "coplanarity over 0..45 deg: max |m.w| %.2e, max angular error %.2e rad",
                worst_plane, worst_angle);
  report(2, worst_plane <= 1e-9 && worst_angle <= 1e-9, buf);
}

// --- criteria 3 and 5 share the estimation sweep ---

double sample_violation_deg(const std::pair<Vec3, std::vector<Vec3>>& rec) {
  const auto& [w, edges] = rec;
  if (w.norm() <= 1e-12) return 0.0;
  const oracle::NnlsResult p = oracle::project_cone_nnls(edges, w);
  return std::asin(std::min(1.0, p.distance / w.norm())) / kDeg;
}

std::vector<CellResult> criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  Scenario s;
  s.repetitions = 10;
  s.grid.lengths = {0.05, 0.10, 0.30};
  s.grid.mus = {0.5, 0.6, 0.7};
  s.grid.slopes_deg = {0.0};
  s.seed = 99;

  std::vector<CellResult> cells;
  std::string fail;
  try {
    cells = run_sweep(s, /*keep_sample_trace=*/true);
  } catch (const std::exception& e) {
    fail = e.what();
  }

  double worst_violation = 0.0, worst_median = 1.0;
  if (fail.empty()) {
    for (const CellResult& c : cells) {
      worst_median = std::min(worst_median, c.v_summary.median);
      for (const EstimationRun& r : c.runs)
        for (const auto& rec : r.sample_trace)
          worst_violation = std::max(worst_violation, sample_violation_deg(rec));
    }
  }
  const double secs = seconds_since(t0);
  char buf[300];
  if (!fail.empty()) {
    std::snprintf(buf, sizeof buf, "estimation sweep raised: %s", fail.c_str());
    report(3, false, buf);
    return cells;
  }
  std::snprintf(buf, sizeof buf,
                "3x3 grid, 10 reps: worst sample violation %.2f deg (limit 3), worst cell "
                "median v %.3f (limit 0.6), %.0f s (limit 300)",
                worst_violation, worst_median, secs);
  report(3, worst_violation <= 3.0 && worst_median >= 0.6 && secs < 300.0, buf);
  return cells;
}

void criterion_4() {
  Scenario s;
  s.repetitions = 10;
  s.grid.lengths = {0.30};
  s.grid.mus = {0.3};
  s.grid.slopes_deg = {0.0, 30.0, 60.0, 90.0};
  s.seed = 1234;

  std::vector<CellResult> cells;
  std::string fail;
  try {
    cells = run_sweep(s);
  } catch (const std::exception& e) {
    fail = e.what();
  }
  if (!fail.empty() || cells.size() != 4) {
    report(4, false, "slope sweep raised: " + fail);
    return;
  }
  int complete = 0;
  for (const CellResult& c : cells)
    for (const EstimationRun& r : c.runs) complete += r.cone.labelled ? 1 : 0;
  bool overlap = true;
  for (size_t i = 0; i < cells.size(); ++i)
    for (size_t j = i + 1; j < cells.size(); ++j) {
      const Summary &a = cells[i].v_summary, &b = cells[j].v_summary;
      if (a.q1 > b.q3 || b.q1 > a.q3) overlap = false;
    }
  std::ostringstream detail;
  detail << "slopes {0,30,60,90}: " << complete << "/40 runs complete, IQRs";
  for (const CellResult& c : cells) {
    char b[64];
    std::snprintf(b, sizeof b, " [%.2f,%.2f]", c.v_summary.q1, c.v_summary.q3);
    detail << b;
  }
  detail << (overlap ? " pairwise overlap" : " DO NOT overlap");
  report(4, complete == 40 && overlap, detail.str());
}

void criterion_5(const std::vector<CellResult>& sweep_cells) {
  Scenario s;
  s.trials = 5;

  // Cones under test: analytical plus the best, median and worst estimates
  // of the 10 cm / mu 0.5 cell.
  const CellResult* cell = nullptr;
  for (const CellResult& c : sweep_cells)
    if (std::abs(c.length - 0.10) < 1e-12 && std::abs(c.mu - 0.5) < 1e-12) cell = &c;
  if (!cell) {
    report(5, false, "manipulation: estimation cell unavailable");
    return;
  }
  std::vector<const EstimationRun*> ranked;
  for (const EstimationRun& r : cell->runs) ranked.push_back(&r);
  std::sort(ranked.begin(), ranked.end(),
            [](const EstimationRun* a, const EstimationRun* b) { return a->v > b->v; });
  const PolyhedralCone analytical = make_simulator(s).ground_truth_cone();
  const PolyhedralCone best = ranked.front()->cone;
  const PolyhedralCone median = ranked[ranked.size() / 2]->cone;
  const PolyhedralCone worst = ranked.back()->cone;

  struct Outcome {
    bool ok = true;
    double pivot_err_deg = 0.0;
    double drift = 0.0;
    double net_slide = 0.0;
    double duration = 0.0;
    std::string why;
  };
  auto run_with = [&](const PolyhedralCone& cone) {
    Outcome o;
    for (int t = 0; t < s.trials && o.ok; ++t) {
      ManipulationTrial tr = run_manipulation(s, cone);
      if (!tr.success || tr.phases.size() != 2) {
        o.ok = false;
        o.why = "trial " + std::to_string(t) + " failed";
        break;
      }
      o.pivot_err_deg = std::max(o.pivot_err_deg, tr.phases[0].final_error / kDeg);
      o.drift = std::max(o.drift, tr.phases[0].pivot_drift);
      o.net_slide = tr.net_slide;
      o.duration += tr.phases[0].duration + tr.phases[1].duration;
      if (tr.phases[0].final_error > 1.0 * kDeg) {
        o.ok = false;
        o.why = "pivot angle error above 1 deg";
      }
      if (tr.phases[0].pivot_drift > 0.003) {
        o.ok = false;
        o.why = "pivot contact drift above 0.3 cm";
      }
      if (tr.net_slide < 0.055 || tr.net_slide > 0.065) {
        o.ok = false;
        o.why = "net slide outside [5.5, 6.5] cm";
      }
    }
    return o;
  };

  const Outcome oa = run_with(analytical);
  const Outcome ob = run_with(best);
  const Outcome om = run_with(median);
  const Outcome ow = run_with(worst);

  // Wall-clock stand-in: better cones should not take longer than worse
  // ones, with a small slack for step quantization.
  const double slack = 1.05;
  const bool ordering = oa.duration <= ob.duration * slack + 0.5 &&
                        oa.duration <= om.duration * slack + 0.5 &&
                        ob.duration <= ow.duration * slack + 0.5 &&
                        om.duration <= ow.duration * slack + 0.5;

  char buf[420];
  std::snprintf(buf, sizeof buf,
                "pivot+slide, 5 trials each: analytical [err %.2f deg, drift %.4f cm, slide "
                "%.2f cm] best(v=%.3f) [err %.2f deg, drift %.4f cm, slide %.2f cm] "
                "durations a/b/m/w %.1f/%.1f/%.1f/%.1f s%s%s",
                oa.pivot_err_deg, oa.drift * 100, oa.net_slide * 100, ranked.front()->v,
                ob.pivot_err_deg, ob.drift * 100, ob.net_slide * 100, oa.duration / 5,
                ob.duration / 5, om.duration / 5, ow.duration / 5,
                (oa.ok && ob.ok) ? "" : (" | " + oa.why + " " + ob.why).c_str(),
                ordering ? "" : " | duration ordering violated");
  report(5, oa.ok && ob.ok && om.ok && ow.ok && ordering, buf);
}

void criterion_6() {
  PolyhedralCone truth = analytical_cone({ContactPoint{Vec2(-0.05, -0.05), Vec2(0, 1), 0.5},
                                          ContactPoint{Vec2(0.05, -0.05), Vec2(0, 1), 0.5}},
                                         0.0, 1.0);
  bool ok = true;
  std::ostringstream why;

  // Identity.
  const double v_self = metric_v(truth, truth);
  if (std::abs(v_self - 1.0) > 1e-9) {
    ok = false;
    why << " self-score " << v_self;
  }

  // Disjoint after truncation.
  PolyhedralCone off = truth;
  const Vec3 axis = truth.axis();
  for (size_t i = 0; i < off.edges.size(); ++i) {
    const Vec3 out = (truth.edges[0] - 0.35 * axis).normalized();
    const Vec3 jitter(1e-3 * std::cos(2.1 * static_cast<double>(i)),
                      1e-3 * std::sin(1.7 * static_cast<double>(i)), 1e-3);
    off.edges[i] = (out + jitter).normalized();
  }
  const double v_disjoint = metric_v(off, truth);
  if (v_disjoint > 1e-9) {
    ok = false;
    why << " disjoint-score " << v_disjoint;
  }

  // Tilted estimate, symmetry, height invariance and the Monte-Carlo check.
  PolyhedralCone tilted = truth;
  for (Vec3& e : tilted.edges) {
    const Vec3 pivot = e.cross(axis);
    Eigen::AngleAxisd rot(5.0 * kDeg, pivot.normalized());
    e = (rot * e).normalized();
  }
  MetricConfig fixed_axis;
  fixed_axis.axis_override = axis;
  const double v_ab = metric_v(tilted, truth, fixed_axis);
  const double v_ba = metric_v(truth, tilted, fixed_axis);
  if (std::abs(v_ab - v_ba) > 1e-9) {
    ok = false;
    why << " asymmetry " << std::abs(v_ab - v_ba);
  }
  MetricConfig h05, h1, h2;
  h05.truncation_height = 0.5;
  h2.truncation_height = 2.0;
  const double v05 = metric_v(tilted, truth, h05);
  const double v1 = metric_v(tilted, truth, h1);
  const double v2 = metric_v(tilted, truth, h2);
  if (std::abs(v05 - v1) > 1e-6 || std::abs(v2 - v1) > 1e-6) {
    ok = false;
    why << " height-dependence";
  }

  // Monte-Carlo with 1e6 samples.
  ConvexPolytope te = truncate_cone(tilted, axis, 1.0);
  ConvexPolytope tg = truncate_cone(truth, axis, 1.0);
  Vec3 lo = te.vertices[0], hi = te.vertices[0];
  for (const ConvexPolytope* p : {&te, &tg})
    for (const Vec3& v : p->vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
  auto inside = [](const ConvexPolytope& p, const Vec3& x) {
    for (size_t f = 0; f < p.faces.size(); ++f) {
      Plane pl = face_plane(p, static_cast<int>(f));
      if (pl.normal.dot(x - pl.point) > 0.0) return false;
    }
    return true;
  };
  Rng rng(424242);
  long n_inter = 0, n_union = 0;
  const int samples = 1000000;
  for (int i = 0; i < samples; ++i) {
    Vec3 x(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()),
           rng.uniform(lo.z(), hi.z()));
    const bool a = inside(te, x);
    const bool b = inside(tg, x);
    n_inter += (a && b) ? 1 : 0;
    n_union += (a || b) ? 1 : 0;
  }
  const double v_mc = static_cast<double>(n_inter) / std::max(1L, n_union);
  const double sigma = std::sqrt(v_mc * (1.0 - v_mc) / std::max(1L, n_union));
  if (std::abs(v1 - v_mc) > 3.0 * sigma) {
    ok = false;
    why << " MC-deviation " << std::abs(v1 - v_mc) << " vs 3sigma " << 3.0 * sigma;
  }

  char buf[300];
  std::snprintf(buf, sizeof buf,
                "metric: self %.2e from 1, disjoint %.2e, |v(A,B)-v(B,A)| %.2e, tilted v "
                "%.4f vs MC %.4f (3sigma %.1e)%s",
                std::abs(v_self - 1.0), v_disjoint, std::abs(v_ab - v_ba), v1, v_mc,
                3.0 * sigma, why.str().c_str());
  report(6, ok, buf);
}

void criterion_7() {
  Scenario s;
  Simulator sim = make_simulator(s);
  // A command leaving -w_total strictly inside the cone: press into the
  // surface and cancel gravity.
  const Wrench hold =
      Wrench{0.0, -2.0, 0.0} - gravity_wrench(sim.state(), sim.config().gravity);
  const BodyState before = sim.state();
  bool identical = true;
  for (int i = 0; i < 1000; ++i) {
    StepResult r = sim.apply_command(hold);
    if (r.mode != ModeLabel::Static ||
        std::memcmp(&r.state.x, &before.x, sizeof(double)) != 0 ||
        std::memcmp(&r.state.y, &before.y, sizeof(double)) != 0 ||
        std::memcmp(&r.state.phi, &before.phi, sizeof(double)) != 0) {
      identical = false;
      break;
    }
  }
  report(7, identical, "static equilibrium: pose bit-identical over 1000 steps");
}

void criterion_8() {
  const char* cli = PFC_CLI_PATH;
  const fs::path root = fs::temp_directory_path() / "pfc_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  Scenario s;
  s.repetitions = 2;
  s.trials = 1;
  s.seed = 777;
  const fs::path cfg = root / "scenario.json";
  write_text_file(cfg.string(), scenario_to_json(s));

  auto run = [&](const std::string& args) {
    const std::string cmd = std::string("\"") + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
  };

  bool ok = true;
  std::string why;
  for (const char* pass : {"a", "b"}) {
    const fs::path dir = root / pass;
    if (run("estimate --config " + cfg.string() + " --out-dir " + (dir / "est").string()) !=
        0) {
      ok = false;
      why = "estimate invocation failed";
    }
    if (run("manipulate --config " + cfg.string() + " --cone analytical --out-dir " +
            (dir / "man").string()) != 0) {
      ok = false;
      why = "manipulate invocation failed";
    }
    if (run("plot --kind box --in " + (dir / "est" / "metric.csv").string() + " --out " +
            (dir / "box.svg").string()) != 0 ||
        run("plot --kind traj --in " + (dir / "man" / "traj_t0.csv").string() + " --out " +
            (dir / "traj.svg").string()) != 0) {
      ok = false;
      why = "plot invocation failed";
    }
  }
  int compared = 0;
  if (ok) {
    for (const char* rel :
         {"est/estimate_r0.est", "est/estimate_r1.est", "est/metric.csv",
          "man/traj_t0.csv", "man/manipulation.csv", "box.svg", "traj.svg"}) {
      const std::string a = read_bytes(root / "a" / rel);
      const std::string b = read_bytes(root / "b" / rel);
      if (a.empty() || a != b) {
        ok = false;
        why = std::string("byte mismatch or empty file: ") + rel;
        break;
      }
      ++compared;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "determinism: %d artifact files byte-identical%s%s",
                compared, why.empty() ? "" : " | ", why.c_str());
  report(8, ok, buf);
  fs::remove_all(root);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  const std::vector<CellResult> cells = criterion_3();
  criterion_4();
  criterion_5(cells);
  criterion_6();
  criterion_7();
  criterion_8();
  std::printf("%s: %d criterion(s) failed\n", g_failures == 0 ? "OK" : "FAILURES",
              g_failures);
  return g_failures;
}
