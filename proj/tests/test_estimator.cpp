#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "pfc/estimator.hpp"

using namespace pfc;

namespace {

Simulator make_sim(double length = 0.10, double height = 0.05, double mu = 0.5,
                   double slope = 0.0) {
  Surface s{slope, Vec2::Zero(), mu};
  BodyState b = resting_pose(Vec2(length / 2, height / 2), 0.1, s);
  return Simulator(b, s, SimConfig{});
}

double angular_violation(const std::vector<Vec3>& cone_edges, const Vec3& w) {
  oracle::NnlsResult p = oracle::project_cone_nnls(cone_edges, w);
  if (w.norm() <= 1e-12) return 0.0;
  return std::asin(std::min(1.0, p.distance / w.norm()));
}

}  // namespace

TEST_SUITE_BEGIN("estimator");

TEST_CASE("update keeps the sample set when the hull does not grow") {
  std::vector<Vec3> w = {Vec3(0.5, 1, 0.1), Vec3(-0.5, 1, 0.1), Vec3(0.0, 1, -0.4)};
  std::vector<Vec3> same = update_estimate(w, Vec3(0.0, 0.5, 0.0), 2.0);
  CHECK(same.size() == w.size());
  for (size_t i = 0; i < w.size(); ++i) CHECK((same[i] - w[i]).norm() == 0.0);
}

TEST_CASE("update grows to four rays for an exterior sample") {
  std::vector<Vec3> w = {Vec3(0.5, 1, 0.1), Vec3(-0.5, 1, 0.1), Vec3(0.0, 1, -0.4)};
  std::vector<Vec3> grown = update_estimate(w, Vec3(0.0, 1, 0.6), 2.0);
  CHECK(grown.size() == 4);
}

TEST_CASE("update stream keeps every sample inside the running hull") {
  Rng rng(51);
  std::vector<Vec3> seen;
  std::vector<Vec3> w;
  bool planar = false;
  for (int i = 0; i < 60; ++i) {
    Vec3 s(rng.uniform(-1, 1), rng.uniform(1.0, 2.0), rng.uniform(-1, 1));
    seen.push_back(s);
    w = update_estimate(w, s, 2.0, &planar);
  }
  CHECK_FALSE(planar);
  const double slack = 2.0 * M_PI / 180.0 + 1e-6;
  for (const Vec3& s : seen) CHECK(angular_violation(w, s) <= slack);
}

TEST_CASE("monotone growth of the conic hull") {
  Rng rng(52);
  std::vector<Vec3> w;
  for (int i = 0; i < 40; ++i) {
    Vec3 s(rng.uniform(-1, 1), rng.uniform(1.0, 2.0), rng.uniform(-1, 1));
    std::vector<Vec3> next = update_estimate(w, s, 2.0);
    const double slack = 2.0 * M_PI / 180.0 + 1e-6;
    for (const Vec3& old : w) CHECK(angular_violation(next, old) <= slack);
    w = std::move(next);
  }
}

TEST_CASE("degenerate sample sets fall back to the planar fan") {
  // All samples along a single direction collapse to one ray.
  std::vector<Vec3> same_dir;
  bool planar = false;
  std::vector<Vec3> w;
  for (int i = 0; i < 5; ++i)
    w = update_estimate(w, Vec3(0.0, 1.0 + 0.1 * i, 0.0), 2.0, &planar);
  CHECK(planar);
  CHECK(w.size() == 1);

  // A flat fan keeps its two extreme rays.
  w.clear();
  w = update_estimate(w, Vec3(0.0, 1.0, 0.0), 2.0, &planar);
  w = update_estimate(w, Vec3(0.3, 1.0, 0.0), 2.0, &planar);
  w = update_estimate(w, Vec3(-0.4, 1.0, 0.0), 2.0, &planar);
  w = update_estimate(w, Vec3(0.1, 1.0, 0.0), 2.0, &planar);
  CHECK(planar);
  REQUIRE(w.size() == 2);
  const bool has_right = (w[0].x() == doctest::Approx(0.3)) || (w[1].x() == doctest::Approx(0.3));
  const bool has_left = (w[0].x() == doctest::Approx(-0.4)) || (w[1].x() == doctest::Approx(-0.4));
  CHECK(has_right);
  CHECK(has_left);
}

TEST_CASE("base polygon of a symmetric cone") {
  PolyhedralCone cone = analytical_cone(
      {ContactPoint{Vec2(-0.05, -0.05), Vec2(0, 1), 0.5},
       ContactPoint{Vec2(0.05, -0.05), Vec2(0, 1), 0.5}},
      0.0, 1.0);
  Vec3 mean = Vec3::Zero();
  for (const Vec3& e : cone.edges) mean += e;
  mean.normalize();
  // Symmetry: the mean sits on the y axis of the scaled space.
  CHECK(std::abs(mean.x()) < 1e-12);
  CHECK(std::abs(mean.z()) < 1e-9);

  Plane plane{mean, 2.0 * mean};
  BasePolygon poly = base_polygon(cone.edges, plane);
  REQUIRE(poly.vertices.size() == cone.edges.size());
  REQUIRE(poly.edges.size() == cone.edges.size());
  // Convexity: consecutive edge cross products share a sign.
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : poly.vertices) c += v;
  c /= 4.0;
  Vec3 u = (poly.vertices[0] - c).normalized();
  Vec3 vax = plane.normal.cross(u);
  auto coord = [&](const Vec3& p) { return Vec2((p - c).dot(u), (p - c).dot(vax)); };
  for (size_t k = 0; k < poly.edges.size(); ++k) {
    Vec2 a = coord(poly.vertices[poly.edges[k].first]);
    Vec2 b = coord(poly.vertices[poly.edges[k].second]);
    Vec2 d = coord(poly.vertices[poly.edges[(k + 1) % poly.edges.size()].second]);
    CHECK(cross2(b - a, d - b) > 0.0);
  }
}

TEST_CASE("initialization gathers static samples inside the true cone") {
  Simulator sim = make_sim();
  EstimatorConfig cfg;
  cfg.seed = 21;
  EstimationSession session(sim, cfg);
  int samples = 0;
  session.on_sample = [&](const Wrench& w, const BodyState&) {
    const Vec3 ws = w.scaled(sim.char_length());
    CHECK(angular_violation(sim.ground_truth_cone().edges, ws) <= 1e-9);
    ++samples;
  };
  session.initialize();
  CHECK(samples == cfg.n_init);
  CHECK_FALSE(session.state().samples.empty());
  // With sigma = 0.5 N the initial sample set spans all three dimensions.
  CHECK_FALSE(session.state().planar);
}

TEST_CASE("exploring the true cone is a fixed point") {
  Simulator sim = make_sim();
  EstimatorConfig cfg;
  cfg.seed = 22;
  EstimationSession session(sim, cfg);
  session.initialize();

  PolyhedralCone truth = sim.ground_truth_cone();
  std::vector<Vec3> seeded;
  for (const Vec3& e : truth.edges) seeded.push_back(2.0 * e);
  session.seed_estimate(seeded);
  REQUIRE(session.state().edges.size() == 4);

  ExploreStats stats = session.explore();
  CHECK(stats.probes < cfg.max_probes);
  CHECK(session.state().edges.size() <= 5);
  for (const Vec3& e : session.state().edges) {
    const double slack = (cfg.eps_simplify_deg + 1.0) * M_PI / 180.0;
    CHECK(angular_violation(truth.edges, e) <= slack);
  }
}

TEST_CASE("exploration samples are sound against the live cone") {
  Simulator sim = make_sim();
  EstimatorConfig cfg;
  cfg.seed = 23;
  EstimationSession session(sim, cfg);
  double worst = 0.0;
  session.on_sample = [&](const Wrench& w, const BodyState&) {
    worst = std::max(worst,
                     angular_violation(sim.ground_truth_cone().edges,
                                       w.scaled(sim.char_length())));
  };
  session.initialize();
  ExploreStats stats = session.explore();
  CHECK(stats.samples_recorded > 0);
  CHECK(worst <= 3.0 * M_PI / 180.0);
  CHECK(session.state().edges.size() >= 4);
}

TEST_CASE("finalize keeps exactly four edges and maximizes base area") {
  Simulator sim = make_sim();
  EstimatorConfig cfg;
  cfg.seed = 24;
  EstimationSession session(sim, cfg);
  session.initialize();
  PolyhedralCone truth = sim.ground_truth_cone();

  // Four spread edges and a redundant one close to a face plane.
  std::vector<Vec3> seeded;
  for (const Vec3& e : truth.edges) seeded.push_back(2.0 * e);
  const Vec3 redundant =
      (truth.edges[0] + truth.edges[1] + 0.02 * truth.edges[2]).normalized() * 2.0;
  seeded.push_back(redundant);
  session.seed_estimate(seeded);
  if (session.state().edges.size() == 4) {
    // simplification already removed the redundant ray
    PolyhedralCone est = session.finalize();
    CHECK(est.edges.size() == 4);
  } else {
    PolyhedralCone est = session.finalize();
    REQUIRE(est.edges.size() == 4);
    for (const Vec3& e : est.edges)
      CHECK(angular_violation(truth.edges, e) < 0.5 * M_PI / 180.0);
  }

  // Exhaustive area check on the final quadruple.
  const auto& st = session.state();
  std::vector<int> chosen = select_max_area_quadruple(st.edges, st.base_plane);
  CHECK(chosen.size() == 4);
}

TEST_CASE("finalize requires at least four edges") {
  Simulator sim = make_sim();
  EstimatorConfig cfg;
  EstimationSession session(sim, cfg);
  session.seed_estimate({Vec3(0, 2, 0), Vec3(0.5, 2, 0.2), Vec3(-0.5, 2, 0.2)});
  CHECK_THROWS_AS(session.finalize(), TooFewEdges);
}

TEST_CASE("labelling the analytical cone reproduces its labels") {
  Simulator sim = make_sim();
  EstimatorConfig cfg;
  cfg.seed = 25;
  EstimationSession session(sim, cfg);
  session.initialize();
  PolyhedralCone truth = sim.ground_truth_cone();
  std::vector<Vec3> seeded;
  for (const Vec3& e : truth.edges) seeded.push_back(2.0 * e);
  session.seed_estimate(seeded);
  PolyhedralCone est = session.finalize();

  const BodyState before = session.system().state();
  LabelReport report = session.label_faces(est);
  const BodyState after = session.system().state();
  CHECK_FALSE(has_moved(before, after, sim.config()));

  REQUIRE(report.cone.labelled);
  // Compare against the analytical labels edge-wise.
  for (int f = 0; f < 4; ++f) {
    const ConeFace& face = report.cone.faces[f];
    const Vec3 mid =
        (report.cone.edges[face.e0] + report.cone.edges[face.e1]).normalized();
    int match = -1;
    double best = -2.0;
    for (size_t g = 0; g < truth.faces.size(); ++g) {
      const Vec3 tm =
          (truth.edges[truth.faces[g].e0] + truth.edges[truth.faces[g].e1]).normalized();
      const double d = tm.dot(mid);
      if (d > best) {
        best = d;
        match = static_cast<int>(g);
      }
    }
    REQUIRE(best > 0.99);
    CHECK(to_string(face.label) == to_string(truth.faces[match].label));
  }
  // cw and ccw faces are edge-disjoint.
  const ConeFace& cw = report.cone.faces[report.cone.face_of(ModeLabel::PivotCw)];
  const ConeFace& ccw = report.cone.faces[report.cone.face_of(ModeLabel::PivotCcw)];
  CHECK(cw.e0 != ccw.e0);
  CHECK(cw.e0 != ccw.e1);
  CHECK(cw.e1 != ccw.e0);
  CHECK(cw.e1 != ccw.e1);
}

TEST_CASE("transform_cone moves the pivot face onto the rotated truth") {
  Simulator sim = make_sim();
  PolyhedralCone truth = sim.ground_truth_cone();
  PolyhedralCone same = transform_cone(truth, 0.0, ModeLabel::PivotCw,
                                       coplanarity_normal(
                                           truth.edges[truth.faces[truth.face_of(ModeLabel::PivotCw)].e0],
                                           truth.edges[truth.faces[truth.face_of(ModeLabel::PivotCw)].e1]));
  for (size_t i = 0; i < truth.edges.size(); ++i)
    CHECK((same.edges[i] - truth.edges[i]).norm() < 1e-15);

  const int cw = truth.face_of(ModeLabel::PivotCw);
  const Vec3 m = coplanarity_normal(truth.edges[truth.faces[cw].e0],
                                    truth.edges[truth.faces[cw].e1]);
  const double dphi = -20.0 * M_PI / 180.0;
  PolyhedralCone moved = transform_cone(truth, dphi, ModeLabel::PivotCw, m);

  auto contacts = sim.contacts();
  PolyhedralCone rotated = analytical_cone({contacts[1]}, sim.state().phi + dphi,
                                           sim.char_length());
  for (int e : {truth.faces[cw].e0, truth.faces[cw].e1}) {
    double best = -2.0;
    for (const Vec3& re : rotated.edges) best = std::max(best, re.dot(moved.edges[e]));
    CHECK(best > 1.0 - 1e-9);
    CHECK(std::abs(m.dot(moved.edges[e])) <= 1e-9);
  }
}

TEST_SUITE_END();
