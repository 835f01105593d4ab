#include "pfc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pfc {

void EstimatorConfig::validate() const {
  if (n_init < 1) throw ConfigError("EstimatorConfig: n_init must be >= 1");
  if (sigma < 0.0) throw ConfigError("EstimatorConfig: sigma must be >= 0");
  if (press_force <= 0.0) throw ConfigError("EstimatorConfig: press_force must be > 0");
  if (gamma0_rel <= 0.0 || gamma_growth <= 1.0)
    throw ConfigError("EstimatorConfig: gamma schedule must grow");
  if (eps_simplify_deg <= 0.0 || explored_dedup_deg <= 0.0)
    throw ConfigError("EstimatorConfig: angular tolerances must be > 0");
  if (jump_thresh <= 0.0) throw ConfigError("EstimatorConfig: jump_thresh must be > 0");
}

namespace {

constexpr double kDeg = M_PI / 180.0;

double angle_between(const Vec3& a, const Vec3& b) {
  const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
  return std::acos(c);
}

// Extreme rays of a flat (or lower dimensional) sample fan through the
// origin. Falls back to a single ray when all samples share a direction.
std::vector<Vec3> planar_fan_extremes(const std::vector<Vec3>& pts, double eps_rad) {
  std::vector<Vec3> dirs;
  std::vector<int> src;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].norm() <= 1e-12) continue;
    Vec3 d = pts[i].normalized();
    bool dup = false;
    for (const Vec3& e : dirs)
      if (angle_between(d, e) <= eps_rad) {
        dup = true;
        break;
      }
    if (!dup) {
      dirs.push_back(d);
      src.push_back(static_cast<int>(i));
    }
  }
  if (dirs.empty()) return {};
  if (dirs.size() == 1) return {pts[src[0]]};

  // Plane through the origin: first direction and the one farthest from it.
  size_t far = 1;
  double best = 0.0;
  for (size_t i = 1; i < dirs.size(); ++i) {
    double a = angle_between(dirs[0], dirs[i]);
    if (a > best) {
      best = a;
      far = i;
    }
  }
  Vec3 n = dirs[0].cross(dirs[far]);
  if (n.norm() <= 1e-12) return {pts[src[0]]};
  n.normalize();
  Vec3 u = dirs[0];
  Vec3 v = n.cross(u);

  // Signed fan angles relative to the first direction.
  double lo = 0.0, hi = 0.0;
  size_t lo_i = 0, hi_i = 0;
  for (size_t i = 0; i < dirs.size(); ++i) {
    double a = std::atan2(dirs[i].dot(v), dirs[i].dot(u));
    if (a < lo) {
      lo = a;
      lo_i = i;
    }
    if (a > hi) {
      hi = a;
      hi_i = i;
    }
  }
  if (lo_i == hi_i) return {pts[src[lo_i]]};
  return {pts[src[lo_i]], pts[src[hi_i]]};
}

// Drop near-duplicate directions and rays lying on (and between) the plane
// of two other rays.
std::vector<Vec3> simplify_rays(std::vector<Vec3> rays, double eps_rad) {
  std::vector<Vec3> kept;
  for (const Vec3& r : rays) {
    bool dup = false;
    for (const Vec3& k : kept)
      if (angle_between(r, k) <= eps_rad) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(r);
  }
  std::vector<bool> drop(kept.size(), false);
  for (size_t i = 0; i < kept.size(); ++i) {
    const Vec3 w = kept[i].normalized();
    for (size_t a = 0; a < kept.size() && !drop[i]; ++a) {
      if (a == i || drop[a]) continue;
      for (size_t b = a + 1; b < kept.size() && !drop[i]; ++b) {
        if (b == i || drop[b]) continue;
        const Vec3 ea = kept[a].normalized();
        const Vec3 eb = kept[b].normalized();
        Vec3 n = ea.cross(eb);
        if (n.norm() <= 1e-9) continue;
        n.normalize();
        if (std::abs(std::asin(std::clamp(w.dot(n), -1.0, 1.0))) > eps_rad) continue;
        // In-plane part must sit inside the fan of ea, eb.
        Vec3 w_in = (w - w.dot(n) * n).normalized();
        const double g = ea.dot(eb);
        const double det = 1.0 - g * g;
        if (det <= 1e-12) continue;
        const double alpha = (w_in.dot(ea) - g * w_in.dot(eb)) / det;
        const double beta = (w_in.dot(eb) - g * w_in.dot(ea)) / det;
        if (alpha >= -1e-9 && beta >= -1e-9) drop[i] = true;
      }
    }
  }
  std::vector<Vec3> out;
  for (size_t i = 0; i < kept.size(); ++i)
    if (!drop[i]) out.push_back(kept[i]);
  return out;
}

// Conic-hull reduction of a sample set: hull rays when the set is full
// dimensional, fan extremes otherwise.
std::vector<Vec3> reduce_samples(const std::vector<Vec3>& pts, double eps_rad, bool* planar) {
  if (planar) *planar = false;
  std::vector<Vec3> with_origin = pts;
  with_origin.push_back(Vec3::Zero());
  try {
    ConvexPolytope hull = convex_hull_3d(with_origin);
    std::vector<Vec3> rays;
    for (const Vec3& v : hull.vertices)
      if (v.norm() > 1e-9) rays.push_back(v);
    return simplify_rays(std::move(rays), eps_rad);
  } catch (const DegenerateInput&) {
    if (planar) *planar = true;
    return planar_fan_extremes(pts, eps_rad);
  }
}

double polygon_area(const std::vector<Vec3>& pts, const Plane& plane) {
  if (pts.size() < 3) return 0.0;
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  Vec3 u = (pts[0] - c);
  if (u.norm() <= 1e-15) return 0.0;
  u.normalize();
  Vec3 v = plane.normal.cross(u);
  std::vector<std::pair<double, Vec2>> ang;
  for (const Vec3& p : pts) {
    Vec2 q((p - c).dot(u), (p - c).dot(v));
    ang.push_back({std::atan2(q.y(), q.x()), q});
  }
  std::sort(ang.begin(), ang.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  double area = 0.0;
  for (size_t i = 0; i < ang.size(); ++i)
    area += cross2(ang[i].second, ang[(i + 1) % ang.size()].second);
  return std::abs(area) * 0.5;
}

}  // namespace

std::vector<Vec3> update_estimate(const std::vector<Vec3>& samples, const Vec3& w_new,
                                  double eps_simplify_deg, bool* planar) {
  std::vector<Vec3> pts = samples;
  pts.push_back(w_new);
  std::vector<Vec3> with_origin = pts;
  with_origin.push_back(Vec3::Zero());
  const double eps_rad = eps_simplify_deg * kDeg;
  try {
    ConvexPolytope hull = convex_hull_3d(with_origin);
    bool grew = false;
    for (const Vec3& v : hull.vertices)
      if (v == w_new) {
        grew = true;
        break;
      }
    if (!grew) {
      if (planar) *planar = false;
      return samples;  // hull unchanged, the new sample is interior
    }
    std::vector<Vec3> rays;
    for (const Vec3& v : hull.vertices)
      if (v.norm() > 1e-9) rays.push_back(v);
    if (planar) *planar = false;
    return simplify_rays(std::move(rays), eps_rad);
  } catch (const DegenerateInput&) {
    if (planar) *planar = true;
    return planar_fan_extremes(pts, eps_rad);
  }
}

std::vector<int> select_max_area_quadruple(const std::vector<Vec3>& edges, const Plane& plane) {
  const int n = static_cast<int>(edges.size());
  if (n < 4) throw TooFewEdges("select_max_area_quadruple: need at least 4 edges");

  auto subset_area = [&](const std::vector<int>& idx) {
    std::vector<Vec3> pts;
    for (int i : idx) {
      Vec3 d = edges[i].normalized();
      if (std::abs(d.dot(plane.normal)) <= 1e-6)
        return -std::numeric_limits<double>::infinity();
      try {
        pts.push_back(ray_plane_intersection(Vec3::Zero(), d, plane));
      } catch (const NoIntersection&) {
        return -std::numeric_limits<double>::infinity();
      }
    }
    return polygon_area(pts, plane);
  };

  if (n <= 12) {
    std::vector<int> best;
    double best_area = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (int c = b + 1; c < n; ++c)
          for (int d = c + 1; d < n; ++d) {
            std::vector<int> idx{a, b, c, d};
            double area = subset_area(idx);
            if (area > best_area) {
              best_area = area;
              best = idx;
            }
          }
    if (best.empty()) throw TooFewEdges("select_max_area_quadruple: no valid quadruple");
    return best;
  }

  // Greedy removal for larger sets.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  while (idx.size() > 4) {
    double best_area = -std::numeric_limits<double>::infinity();
    size_t best_k = 0;
    for (size_t k = 0; k < idx.size(); ++k) {
      std::vector<int> trial = idx;
      trial.erase(trial.begin() + static_cast<long>(k));
      double area = subset_area(trial);
      if (area > best_area) {
        best_area = area;
        best_k = k;
      }
    }
    idx.erase(idx.begin() + static_cast<long>(best_k));
  }
  return idx;
}

PolyhedralCone transform_cone(const PolyhedralCone& cone, double delta_phi, ModeLabel pivot,
                              const Vec3& m_hat) {
  if (!is_pivot(pivot)) throw UnknownMode("transform_cone: pivot label required");
  const int f = cone.face_of(pivot);
  if (f < 0) throw UnknownMode("transform_cone: cone has no " + to_string(pivot) + " face");
  PolyhedralCone out = cone;
  const ConeFace& face = out.faces[f];
  out.edges[face.e0] = transform_edge(cone.edges[face.e0], delta_phi, m_hat);
  out.edges[face.e1] = transform_edge(cone.edges[face.e1], delta_phi, m_hat);
  const Vec3 axis = out.axis();
  for (ConeFace& fc : out.faces) {
    Vec3 n = out.edges[fc.e0].cross(out.edges[fc.e1]);
    if (n.norm() <= 1e-12) throw DegenerateInput("transform_cone: face collapsed");
    n.normalize();
    if (n.dot(axis) > 0.0) n = -n;
    fc.outward_normal = n;
  }
  return out;
}

EstimationSession::EstimationSession(Simulator& system, EstimatorConfig cfg)
    : sys_(&system), cfg_(cfg), rng_(mix_seed(cfg.seed, 0x9d2c5680ULL)) {
  cfg_.validate();
}

Wrench EstimationSession::hold_command() const {
  // Press the object against the surface and cancel gravity, the stand-in
  // for a manipulator holding the part. The resulting total action is a pure
  // push along the inward surface normal.
  const Vec2 n_w = force_to_wrench_frame(sys_->surface().normal(), sys_->state().phi);
  const Vec2 press = -cfg_.press_force * n_w;
  return Wrench{press.x(), press.y(), 0.0} - sys_->gravity();
}

Wrench EstimationSession::command_for_total(const Wrench& w_total_desired) const {
  return w_total_desired - sys_->gravity();
}

void EstimationSession::settle() {
  const int max_steps = 500;
  BodyState prev = sys_->state();
  for (int i = 0; i < max_steps; ++i) {
    StepResult r = sys_->apply_command(hold_command());
    const bool still = !has_moved(prev, r.state, sys_->config());
    prev = r.state;
    if (still && r.mode == ModeLabel::Static && r.contact_count >= 1) return;
  }
  throw InitFailure("settle: system does not come to rest under the hold command");
}

void EstimationSession::initialize() {
  settle();
  StepResult rest = sys_->apply_command(hold_command());
  if (rest.mode != ModeLabel::Static)
    throw InitFailure("initialize: object not static under the hold command");
  const double L = sys_->char_length();
  const Vec3 w_r0 = rest.reaction.scaled(L);

  std::vector<Vec3> collected;
  int attempts = 0;
  while (static_cast<int>(collected.size()) < cfg_.n_init) {
    if (attempts++ > cfg_.max_init_attempts)
      throw InitFailure("initialize: exceeded max attempts to collect static samples");
    Vec3 target = w_r0;
    if (cfg_.sigma > 0.0)
      target += cfg_.sigma * Vec3(rng_.gaussian(), rng_.gaussian(), rng_.gaussian());
    const BodyState before = sys_->state();
    StepResult r = sys_->apply_command(command_for_total(-Wrench::from_scaled(target, L)));
    if (has_moved(before, r.state, sys_->config())) {
      settle();
      continue;  // perturbation broke the contact mode, resample
    }
    collected.push_back(r.reaction.scaled(L));
    if (on_sample) on_sample(r.reaction, r.state);
  }

  st_ = EstimateState{};
  st_.samples = reduce_samples(collected, cfg_.eps_simplify_deg * kDeg, &st_.planar);
  rebuild_polygon();
  initialized_ = true;
}

BasePolygon base_polygon(const std::vector<Vec3>& edge_dirs, const Plane& plane) {
  BasePolygon out;
  struct V {
    Vec3 p;
    int source;
  };
  std::vector<V> verts;
  for (size_t i = 0; i < edge_dirs.size(); ++i) {
    const Vec3 d = edge_dirs[i].normalized();
    if (std::abs(d.dot(plane.normal)) <= 1e-6) {
      out.warnings.push_back("base_polygon: edge nearly orthogonal to the plane, dropped");
      continue;
    }
    try {
      verts.push_back({ray_plane_intersection(Vec3::Zero(), d, plane), static_cast<int>(i)});
    } catch (const NoIntersection&) {
      out.warnings.push_back("base_polygon: edge misses the base plane, dropped");
    }
  }
  if (verts.empty()) return out;
  if (verts.size() == 1) {
    out.vertices = {verts[0].p};
    out.source = {verts[0].source};
    return out;
  }
  if (verts.size() == 2) {
    out.vertices = {verts[0].p, verts[1].p};
    out.source = {verts[0].source, verts[1].source};
    out.edges = {{0, 1}, {1, 0}};
    return out;
  }

  Vec3 c = Vec3::Zero();
  for (const V& v : verts) c += v.p;
  c /= static_cast<double>(verts.size());
  const Vec3 u = (verts[0].p - c).normalized();
  const Vec3 w = plane.normal.cross(u);
  std::sort(verts.begin(), verts.end(), [&](const V& a, const V& b) {
    const double aa = std::atan2((a.p - c).dot(w), (a.p - c).dot(u));
    const double bb = std::atan2((b.p - c).dot(w), (b.p - c).dot(u));
    return aa < bb;
  });
  for (size_t i = 0; i < verts.size(); ++i) {
    out.vertices.push_back(verts[i].p);
    out.source.push_back(verts[i].source);
    out.edges.push_back({static_cast<int>(i), static_cast<int>((i + 1) % verts.size())});
  }
  return out;
}

void EstimationSession::rebuild_polygon() {
  st_.edges.clear();
  st_.polygon.clear();
  st_.polygon_edges.clear();
  st_.polygon_edge_source.clear();
  for (const Vec3& s : st_.samples) st_.edges.push_back(s.normalized());
  if (st_.edges.empty()) return;

  Vec3 mean = Vec3::Zero();
  for (const Vec3& e : st_.edges) mean += e;
  if (mean.norm() <= 1e-12) return;
  st_.base_plane.normal = mean.normalized();
  st_.base_plane.point = st_.samples[rng_.below(st_.samples.size())];

  BasePolygon poly = base_polygon(st_.edges, st_.base_plane);
  st_.polygon = std::move(poly.vertices);
  st_.polygon_edges = std::move(poly.edges);
  st_.polygon_edge_source = std::move(poly.source);
  warnings_.insert(warnings_.end(), poly.warnings.begin(), poly.warnings.end());
}

void EstimationSession::seed_estimate(const std::vector<Vec3>& samples) {
  st_ = EstimateState{};
  st_.samples = reduce_samples(samples, cfg_.eps_simplify_deg * kDeg, &st_.planar);
  rebuild_polygon();
  initialized_ = true;
}

ExploreStats EstimationSession::explore() {
  if (!initialized_) throw ConfigError("explore: call initialize() first");
  ExploreStats stats;
  const double dedup = cfg_.explored_dedup_deg * kDeg;
  const double L = sys_->char_length();

  auto explored = [&](const Vec3& dir) {
    for (const Vec3& d : st_.explored_dirs)
      if (angle_between(dir, d) <= dedup) return true;
    return false;
  };

  while (stats.probes < cfg_.max_probes) {
    // Longest unexplored base-polygon edge; ties resolved by vertex index.
    int pick = -1;
    double pick_len = -1.0;
    Vec3 pick_normal = Vec3::Zero();
    for (size_t k = 0; k < st_.polygon_edges.size(); ++k) {
      const auto [i, j] = st_.polygon_edges[k];
      const Vec3 edge = st_.polygon[j] - st_.polygon[i];
      const double len = edge.norm();
      if (len <= 1e-12) continue;
      Vec3 n = edge.cross(st_.base_plane.normal);
      if (n.norm() <= 1e-12) continue;
      n.normalize();
      if (st_.polygon.size() > 2) {
        Vec3 c = Vec3::Zero();
        for (const Vec3& p : st_.polygon) c += p;
        c /= static_cast<double>(st_.polygon.size());
        const Vec3 mid = 0.5 * (st_.polygon[i] + st_.polygon[j]);
        if (n.dot(mid - c) < 0.0) n = -n;
      }
      if (explored(n)) continue;
      if (len > pick_len + 1e-15) {
        pick = static_cast<int>(k);
        pick_len = len;
        pick_normal = n;
      }
    }
    if (pick < 0) break;

    const auto [vi, vj] = st_.polygon_edges[static_cast<size_t>(pick)];
    const Vec3 mid = 0.5 * (st_.polygon[vi] + st_.polygon[vj]);
    const BodyState probe_start = sys_->state();

    double gamma = 0.0;
    int level = 0;
    int capped = 0;
    bool done = false;
    while (!done) {
      const Vec3 target = mid + gamma * pick_normal;
      StepResult r =
          sys_->apply_command(command_for_total(-Wrench::from_scaled(target, L)));
      ++stats.probes;
      if (has_moved(probe_start, r.state, sys_->config())) {
        if (level > 0) {
          const Vec3 sample = r.reaction.scaled(L);
          st_.samples = update_estimate(st_.samples, sample, cfg_.eps_simplify_deg, &st_.planar);
          rebuild_polygon();
          if (on_sample) on_sample(r.reaction, r.state);
          ++stats.samples_recorded;
        }
        st_.explored_dirs.push_back(pick_normal);
        ++stats.edges_explored;
        settle();
        done = true;
      } else {
        if (r.force_capped && ++capped >= 2) {
          stats.warnings.push_back("exploration stalled at the force cap, direction skipped");
          ++stats.stalled;
          st_.explored_dirs.push_back(pick_normal);
          done = true;
          continue;
        }
        gamma = level == 0 ? cfg_.gamma0_rel * mid.norm() : gamma * cfg_.gamma_growth;
        ++level;
        if (level > cfg_.max_gamma_levels) {
          stats.warnings.push_back("exploration exhausted gamma levels, direction skipped");
          ++stats.stalled;
          st_.explored_dirs.push_back(pick_normal);
          done = true;
        }
      }
    }
  }
  stats.warnings.insert(stats.warnings.end(), warnings_.begin(), warnings_.end());
  warnings_.clear();
  return stats;
}

PolyhedralCone EstimationSession::finalize() const {
  if (st_.edges.size() < 4)
    throw TooFewEdges("finalize: need at least 4 estimated edges, have " +
                      std::to_string(st_.edges.size()));
  std::vector<int> idx = select_max_area_quadruple(st_.edges, st_.base_plane);

  PolyhedralCone cone;
  cone.char_length = sys_->char_length();
  for (int i : idx) cone.edges.push_back(st_.edges[i].normalized());

  // Angular order around the mean direction; faces are consecutive pairs.
  Vec3 axis = Vec3::Zero();
  for (const Vec3& e : cone.edges) axis += e;
  axis.normalize();
  Vec3 b1 = axis.cross(Vec3::UnitZ());
  if (b1.norm() < 1e-6) b1 = axis.cross(Vec3::UnitX());
  b1.normalize();
  Vec3 b2 = axis.cross(b1);
  std::sort(cone.edges.begin(), cone.edges.end(), [&](const Vec3& a, const Vec3& b) {
    return std::atan2(a.dot(b2), a.dot(b1)) < std::atan2(b.dot(b2), b.dot(b1));
  });
  for (int i = 0; i < 4; ++i) {
    ConeFace f;
    f.e0 = i;
    f.e1 = (i + 1) % 4;
    Vec3 n = cone.edges[f.e0].cross(cone.edges[f.e1]);
    if (n.norm() <= 1e-12) throw DegenerateInput("finalize: parallel adjacent edges");
    n.normalize();
    if (n.dot(axis) > 0.0) n = -n;
    f.outward_normal = n;
    cone.faces.push_back(f);
  }
  cone.edge_labels.assign(4, ModeLabel::Static);
  cone.edge_contact.assign(4, -1);
  return cone;
}

LabelReport EstimationSession::label_faces(PolyhedralCone cone) {
  LabelReport report;
  if (cone.edges.size() != 4) throw TooFewEdges("label_faces: need a finalized 4-edge cone");
  settle();
  if (sys_->last_contact_count() != 2)
    throw ConfigError("label_faces: object must rest on two contacts");

  const double L = sys_->char_length();
  const SimConfig& scfg = sys_->config();
  const Vec2 t_b = sys_->surface().tangent();
  const double area = polygon_area(
      [&] {
        std::vector<Vec3> pts;
        for (const Vec3& e : cone.edges)
          pts.push_back(ray_plane_intersection(Vec3::Zero(), e, st_.base_plane));
        return pts;
      }(),
      st_.base_plane);
  const double a0 = std::clamp(cfg_.label_gain * area, 0.25, 5.0);

  struct Probe {
    ModeLabel label = ModeLabel::Static;
    double dphi = 0.0;
    double ds = 0.0;
    bool lost = false;
  };

  auto face_dir = [&](int f) { return (cone.edges[cone.faces[f].e0] +
                                       cone.edges[cone.faces[f].e1]).normalized(); };

  auto probe_face = [&](int f, double a, Probe& out) {
    const Vec3 w_des = face_dir(f);
    const Vec3 n_f = cone.faces[f].outward_normal;
    const BodyState start = sys_->state();
    Wrench prev_rxn{};
    bool prev_moving = false;
    bool lost = false;
    for (int step = 0; step < cfg_.label_max_steps; ++step) {
      const Vec3 total = -(a * n_f + cfg_.beta_label * w_des);
      StepResult r = sys_->apply_command(command_for_total(Wrench::from_scaled(total, L)));
      if (r.contact_lost) lost = true;
      const bool moving = has_moved(start, r.state, scfg);
      // The reaction jumps once at motion onset as it drops onto the cone
      // surface; only jumps between consecutive moving steps indicate a
      // contact-configuration change.
      if (prev_moving && moving) {
        const double base = std::max(1e-9, prev_rxn.scaled(L).norm());
        if ((r.reaction.scaled(L) - prev_rxn.scaled(L)).norm() / base > cfg_.jump_thresh)
          lost = true;
      }
      prev_rxn = r.reaction;
      prev_moving = moving;
      const double dphi = r.state.phi - start.phi;
      const double ds = (r.state.position() - start.position()).dot(t_b);
      if (lost) {
        out = {dphi < 0.0 ? ModeLabel::PivotCw : ModeLabel::PivotCcw, dphi, ds, true};
        return true;
      }
      if (std::abs(dphi) > 20.0 * scfg.motion_thresh_ang) {
        out = {dphi < 0.0 ? ModeLabel::PivotCw : ModeLabel::PivotCcw, dphi, ds, false};
        return true;
      }
      if (std::abs(ds) > 5.0 * scfg.motion_thresh_pos &&
          std::abs(dphi) <= 2.0 * scfg.motion_thresh_ang) {
        out = {ds > 0.0 ? ModeLabel::SlideRight : ModeLabel::SlideLeft, dphi, ds, false};
        return true;
      }
    }
    return false;
  };

  // Undo the probe displacement. The hold command alone re-lands any tilt
  // (the press torques the object about its remaining contact until both
  // touch again), so settling handles rotation; tangential offsets are
  // walked back through a probed slide face with magnitudes shrinking as
  // the offset closes.
  auto restore = [&](const BodyState& target, const std::vector<Probe>& probes,
                     int probed_upto, double a) {
    for (int step = 0; step < cfg_.restore_max_steps; ++step) {
      settle();
      const BodyState& cur = sys_->state();
      if (!has_moved(target, cur, scfg)) return true;
      const double off_pos = (cur.position() - target.position()).dot(t_b);
      if (std::abs(off_pos) <= scfg.motion_thresh_pos) return false;  // tilt remains

      // A slide face whose measured direction matches the needed motion,
      // or the opposite face of one that does not.
      const double needed = -off_pos;
      int face = -1;
      for (int f = 0; f <= probed_upto && face < 0; ++f) {
        if (!is_slide(probes[f].label)) continue;
        face = std::signbit(needed) == std::signbit(probes[f].ds) ? f : (f + 2) % 4;
      }
      if (face < 0) return false;  // no slide direction known yet
      const double err = std::abs(off_pos) / (8.0 * scfg.motion_thresh_pos);
      const double a_rev = a * std::clamp(err, 0.02, 1.0);
      const Vec3 total =
          -(a_rev * cone.faces[face].outward_normal + cfg_.beta_label * face_dir(face));
      sys_->apply_command(command_for_total(Wrench::from_scaled(total, L)));
    }
    return false;
  };

  std::vector<Probe> probes(4);
  const BodyState home = sys_->state();
  for (int f = 0; f < 4; ++f) {
    settle();
    double a = a0;
    bool decided = false;
    for (int ramp = 0; ramp < 7 && !decided; ++ramp, a *= 2.0) {
      decided = probe_face(f, a, probes[f]);
      if (!decided) report.stats.warnings.push_back("label probe ramped up on face " +
                                                    std::to_string(f));
    }
    if (!decided) throw LabelConflict("label_faces: no motion detected on face " +
                                      std::to_string(f));
    if (!restore(home, probes, f, a / 2.0))
      report.stats.warnings.push_back("pose restoration incomplete after face " +
                                      std::to_string(f));
  }

  // Exactly one of each primary label.
  for (ModeLabel m : {ModeLabel::SlideLeft, ModeLabel::SlideRight, ModeLabel::PivotCw,
                      ModeLabel::PivotCcw}) {
    int count = 0;
    for (const Probe& p : probes) count += p.label == m ? 1 : 0;
    if (count != 1)
      throw LabelConflict("label_faces: label " + to_string(m) + " appears " +
                          std::to_string(count) + " times");
  }
  for (int f = 0; f < 4; ++f) cone.faces[f].label = probes[f].label;

  // Pivot faces own a contact; their edges inherit it. The cyclic layout
  // must alternate pivot and slide faces.
  for (int f = 0; f < 4; ++f) {
    if (!is_pivot(cone.faces[f].label)) continue;
    if (is_pivot(cone.faces[(f + 1) % 4].label))
      throw LabelConflict("label_faces: cw and ccw faces share an edge");
    const int cid = cone.faces[f].label == ModeLabel::PivotCcw ? 0 : 1;
    cone.faces[f].pivot_contact = cid;
    cone.edge_contact[cone.faces[f].e0] = cid;
    cone.edge_contact[cone.faces[f].e1] = cid;
  }
  for (int e = 0; e < 4; ++e) {
    ModeLabel pivot = ModeLabel::Static, slide = ModeLabel::Static;
    for (int f : {e, (e + 3) % 4}) {
      const ModeLabel lbl = cone.faces[f].label;
      if (is_pivot(lbl)) pivot = lbl;
      if (is_slide(lbl)) slide = lbl;
    }
    if (pivot == ModeLabel::Static || slide == ModeLabel::Static)
      throw LabelConflict("label_faces: faces do not alternate pivot/slide");
    cone.edge_labels[e] = combine_modes(pivot, slide);
  }
  cone.labelled = true;
  report.cone = std::move(cone);
  return report;
}

}  // namespace pfc
