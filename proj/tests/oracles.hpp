#pragma once

// Independent reference implementations used as test oracles. These stay
// deliberately brute-force and share no code with the library paths they
// check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "pfc/geometry.hpp"
#include "pfc/rng.hpp"
#include "pfc/wrench.hpp"

namespace oracle {

using pfc::Vec2;
using pfc::Vec3;

// Hull vertex set by exhaustive facet enumeration: a triple forms a facet
// when all points lie on one side of its plane; a point is a hull vertex
// when it lies on some facet and is extreme along its normal.
inline std::vector<int> brute_force_hull_vertices(const std::vector<Vec3>& pts,
                                                  double tol = 1e-9) {
  const int n = static_cast<int>(pts.size());
  std::vector<bool> vertex(n, false);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Vec3 nrm = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (nrm.norm() <= 1e-12) continue;
        nrm.normalize();
        bool pos = false, neg = false;
        for (int m = 0; m < n; ++m) {
          const double d = nrm.dot(pts[m] - pts[i]);
          if (d > tol) pos = true;
          if (d < -tol) neg = true;
        }
        if (pos && neg) continue;
        // Facet plane found; points on it that are extreme in-plane are the
        // hull vertices of the 2D sub-problem. For generic input every
        // on-plane point of a facet triple is a vertex.
        for (int m : {i, j, k}) vertex[m] = true;
      }
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (vertex[i]) out.push_back(i);
  return out;
}

// Monte-Carlo volume of a convex polytope given by its faces.
struct McVolume {
  double volume = 0.0;
  double sigma = 0.0;
};

inline McVolume mc_volume(const pfc::ConvexPolytope& p, int samples, pfc::Rng& rng) {
  if (p.empty()) return {0.0, 0.0};
  Vec3 lo = p.vertices[0], hi = p.vertices[0];
  for (const Vec3& v : p.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::vector<pfc::Plane> planes;
  for (size_t f = 0; f < p.faces.size(); ++f) planes.push_back(face_plane(p, static_cast<int>(f)));
  int inside = 0;
  for (int s = 0; s < samples; ++s) {
    Vec3 x(rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y()), rng.uniform(lo.z(), hi.z()));
    bool in = true;
    for (const pfc::Plane& pl : planes)
      if (pl.normal.dot(x - pl.point) > 0.0) {
        in = false;
        break;
      }
    inside += in ? 1 : 0;
  }
  const double box = (hi - lo).prod();
  const double frac = static_cast<double>(inside) / samples;
  McVolume out;
  out.volume = frac * box;
  out.sigma = box * std::sqrt(std::max(frac * (1.0 - frac), 1e-12) / samples);
  return out;
}

// Nonnegative least squares over a small generator set by subset
// enumeration; returns the projection of u onto cone(generators).
struct NnlsResult {
  Vec3 point = Vec3::Zero();
  double distance = 0.0;
  std::vector<int> support;  // generators with strictly positive weight
};

inline NnlsResult project_cone_nnls(const std::vector<Vec3>& gens, const Vec3& u) {
  NnlsResult best;
  best.point = Vec3::Zero();
  best.distance = u.norm();
  const int n = static_cast<int>(gens.size());
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) idx.push_back(i);
    if (idx.size() > 3) continue;
    // Solve the normal equations on the subset.
    Eigen::MatrixXd A(3, idx.size());
    for (size_t c = 0; c < idx.size(); ++c) A.col(static_cast<long>(c)) = gens[idx[c]];
    Eigen::MatrixXd G = A.transpose() * A;
    Eigen::VectorXd b = A.transpose() * u;
    Eigen::VectorXd lam = G.fullPivLu().solve(b);
    bool ok = true;
    for (long i = 0; i < lam.size(); ++i)
      if (!(lam[i] > 1e-12)) ok = false;
    if (!ok) continue;
    Vec3 p = A * lam;
    // KKT: residual must not see any generator positively.
    Vec3 r = u - p;
    for (const Vec3& g : gens)
      if (r.dot(g) > 1e-9 * std::max(1.0, u.norm())) ok = false;
    if (!ok) continue;
    const double d = r.norm();
    if (d < best.distance - 1e-15) {
      best.distance = d;
      best.point = p;
      best.support = idx;
    }
  }
  return best;
}

// Quasi-static contact mode enumeration for two contacts on one surface.
// The mode table is derived from Coulomb friction first principles: sliding
// pins the reaction on the friction-cone edge opposing the slip, pivoting
// about one contact releases the other. Independent of the library's
// analytical_cone construction.
struct TwoContactSetup {
  Vec2 p_a, p_b;      // object-frame contact positions, a left of b
  Vec2 normal_w;      // surface normal in the object frame
  double mu = 0.5;
  double char_length = 1.0;
};

struct ModeOracleResult {
  bool separation = false;
  pfc::ModeLabel label = pfc::ModeLabel::Static;
  double gap = 0.0;  // distance margin between best and runner-up mode
};

inline Vec3 contact_edge_wrench(const TwoContactSetup& s, const Vec2& p, bool left_side) {
  const double h = std::atan(s.mu);
  const Vec2 f = pfc::rot2(left_side ? h : -h) * s.normal_w;
  const double tau = pfc::cross2(p, f) / s.char_length;
  Vec3 w(f.x(), f.y(), tau);
  return w.normalized();
}

inline ModeOracleResult enumerate_modes(const TwoContactSetup& s, const pfc::Wrench& w_a) {
  using pfc::ModeLabel;
  const Vec3 u = (-w_a).scaled(s.char_length);

  const Vec3 ra = contact_edge_wrench(s, s.p_a, false);
  const Vec3 la = contact_edge_wrench(s, s.p_a, true);
  const Vec3 rb = contact_edge_wrench(s, s.p_b, false);
  const Vec3 lb = contact_edge_wrench(s, s.p_b, true);

  // Sliding right -> friction on the object points left -> left edges.
  // Pivoting about the left contact (a) lifts the right one: ccw.
  struct Mode {
    ModeLabel label;
    std::vector<Vec3> gens;
  };
  const std::vector<Mode> modes = {
      {ModeLabel::Static, {ra, la, rb, lb}},
      {ModeLabel::SlideRight, {la, lb}},
      {ModeLabel::SlideLeft, {ra, rb}},
      {ModeLabel::PivotCcw, {ra, la}},
      {ModeLabel::PivotCw, {rb, lb}},
      {ModeLabel::CcwSlideRight, {la}},
      {ModeLabel::CcwSlideLeft, {ra}},
      {ModeLabel::CwSlideRight, {lb}},
      {ModeLabel::CwSlideLeft, {rb}},
  };

  // Static wins when u is inside the full cone.
  const NnlsResult full = project_cone_nnls(modes[0].gens, u);
  ModeOracleResult out;
  if (full.distance <= 1e-9 * std::max(1.0, u.norm())) {
    out.label = ModeLabel::Static;
    out.gap = u.norm();
    return out;
  }
  if (full.point.norm() <= 1e-12 * std::max(1.0, u.norm())) {
    out.separation = true;
    // Margin: how deep u sits inside the polar cone.
    double depth = std::numeric_limits<double>::infinity();
    for (const Vec3& g : {ra, la, rb, lb}) depth = std::min(depth, -u.dot(g));
    out.gap = depth;
    return out;
  }

  // The achieved mode is the one whose reaction set attains the global
  // projection with full support (every generator active).
  double best = std::numeric_limits<double>::infinity(), second = best;
  ModeLabel best_label = ModeLabel::Static;
  for (size_t i = 1; i < modes.size(); ++i) {
    const NnlsResult r = project_cone_nnls(modes[i].gens, u);
    if (r.support.size() != modes[i].gens.size()) continue;  // degraded to a sub-mode
    if (r.distance < best) {
      second = best;
      best = r.distance;
      best_label = modes[i].label;
    } else if (r.distance < second) {
      second = r.distance;
    }
  }
  out.label = best_label;
  out.gap = second - best;
  return out;
}

}  // namespace oracle
