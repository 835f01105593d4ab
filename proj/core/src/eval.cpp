#include "pfc/eval.hpp"

#include <algorithm>
#include <cmath>

namespace pfc {

ConvexPolytope truncate_cone(const PolyhedralCone& cone, const Vec3& axis, double height) {
  if (height <= 0.0) throw ConfigError("truncate_cone: height must be positive");
  if (cone.edges.size() < 3)
    throw DegenerateInput("truncate_cone: need at least 3 edges for a solid");
  const Plane base{axis, height * axis};
  std::vector<Vec3> ring;
  for (const Vec3& e : cone.edges) {
    if (e.dot(axis) <= 1e-9)
      throw EdgeBehindPlane("truncate_cone: edge has no positive axis component");
    ring.push_back(ray_plane_intersection(Vec3::Zero(), e, base));
  }

  // Angular order around the axis so lateral faces are consecutive.
  Vec3 b1 = axis.cross(Vec3::UnitZ());
  if (b1.norm() < 1e-6) b1 = axis.cross(Vec3::UnitX());
  b1.normalize();
  const Vec3 b2 = axis.cross(b1);
  std::sort(ring.begin(), ring.end(), [&](const Vec3& a, const Vec3& b) {
    return std::atan2(a.dot(b2), a.dot(b1)) < std::atan2(b.dot(b2), b.dot(b1));
  });

  ConvexPolytope p;
  p.vertices.push_back(Vec3::Zero());
  for (const Vec3& v : ring) p.vertices.push_back(v);
  const int n = static_cast<int>(ring.size());
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& v : p.vertices) centroid += v;
  centroid /= static_cast<double>(p.vertices.size());

  auto push_face = [&](std::vector<int> loop) {
    p.faces.push_back(std::move(loop));
    const int f = static_cast<int>(p.faces.size()) - 1;
    if (face_normal(p, f).dot(p.vertices[p.faces[f][0]] - centroid) < 0.0)
      std::reverse(p.faces[f].begin(), p.faces[f].end());
  };
  for (int i = 0; i < n; ++i) push_face({0, 1 + i, 1 + (i + 1) % n});
  std::vector<int> base_loop;
  for (int i = 0; i < n; ++i) base_loop.push_back(1 + i);
  push_face(std::move(base_loop));
  return p;
}

double metric_v(const PolyhedralCone& estimate, const PolyhedralCone& ground_truth,
                const MetricConfig& cfg) {
  if (std::abs(estimate.char_length - ground_truth.char_length) >
      1e-9 * std::max(1.0, ground_truth.char_length))
    throw ConfigError("metric_v: cones use different moment scales");
  const Vec3 axis =
      cfg.axis_override.norm() > 0.0 ? cfg.axis_override.normalized() : ground_truth.axis();
  const ConvexPolytope te = truncate_cone(estimate, axis, cfg.truncation_height);
  const ConvexPolytope tg = truncate_cone(ground_truth, axis, cfg.truncation_height);

  ConvexPolytope inter = te;
  for (size_t f = 0; f < tg.faces.size() && !inter.empty(); ++f)
    inter = clip_polytope(inter, face_plane(tg, static_cast<int>(f)));

  const double vi = polytope_volume(inter);
  const double ve = polytope_volume(te);
  const double vg = polytope_volume(tg);
  const double vu = ve + vg - vi;
  if (vu <= 0.0) return 0.0;
  return std::clamp(vi / vu, 0.0, 1.0);
}

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw ConfigError("summarize: need at least one value");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double h = q * static_cast<double>(values.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, values.size() - 1);
    const double w = h - static_cast<double>(lo);
    return values[lo] * (1.0 - w) + values[hi] * w;
  };
  Summary s;
  s.min = values.front();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  s.max = values.back();
  s.count = static_cast<int>(values.size());
  return s;
}

}  // namespace pfc
