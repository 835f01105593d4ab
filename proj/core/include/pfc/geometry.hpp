#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <span>
#include <vector>

#include "pfc/errors.hpp"

namespace pfc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;

/// 2x2 rotation matrix of angle phi (counter-clockwise positive).
Mat2 rot2(double phi);

/// Third component of the 3D cross product of (u, 0) and (v, 0).
inline double cross2(const Vec2& u, const Vec2& v) {
  return u.x() * v.y() - u.y() * v.x();
}

/// 90 degree counter-clockwise rotation of v.
inline Vec2 perp2(const Vec2& v) { return Vec2(-v.y(), v.x()); }

struct Plane {
  Vec3 normal;  // unit
  Vec3 point;
};

/// Bounded convex polytope. Faces are vertex-index loops wound
/// counter-clockwise seen from outside, so face normals point outward.
struct ConvexPolytope {
  std::vector<Vec3> vertices;
  std::vector<std::vector<int>> faces;

  bool empty() const { return vertices.empty(); }
};

/// Outward unit normal of face f (Newell's formula).
Vec3 face_normal(const ConvexPolytope& p, int f);

/// Supporting plane of face f, normal pointing outward.
Plane face_plane(const ConvexPolytope& p, int f);

/// True when x satisfies every face halfspace within tol.
bool polytope_contains(const ConvexPolytope& p, const Vec3& x, double tol = 1e-9);

/// Checks closedness, winding consistency and vertex containment.
bool polytope_is_valid(const ConvexPolytope& p, double tol = 1e-9);

/// Convex hull of a 3D point set. Faces come out triangulated.
/// Throws DegenerateInput when the points are affinely dependent;
/// callers with possibly flat data must handle that case themselves.
/// Contract: face residuals stay below 1e-9 for coordinates in [-1e3, 1e3].
ConvexPolytope convex_hull_3d(std::span<const Vec3> points);

/// Intersection of p with the halfspace on the anti-normal side of h,
/// i.e. {x : (x - h.point) . h.normal <= 0}. An empty result is a value,
/// not an error.
ConvexPolytope clip_polytope(const ConvexPolytope& p, const Plane& h);

/// Volume of a closed polytope; 0 for empty or flat inputs.
double polytope_volume(const ConvexPolytope& p);

/// Intersection of the ray origin + t*dir (t >= 0) with a plane.
/// Throws NoIntersection for parallel rays and rays pointing away.
Vec3 ray_plane_intersection(const Vec3& origin, const Vec3& dir, const Plane& plane);

}  // namespace pfc
