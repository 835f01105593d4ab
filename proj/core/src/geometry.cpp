#include "pfc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

namespace pfc {

namespace {

constexpr double kEps = 1e-9;

double scale_of(std::span<const Vec3> pts) {
  double s = 1.0;
  for (const Vec3& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

struct Tri {
  int a, b, c;
  Vec3 n;     // unit outward
  double d;   // plane offset, n.x = d on the plane
  bool alive = true;
};

Tri make_tri(const std::vector<Vec3>& pts, int a, int b, int c) {
  Tri t{a, b, c, Vec3::Zero(), 0.0, true};
  Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  double len = n.norm();
  if (len <= 0.0) throw DegenerateInput("convex_hull_3d: zero-area face");
  t.n = n / len;
  t.d = t.n.dot(pts[a]);
  return t;
}

// Signed distance of p from the triangle's in-plane boundary; positive
// means strictly outside some edge. Used only for near-coplanar points.
double outside_edge_distance(const std::vector<Vec3>& pts, const Tri& t, const Vec3& p) {
  const int idx[3] = {t.a, t.b, t.c};
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const Vec3& u = pts[idx[k]];
    const Vec3& v = pts[idx[(k + 1) % 3]];
    Vec3 out = (v - u).cross(t.n);  // in-plane, points away from the triangle
    double len = out.norm();
    if (len <= 0.0) continue;
    best = std::max(best, out.dot(p - u) / len);
  }
  return best;
}

}  // namespace

Mat2 rot2(double phi) {
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  Mat2 m;
  m << c, -s, s, c;
  return m;
}

Vec3 face_normal(const ConvexPolytope& p, int f) {
  const auto& loop = p.faces[f];
  Vec3 c = Vec3::Zero();
  for (int i : loop) c += p.vertices[i];
  c /= static_cast<double>(loop.size());
  Vec3 n = Vec3::Zero();
  for (size_t k = 0; k < loop.size(); ++k) {
    const Vec3& u = p.vertices[loop[k]];
    const Vec3& v = p.vertices[loop[(k + 1) % loop.size()]];
    n += (u - c).cross(v - c);
  }
  double len = n.norm();
  if (len <= 0.0) return Vec3::Zero();
  return n / len;
}

Plane face_plane(const ConvexPolytope& p, int f) {
  return Plane{face_normal(p, f), p.vertices[p.faces[f][0]]};
}

bool polytope_contains(const ConvexPolytope& p, const Vec3& x, double tol) {
  for (size_t f = 0; f < p.faces.size(); ++f) {
    Plane pl = face_plane(p, static_cast<int>(f));
    if (pl.normal.dot(x - pl.point) > tol) return false;
  }
  return true;
}

bool polytope_is_valid(const ConvexPolytope& p, double tol) {
  if (p.empty()) return true;
  if (p.faces.size() < 4) return false;
  for (const auto& loop : p.faces)
    if (loop.size() < 3) return false;
  for (const Vec3& v : p.vertices)
    if (!polytope_contains(p, v, tol)) return false;
  // Every directed edge must be matched by its reverse in another face.
  std::map<std::pair<int, int>, int> count;
  for (const auto& loop : p.faces)
    for (size_t k = 0; k < loop.size(); ++k)
      count[{loop[k], loop[(k + 1) % loop.size()]}]++;
  for (const auto& [e, c] : count) {
    if (c != 1) return false;
    auto rev = count.find({e.second, e.first});
    if (rev == count.end() || rev->second != 1) return false;
  }
  return true;
}

ConvexPolytope convex_hull_3d(std::span<const Vec3> points) {
  const double scale = scale_of(points);
  const double eps = kEps;  // absolute, the face-residual contract is absolute

  // Weld duplicates, keeping first occurrence order.
  std::vector<Vec3> pts;
  pts.reserve(points.size());
  for (const Vec3& p : points) {
    bool dup = false;
    for (const Vec3& q : pts)
      if ((p - q).norm() <= 1e-12 * scale) {
        dup = true;
        break;
      }
    if (!dup) pts.push_back(p);
  }
  const int n = static_cast<int>(pts.size());
  if (n < 4) throw DegenerateInput("convex_hull_3d: need at least 4 distinct points");

  // Initial simplex from extreme points.
  int i0 = 0;
  for (int i = 1; i < n; ++i) {
    const Vec3 &a = pts[i], &b = pts[i0];
    if (std::tie(a.x(), a.y(), a.z()) < std::tie(b.x(), b.y(), b.z())) i0 = i;
  }
  int i1 = -1;
  double best = eps;
  for (int i = 0; i < n; ++i) {
    double d = (pts[i] - pts[i0]).norm();
    if (d > best) {
      best = d;
      i1 = i;
    }
  }
  if (i1 < 0) throw DegenerateInput("convex_hull_3d: all points coincide");
  int i2 = -1;
  best = eps;
  Vec3 dir = (pts[i1] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    Vec3 r = pts[i] - pts[i0];
    double d = (r - r.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = i;
    }
  }
  if (i2 < 0) throw DegenerateInput("convex_hull_3d: points are collinear");
  int i3 = -1;
  best = eps;
  Vec3 pn = (pts[i1] - pts[i0]).cross(pts[i2] - pts[i0]).normalized();
  for (int i = 0; i < n; ++i) {
    double d = std::abs(pn.dot(pts[i] - pts[i0]));
    if (d > best) {
      best = d;
      i3 = i;
    }
  }
  if (i3 < 0) throw DegenerateInput("convex_hull_3d: points are coplanar");

  if (pn.dot(pts[i3] - pts[i0]) > 0.0) std::swap(i1, i2);

  std::vector<Tri> tris;
  tris.push_back(make_tri(pts, i0, i1, i2));
  tris.push_back(make_tri(pts, i0, i2, i3));
  tris.push_back(make_tri(pts, i2, i1, i3));
  tris.push_back(make_tri(pts, i1, i0, i3));

  for (int i = 0; i < n; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    const Vec3& p = pts[i];

    // A face is visible when p is strictly outside its plane. Points that
    // land on a face plane still extend the hull when they fall outside the
    // triangle itself, which happens for exactly coplanar inputs like box
    // corners.
    std::vector<int> visible;
    for (size_t f = 0; f < tris.size(); ++f) {
      if (!tris[f].alive) continue;
      double dist = tris[f].n.dot(p) - tris[f].d;
      if (dist > eps) {
        visible.push_back(static_cast<int>(f));
      } else if (dist > -eps && outside_edge_distance(pts, tris[f], p) > eps) {
        visible.push_back(static_cast<int>(f));
      }
    }
    if (visible.empty()) continue;

    // Horizon: directed edges of visible faces whose twin face is unseen.
    std::map<std::pair<int, int>, int> edge_seen;
    for (int f : visible) {
      const Tri& t = tris[f];
      const int e[3][2] = {{t.a, t.b}, {t.b, t.c}, {t.c, t.a}};
      for (auto& ed : e) edge_seen[{ed[0], ed[1]}]++;
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [e, cnt] : edge_seen) {
      (void)cnt;
      if (edge_seen.find({e.second, e.first}) == edge_seen.end()) horizon.push_back(e);
    }
    for (int f : visible) tris[f].alive = false;
    for (const auto& [u, v] : horizon) tris.push_back(make_tri(pts, u, v, i));
  }

  // Compact to used vertices, numbered in input order.
  std::vector<int> remap(n, -1);
  std::vector<bool> used(n, false);
  for (const Tri& t : tris)
    if (t.alive) used[t.a] = used[t.b] = used[t.c] = true;
  ConvexPolytope out;
  for (int idx = 0; idx < n; ++idx) {
    if (used[idx]) {
      remap[idx] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(pts[idx]);
    }
  }
  for (const Tri& t : tris)
    if (t.alive) out.faces.push_back({remap[t.a], remap[t.b], remap[t.c]});
  return out;
}

ConvexPolytope clip_polytope(const ConvexPolytope& p, const Plane& h) {
  if (p.empty()) return p;
  const double scale = scale_of(p.vertices);
  const double eps = 1e-12 * scale;

  std::vector<double> d(p.vertices.size());
  bool any_in = false, any_out = false;
  for (size_t i = 0; i < p.vertices.size(); ++i) {
    d[i] = h.normal.dot(p.vertices[i] - h.point);
    if (d[i] < -eps) any_in = true;
    if (d[i] > eps) any_out = true;
  }
  if (!any_out) return p;
  if (!any_in) return ConvexPolytope{};

  // New vertices: kept originals plus one cut point per crossing edge.
  // Cut points are keyed by the undirected edge so the two faces sharing
  // the edge receive bit-identical coordinates.
  std::vector<int> vmap(p.vertices.size(), -1);
  std::map<std::pair<int, int>, int> cut;
  ConvexPolytope out;

  auto keep_vertex = [&](int i) {
    if (vmap[i] < 0) {
      vmap[i] = static_cast<int>(out.vertices.size());
      out.vertices.push_back(p.vertices[i]);
    }
    return vmap[i];
  };
  auto cut_vertex = [&](int i, int j) {
    auto key = std::minmax(i, j);
    auto it = cut.find(key);
    if (it != cut.end()) return it->second;
    double t = d[key.first] / (d[key.first] - d[key.second]);
    Vec3 x = p.vertices[key.first] + t * (p.vertices[key.second] - p.vertices[key.first]);
    int idx = static_cast<int>(out.vertices.size());
    out.vertices.push_back(x);
    cut.emplace(key, idx);
    return idx;
  };

  for (const auto& loop : p.faces) {
    std::vector<int> nl;
    const size_t m = loop.size();
    for (size_t k = 0; k < m; ++k) {
      int i = loop[k], j = loop[(k + 1) % m];
      bool in_i = d[i] <= eps, in_j = d[j] <= eps;
      if (in_i) nl.push_back(keep_vertex(i));
      if (in_i != in_j && std::abs(d[i]) > eps && std::abs(d[j]) > eps)
        nl.push_back(cut_vertex(i, j));
    }
    // Drop collapsed loops and repeated indices.
    std::vector<int> dedup;
    for (int idx : nl)
      if (dedup.empty() || idx != dedup.back()) dedup.push_back(idx);
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    if (dedup.size() >= 3) out.faces.push_back(std::move(dedup));
  }

  if (out.faces.empty()) return ConvexPolytope{};

  // Cap face: directed edges that lost their twin bound the cut. Chain the
  // reversed unmatched edges into a loop; for a convex input there is at
  // most one.
  std::map<std::pair<int, int>, int> count;
  for (const auto& loop : out.faces)
    for (size_t k = 0; k < loop.size(); ++k)
      count[{loop[k], loop[(k + 1) % loop.size()]}]++;
  std::map<int, int> nxt;  // reversed unmatched edge u->v becomes nxt[v] = u
  for (const auto& [e, c] : count) {
    (void)c;
    if (count.find({e.second, e.first}) == count.end()) nxt[e.second] = e.first;
  }
  if (!nxt.empty()) {
    std::vector<int> cap;
    int start = nxt.begin()->first;
    int cur = start;
    do {
      cap.push_back(cur);
      auto it = nxt.find(cur);
      if (it == nxt.end()) break;  // open chain, numerically collapsed cap
      cur = it->second;
    } while (cur != start && cap.size() <= nxt.size() + 1);
    if (cap.size() >= 3 && cur == start) out.faces.push_back(std::move(cap));
  }

  return out;
}

double polytope_volume(const ConvexPolytope& p) {
  if (p.empty() || p.faces.empty()) return 0.0;
  Vec3 c = Vec3::Zero();
  for (const Vec3& v : p.vertices) c += v;
  c /= static_cast<double>(p.vertices.size());
  double vol = 0.0;
  for (const auto& loop : p.faces) {
    for (size_t k = 1; k + 1 < loop.size(); ++k) {
      Vec3 a = p.vertices[loop[0]] - c;
      Vec3 b = p.vertices[loop[k]] - c;
      Vec3 d = p.vertices[loop[k + 1]] - c;
      vol += a.dot(b.cross(d));
    }
  }
  return std::max(0.0, vol / 6.0);
}

Vec3 ray_plane_intersection(const Vec3& origin, const Vec3& dir, const Plane& plane) {
  double denom = dir.dot(plane.normal);
  if (std::abs(denom) <= 1e-9)
    throw NoIntersection("ray_plane_intersection: ray parallel to plane");
  double t = plane.normal.dot(plane.point - origin) / denom;
  if (t < -1e-12) throw NoIntersection("ray_plane_intersection: ray points away from plane");
  return origin + std::max(t, 0.0) * dir;
}

}  // namespace pfc
