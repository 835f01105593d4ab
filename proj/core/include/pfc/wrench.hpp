#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "pfc/geometry.hpp"

namespace pfc {

// Planar reaction wrenches live in a 3D space: two force components plus a
// moment about the object frame origin. All cone-level geometry (projection,
// classification, estimation) happens on moment-scaled coordinates
// (fx, fy, tau / L) with L a characteristic length of the object, so that
// distances and angles mix forces and moments meaningfully.

/// Contact-mode alphabet. Slide directions follow the sign of the object's
/// tangential velocity, pivot directions the sign of its angular velocity.
enum class ModeLabel {
  Static,
  SlideLeft,   // sl
  SlideRight,  // sr
  PivotCw,     // cw
  PivotCcw,    // ccw
  CwSlideLeft,
  CwSlideRight,
  CcwSlideLeft,
  CcwSlideRight,
};

std::string to_string(ModeLabel m);
ModeLabel mode_from_string(const std::string& s);
bool is_pivot(ModeLabel m);
bool is_slide(ModeLabel m);
bool is_mixed(ModeLabel m);
/// cwsl = combine(cw, sl) and so on; identity when one side is Static.
ModeLabel combine_modes(ModeLabel pivot, ModeLabel slide);
/// Pivot / slide component of a (possibly mixed) label, Static if absent.
ModeLabel pivot_part(ModeLabel m);
ModeLabel slide_part(ModeLabel m);

struct Wrench {
  double fx = 0.0;
  double fy = 0.0;
  double tau = 0.0;  // N*m about the object frame origin

  Vec2 force() const { return Vec2(fx, fy); }
  Vec3 scaled(double char_length) const { return Vec3(fx, fy, tau / char_length); }
  static Wrench from_scaled(const Vec3& w, double char_length) {
    return Wrench{w.x(), w.y(), w.z() * char_length};
  }
  Wrench operator+(const Wrench& o) const { return {fx + o.fx, fy + o.fy, tau + o.tau}; }
  Wrench operator-(const Wrench& o) const { return {fx - o.fx, fy - o.fy, tau - o.tau}; }
  Wrench operator-() const { return {-fx, -fy, -tau}; }
  Wrench operator*(double s) const { return {fx * s, fy * s, tau * s}; }
};

struct ContactPoint {
  Vec2 position_w;       // contact position in the object frame, meters
  Vec2 surface_normal_b; // unit surface normal in the base frame
  double mu = 0.0;       // Coulomb friction coefficient, > 0
};

/// Eq-style wrench of a force f applied at point p, both in the object
/// frame: (f, p x f).
Wrench wrench_from_contact_force(const Vec2& f, const Vec2& p);

/// Base-frame vector expressed in the object frame rotated by phi.
Vec2 force_to_wrench_frame(const Vec2& f_b, double phi);

/// Left/right friction-cone edge directions in the base frame.
/// Convention: the right edge is the normal rotated clockwise by atan(mu),
/// the left edge counter-clockwise. Both come out unit length.
std::pair<Vec2, Vec2> friction_cone_edges(const Vec2& normal_b, double mu);

struct ConeFace {
  int e0 = -1, e1 = -1;          // edge indices, consecutive in angular order
  ModeLabel label = ModeLabel::Static;  // Static until labelled
  Vec3 outward_normal = Vec3::Zero();
  int pivot_contact = -1;        // owning contact for cw/ccw faces
};

/// Convex polyhedral cone of feasible reaction wrenches, apex at the origin
/// of the scaled wrench space. Two shapes occur in practice: four edges and
/// four lateral faces for a two-contact configuration, and a flat two-edge
/// sector for a single contact. The flat sector is stored with two coplanar
/// faces whose normals are the two signs of the sector plane normal.
struct PolyhedralCone {
  double char_length = 1.0;
  std::vector<Vec3> edges;          // unit vectors in scaled coordinates
  std::vector<ConeFace> faces;
  std::vector<ModeLabel> edge_labels;  // mixed labels (4-edge) or slide labels (2-edge)
  std::vector<int> edge_contact;       // contact id per edge, -1 when unknown
  bool labelled = false;

  int face_of(ModeLabel label) const;     // -1 when absent
  int edge_of(ModeLabel label) const;     // -1 when absent
  Vec3 axis() const;                      // normalized mean of the edges
};

/// Ground-truth cone from 1 or 2 contact points at object rotation phi.
/// Edge wrenches are built from the contact friction-cone edges, scaled by
/// char_length and normalized; faces carry physically derived mode labels.
PolyhedralCone analytical_cone(const std::vector<ContactPoint>& contacts, double phi,
                               double char_length);

enum class ClassifyStatus {
  Ok,
  Separation,  // -w_a pulls the object off every contact, no contact mode applies
};

struct ClassifyResult {
  ModeLabel label = ModeLabel::Static;
  ClassifyStatus status = ClassifyStatus::Ok;
  bool ambiguous = false;      // within the boundary band, neighbor is as valid
  ModeLabel neighbor = ModeLabel::Static;
  double margin_rad = 0.0;     // angular distance to the nearest region boundary
};

/// Angular half-width of the ambiguity band around region boundaries.
constexpr double kBoundaryBandRad = 0.5 * M_PI / 180.0;

/// Contact-mode classification: Static when -w_a lies inside the cone,
/// otherwise the label of the region its direction falls in. For the flat
/// single-contact cone the static and slide regions live exactly on the
/// sector plane; any off-plane component classifies as rotation or a mixed
/// mode. kBoundaryBandRad only drives the ambiguity flag.
ClassifyResult classify_mode(const PolyhedralCone& cone, const Wrench& w_a);

struct ConeProjection {
  Vec3 point = Vec3::Zero();   // nearest cone point to u, scaled coordinates
  double distance = 0.0;       // Euclidean distance of u to the cone
  double slide_excess = 0.0;   // residual component driving translation
  double pivot_excess = 0.0;   // residual component driving rotation
};

/// Euclidean projection of u (scaled) onto the cone, with the residual
/// split into the slide and pivot face directions of the active region.
ConeProjection project_onto_cone(const PolyhedralCone& cone, const Vec3& u,
                                 const ClassifyResult& region);

/// Unit normal of the plane spanned by two cone edges, (w_r x w_l)/|.|.
/// Throws ParallelEdges when the cross product vanishes.
Vec3 coplanarity_normal(const Vec3& w_r_hat, const Vec3& w_l_hat);

/// Advance a unit edge wrench through an object rotation of delta_phi: the
/// force part rotates by R^T(delta_phi), the moment component is re-solved
/// from m_hat . w = 0, and the result is normalized. Throws SingularPlane
/// when m_hat has no moment component.
Vec3 transform_edge(const Vec3& w_hat, double delta_phi, const Vec3& m_hat);

/// Residual of the single-contact coplanarity identity
///   w^t x w^{t+dt} = sin(dphi) (f.f) (-p_y, p_x, -1)
/// in scaled coordinates. Zero (to rounding) for two wrenches of the same
/// fixed contact; test oracle material.
Vec3 coplanarity_residual(const Vec3& w_t, const Vec3& w_t_next, const Vec2& p,
                          double f_sq, double delta_phi, double char_length);

}  // namespace pfc
