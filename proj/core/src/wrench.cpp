#include "pfc/wrench.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace pfc {

namespace {

constexpr double kTinyNorm = 1e-12;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

// Angular distance of unit u to the plane through the origin with unit
// normal nu, signed positive on the +nu side.
double plane_margin(const Vec3& u_hat, const Vec3& nu) {
  return std::asin(clamp_unit(u_hat.dot(nu)));
}

}  // namespace

std::string to_string(ModeLabel m) {
  switch (m) {
    case ModeLabel::Static: return "static";
    case ModeLabel::SlideLeft: return "sl";
    case ModeLabel::SlideRight: return "sr";
    case ModeLabel::PivotCw: return "cw";
    case ModeLabel::PivotCcw: return "ccw";
    case ModeLabel::CwSlideLeft: return "cwsl";
    case ModeLabel::CwSlideRight: return "cwsr";
    case ModeLabel::CcwSlideLeft: return "ccwsl";
    case ModeLabel::CcwSlideRight: return "ccwsr";
  }
  return "static";
}

ModeLabel mode_from_string(const std::string& s) {
  if (s == "static") return ModeLabel::Static;
  if (s == "sl") return ModeLabel::SlideLeft;
  if (s == "sr") return ModeLabel::SlideRight;
  if (s == "cw") return ModeLabel::PivotCw;
  if (s == "ccw") return ModeLabel::PivotCcw;
  if (s == "cwsl") return ModeLabel::CwSlideLeft;
  if (s == "cwsr") return ModeLabel::CwSlideRight;
  if (s == "ccwsl") return ModeLabel::CcwSlideLeft;
  if (s == "ccwsr") return ModeLabel::CcwSlideRight;
  throw UnknownMode("unknown mode label: " + s);
}

bool is_pivot(ModeLabel m) { return m == ModeLabel::PivotCw || m == ModeLabel::PivotCcw; }

bool is_slide(ModeLabel m) { return m == ModeLabel::SlideLeft || m == ModeLabel::SlideRight; }

bool is_mixed(ModeLabel m) {
  switch (m) {
    case ModeLabel::CwSlideLeft:
    case ModeLabel::CwSlideRight:
    case ModeLabel::CcwSlideLeft:
    case ModeLabel::CcwSlideRight: return true;
    default: return false;
  }
}

ModeLabel combine_modes(ModeLabel pivot, ModeLabel slide) {
  if (pivot == ModeLabel::Static) return slide;
  if (slide == ModeLabel::Static) return pivot;
  const bool cw = pivot == ModeLabel::PivotCw;
  const bool left = slide == ModeLabel::SlideLeft;
  if (cw) return left ? ModeLabel::CwSlideLeft : ModeLabel::CwSlideRight;
  return left ? ModeLabel::CcwSlideLeft : ModeLabel::CcwSlideRight;
}

ModeLabel pivot_part(ModeLabel m) {
  switch (m) {
    case ModeLabel::PivotCw:
    case ModeLabel::CwSlideLeft:
    case ModeLabel::CwSlideRight: return ModeLabel::PivotCw;
    case ModeLabel::PivotCcw:
    case ModeLabel::CcwSlideLeft:
    case ModeLabel::CcwSlideRight: return ModeLabel::PivotCcw;
    default: return ModeLabel::Static;
  }
}

ModeLabel slide_part(ModeLabel m) {
  switch (m) {
    case ModeLabel::SlideLeft:
    case ModeLabel::CwSlideLeft:
    case ModeLabel::CcwSlideLeft: return ModeLabel::SlideLeft;
    case ModeLabel::SlideRight:
    case ModeLabel::CwSlideRight:
    case ModeLabel::CcwSlideRight: return ModeLabel::SlideRight;
    default: return ModeLabel::Static;
  }
}

Wrench wrench_from_contact_force(const Vec2& f, const Vec2& p) {
  return Wrench{f.x(), f.y(), cross2(p, f)};
}

Vec2 force_to_wrench_frame(const Vec2& f_b, double phi) {
  return rot2(phi).transpose() * f_b;
}

std::pair<Vec2, Vec2> friction_cone_edges(const Vec2& normal_b, double mu) {
  if (mu <= 0.0) throw ConfigError("friction_cone_edges: mu must be positive");
  const double half_angle = std::atan(mu);
  Vec2 f_l = rot2(half_angle) * normal_b;
  Vec2 f_r = rot2(-half_angle) * normal_b;
  return {f_l, f_r};
}

int PolyhedralCone::face_of(ModeLabel label) const {
  for (size_t i = 0; i < faces.size(); ++i)
    if (faces[i].label == label) return static_cast<int>(i);
  return -1;
}

int PolyhedralCone::edge_of(ModeLabel label) const {
  for (size_t i = 0; i < edge_labels.size(); ++i)
    if (edge_labels[i] == label) return static_cast<int>(i);
  return -1;
}

Vec3 PolyhedralCone::axis() const {
  Vec3 a = Vec3::Zero();
  for (const Vec3& e : edges) a += e;
  double n = a.norm();
  if (n <= kTinyNorm) throw DegenerateInput("cone axis undefined");
  return a / n;
}

namespace {

// Moment about a contact point of a raw (unscaled) wrench.
double moment_about(const Wrench& w, const Vec2& p) { return w.tau - cross2(p, w.force()); }

Vec3 edge_wrench_scaled(const ContactPoint& c, const Vec2& f_b, double phi, double L) {
  Vec2 f_w = force_to_wrench_frame(f_b, phi);
  Wrench w = wrench_from_contact_force(f_w, c.position_w);
  Vec3 s = w.scaled(L);
  return s / s.norm();
}

ModeLabel slide_label_for_edge(const Vec3& edge, const Vec2& tangent_w) {
  // Reaction pinned on an edge whose friction component points along
  // +tangent means the object slips toward -tangent, and vice versa.
  double t = edge.x() * tangent_w.x() + edge.y() * tangent_w.y();
  return t > 0.0 ? ModeLabel::SlideLeft : ModeLabel::SlideRight;
}

PolyhedralCone single_contact_cone(const ContactPoint& c, double phi, double L) {
  auto [f_l, f_r] = friction_cone_edges(c.surface_normal_b, c.mu);
  PolyhedralCone cone;
  cone.char_length = L;
  cone.edges = {edge_wrench_scaled(c, f_r, phi, L), edge_wrench_scaled(c, f_l, phi, L)};
  cone.edge_contact = {0, 0};

  Vec3 m_hat = coplanarity_normal(cone.edges[0], cone.edges[1]);

  // Rotation label per plane side: probe -w_a = m_hat and read the sign of
  // the action moment about the contact.
  Wrench probe = -Wrench::from_scaled(m_hat, L);
  ModeLabel pos = moment_about(probe, c.position_w) > 0.0 ? ModeLabel::PivotCcw : ModeLabel::PivotCw;
  ModeLabel neg = pos == ModeLabel::PivotCcw ? ModeLabel::PivotCw : ModeLabel::PivotCcw;
  cone.faces.push_back(ConeFace{0, 1, pos, m_hat, 0});
  cone.faces.push_back(ConeFace{0, 1, neg, -m_hat, 0});

  Vec2 n_w = force_to_wrench_frame(c.surface_normal_b, phi);
  Vec2 t_w = Vec2(n_w.y(), -n_w.x());
  cone.edge_labels = {slide_label_for_edge(cone.edges[0], t_w),
                      slide_label_for_edge(cone.edges[1], t_w)};
  cone.labelled = true;
  return cone;
}

}  // namespace

PolyhedralCone analytical_cone(const std::vector<ContactPoint>& contacts, double phi,
                               double char_length) {
  if (contacts.empty() || contacts.size() > 2)
    throw InvalidContacts("analytical_cone: need 1 or 2 contacts, got " +
                          std::to_string(contacts.size()));
  const double L = char_length;
  if (L <= 0.0) throw ConfigError("analytical_cone: char_length must be positive");

  if (contacts.size() == 1) return single_contact_cone(contacts[0], phi, L);

  Vec2 n_w = force_to_wrench_frame(contacts[0].surface_normal_b, phi);
  Vec2 t_w = Vec2(n_w.y(), -n_w.x());

  // Contact a sits at the lesser tangential coordinate.
  int ia = 0, ib = 1;
  if (contacts[0].position_w.dot(t_w) > contacts[1].position_w.dot(t_w)) std::swap(ia, ib);
  const ContactPoint& ca = contacts[ia];
  const ContactPoint& cb = contacts[ib];

  struct RawEdge {
    Vec3 w;
    int contact;  // 0 = a, 1 = b
  };
  std::vector<RawEdge> raw;
  for (int k = 0; k < 2; ++k) {
    const ContactPoint& c = k == 0 ? ca : cb;
    auto [f_l, f_r] = friction_cone_edges(c.surface_normal_b, c.mu);
    raw.push_back({edge_wrench_scaled(c, f_r, phi, L), k});
    raw.push_back({edge_wrench_scaled(c, f_l, phi, L), k});
  }

  Vec3 axis = (raw[0].w + raw[1].w + raw[2].w + raw[3].w).normalized();
  Vec3 b1 = axis.cross(Vec3::UnitZ());
  if (b1.norm() < 1e-6) b1 = axis.cross(Vec3::UnitX());
  b1.normalize();
  Vec3 b2 = axis.cross(b1);
  std::sort(raw.begin(), raw.end(), [&](const RawEdge& u, const RawEdge& v) {
    return std::atan2(u.w.dot(b2), u.w.dot(b1)) < std::atan2(v.w.dot(b2), v.w.dot(b1));
  });

  PolyhedralCone cone;
  cone.char_length = L;
  for (const RawEdge& e : raw) {
    cone.edges.push_back(e.w);
    cone.edge_contact.push_back(e.contact);
  }

  // Pivot direction of contact c: the rotation sign that lifts the other
  // contact off the surface.
  auto pivot_label = [&](int c) {
    const Vec2& p_self = (c == 0 ? ca : cb).position_w;
    const Vec2& p_other = (c == 0 ? cb : ca).position_w;
    double lift_ccw = perp2(p_other - p_self).dot(n_w);
    return lift_ccw > 0.0 ? ModeLabel::PivotCcw : ModeLabel::PivotCw;
  };

  for (int i = 0; i < 4; ++i) {
    int j = (i + 1) % 4;
    ConeFace f;
    f.e0 = i;
    f.e1 = j;
    Vec3 n = cone.edges[i].cross(cone.edges[j]);
    if (n.norm() <= kTinyNorm) throw DegenerateInput("analytical_cone: parallel adjacent edges");
    n.normalize();
    if (n.dot(axis) > 0.0) n = -n;
    f.outward_normal = n;
    if (cone.edge_contact[i] == cone.edge_contact[j]) {
      f.pivot_contact = cone.edge_contact[i];
      f.label = pivot_label(f.pivot_contact);
    } else {
      f.label = slide_label_for_edge(cone.edges[i], t_w);
      // Faces between contacts must pair same-side friction edges.
      if (f.label != slide_label_for_edge(cone.edges[j], t_w))
        throw DegenerateInput("analytical_cone: inconsistent slide face");
    }
    cone.faces.push_back(f);
  }

  // Mixed labels per edge from the two adjacent faces.
  cone.edge_labels.assign(4, ModeLabel::Static);
  for (int i = 0; i < 4; ++i) {
    const ConeFace& prev = cone.faces[(i + 3) % 4];
    const ConeFace& next = cone.faces[i];
    ModeLabel pivot = ModeLabel::Static, slide = ModeLabel::Static;
    for (const ConeFace* f : {&prev, &next}) {
      if (is_pivot(f->label)) pivot = f->label;
      if (is_slide(f->label)) slide = f->label;
    }
    if (pivot == ModeLabel::Static || slide == ModeLabel::Static)
      throw DegenerateInput("analytical_cone: face labelling failed");
    cone.edge_labels[i] = combine_modes(pivot, slide);
  }
  cone.labelled = true;
  return cone;
}

namespace {

struct Region {
  ModeLabel label = ModeLabel::Static;
  ClassifyStatus status = ClassifyStatus::Ok;
  // Inward unit facet normals with the label across each facet.
  std::vector<Vec3> facet_normals;
  std::vector<ModeLabel> facet_neighbors;
  std::vector<ClassifyStatus> facet_neighbor_status;
  int kind = 0;  // 0 inside, 1 face, 2 edge, 3 apex
  int index = -1;
};

Vec3 facet_inward(const Vec3& a, const Vec3& b, const Vec3& inside) {
  Vec3 n = a.cross(b).normalized();
  if (n.dot(inside) < 0.0) n = -n;
  return n;
}

ClassifyResult classify_four_edge(const PolyhedralCone& cone, const Vec3& u_hat) {
  const int n = 4;
  std::vector<Region> regions;

  Region inside;
  inside.label = ModeLabel::Static;
  for (int f = 0; f < n; ++f) {
    inside.facet_normals.push_back(-cone.faces[f].outward_normal);
    inside.facet_neighbors.push_back(cone.faces[f].label);
    inside.facet_neighbor_status.push_back(ClassifyStatus::Ok);
  }
  regions.push_back(inside);

  for (int f = 0; f < n; ++f) {
    const ConeFace& face = cone.faces[f];
    const Vec3& e0 = cone.edges[face.e0];
    const Vec3& e1 = cone.edges[face.e1];
    const Vec3& nf = face.outward_normal;
    Region r;
    r.label = face.label;
    r.kind = 1;
    r.index = f;
    r.facet_normals = {facet_inward(e0, e1, nf), facet_inward(e0, nf, e1),
                       facet_inward(e1, nf, e0)};
    r.facet_neighbors = {ModeLabel::Static, cone.edge_labels[face.e0],
                         cone.edge_labels[face.e1]};
    r.facet_neighbor_status = {ClassifyStatus::Ok, ClassifyStatus::Ok, ClassifyStatus::Ok};
    regions.push_back(r);
  }

  for (int e = 0; e < n; ++e) {
    // Adjacent faces of edge e in the cyclic layout.
    const ConeFace& left = cone.faces[(e + 3) % 4];
    const ConeFace& right = cone.faces[e];
    const Vec3& ev = cone.edges[e];
    Region r;
    r.label = cone.edge_labels[e];
    r.kind = 2;
    r.index = e;
    r.facet_normals = {facet_inward(ev, left.outward_normal, right.outward_normal),
                       facet_inward(ev, right.outward_normal, left.outward_normal),
                       facet_inward(left.outward_normal, right.outward_normal, ev)};
    r.facet_neighbors = {left.label, right.label, ModeLabel::Static};
    r.facet_neighbor_status = {ClassifyStatus::Ok, ClassifyStatus::Ok,
                               ClassifyStatus::Separation};
    regions.push_back(r);
  }

  Region apex;
  apex.label = ModeLabel::Static;
  apex.status = ClassifyStatus::Separation;
  apex.kind = 3;
  for (int e = 0; e < n; ++e) {
    apex.facet_normals.push_back(-cone.edges[e]);
    apex.facet_neighbors.push_back(cone.edge_labels[e]);
    apex.facet_neighbor_status.push_back(ClassifyStatus::Ok);
  }
  regions.push_back(apex);

  // Membership in the closed cone wins outright: a boundary point balances
  // the action and the mode is static.
  {
    double mn = std::numeric_limits<double>::infinity();
    size_t arg = 0;
    for (size_t k = 0; k < inside.facet_normals.size(); ++k) {
      const double m = plane_margin(u_hat, inside.facet_normals[k]);
      if (m < mn) {
        mn = m;
        arg = k;
      }
    }
    if (mn >= -1e-12) {
      ClassifyResult res;
      res.label = ModeLabel::Static;
      res.margin_rad = std::max(0.0, mn);
      res.ambiguous = mn < kBoundaryBandRad;
      res.neighbor = inside.facet_neighbors[arg];
      return res;
    }
  }

  // Otherwise pick the region holding u with the largest minimal facet
  // margin; the regions tile the space.
  const Region* best = nullptr;
  double best_margin = -std::numeric_limits<double>::infinity();
  size_t best_facet = 0;
  for (const Region& r : regions) {
    double mn = std::numeric_limits<double>::infinity();
    size_t arg = 0;
    for (size_t k = 0; k < r.facet_normals.size(); ++k) {
      double m = plane_margin(u_hat, r.facet_normals[k]);
      if (m < mn) {
        mn = m;
        arg = k;
      }
    }
    if (mn > best_margin) {
      best_margin = mn;
      best = &r;
      best_facet = arg;
    }
  }

  ClassifyResult res;
  res.label = best->label;
  res.status = best->status;
  res.margin_rad = std::max(0.0, best_margin);
  res.ambiguous = best_margin < kBoundaryBandRad;
  res.neighbor = best->facet_neighbors[best_facet];
  return res;
}

ClassifyResult classify_flat_cone(const PolyhedralCone& cone, const Vec3& u_hat) {
  const Vec3 m_hat = cone.faces[0].outward_normal;
  const Vec3& e0 = cone.edges[0];
  const Vec3& e1 = cone.edges[1];
  // In-plane inward normals of the sector sides.
  Vec3 nu0 = m_hat.cross(e0).normalized();
  if (nu0.dot(e1) < 0.0) nu0 = -nu0;
  Vec3 nu1 = m_hat.cross(e1).normalized();
  if (nu1.dot(e0) < 0.0) nu1 = -nu1;

  // The slide and static regions live exactly on the sector plane; any
  // off-plane component of the action torques the object about the contact.
  constexpr double kPlaneTol = 1e-9;
  const double off = plane_margin(u_hat, m_hat);  // signed off-plane angle
  const double d0 = plane_margin(u_hat, nu0);
  const double d1 = plane_margin(u_hat, nu1);
  const bool in_plane = std::abs(off) <= kPlaneTol;
  ModeLabel rot = off > 0.0 ? cone.faces[0].label : cone.faces[1].label;

  ClassifyResult res;
  if (d0 < 0.0 && d1 < 0.0) {
    // Behind the apex: the action pulls the object off the contact.
    res.status = ClassifyStatus::Separation;
    res.label = ModeLabel::Static;
    res.margin_rad = std::min(-d0, -d1);
    res.ambiguous = res.margin_rad < kBoundaryBandRad;
    res.neighbor = d0 > d1 ? cone.edge_labels[0] : cone.edge_labels[1];
    return res;
  }

  if (in_plane) {
    if (d0 >= 0.0 && d1 >= 0.0) {
      res.label = ModeLabel::Static;
      res.margin_rad = std::min(d0, d1);
      res.neighbor = d0 < d1 ? cone.edge_labels[0] : cone.edge_labels[1];
    } else {
      const int k = d0 < 0.0 ? 0 : 1;
      res.label = cone.edge_labels[k];
      res.margin_rad = -(k == 0 ? d0 : d1);
      res.neighbor = ModeLabel::Static;
    }
  } else {
    const double off_margin = std::abs(off);
    if (d0 >= 0.0 && d1 >= 0.0) {
      res.label = rot;
      res.margin_rad = std::min({off_margin, d0, d1});
      res.neighbor = d0 < d1 ? combine_modes(rot, cone.edge_labels[0])
                             : combine_modes(rot, cone.edge_labels[1]);
      if (off_margin <= std::min(d0, d1)) res.neighbor = ModeLabel::Static;
    } else {
      const int k = d0 < 0.0 ? 0 : 1;
      res.label = combine_modes(rot, cone.edge_labels[k]);
      res.margin_rad = std::min(off_margin, -(k == 0 ? d0 : d1));
      res.neighbor = off_margin < -(k == 0 ? d0 : d1) ? cone.edge_labels[k] : rot;
    }
  }
  res.ambiguous = res.margin_rad < kBoundaryBandRad;
  res.margin_rad = std::max(0.0, res.margin_rad);
  return res;
}

}  // namespace

ClassifyResult classify_mode(const PolyhedralCone& cone, const Wrench& w_a) {
  if (!cone.labelled) throw UnknownMode("classify_mode: cone has no labels");
  if (cone.edges.size() != 2 && cone.edges.size() != 4)
    throw UnknownMode("classify_mode: need a 2- or 4-edge cone");
  Vec3 u = (-w_a).scaled(cone.char_length);
  double n = u.norm();
  if (n <= kTinyNorm) {
    // Zero action balances trivially.
    ClassifyResult res;
    res.label = ModeLabel::Static;
    res.margin_rad = M_PI;
    return res;
  }
  Vec3 u_hat = u / n;
  if (cone.edges.size() == 2) return classify_flat_cone(cone, u_hat);
  return classify_four_edge(cone, u_hat);
}

ConeProjection project_onto_cone(const PolyhedralCone& cone, const Vec3& u,
                                 const ClassifyResult& region) {
  ConeProjection out;
  if (cone.edges.size() == 2) {
    const Vec3 m_hat = cone.faces[0].outward_normal;
    const double s = u.dot(m_hat);
    Vec3 u_in = u - s * m_hat;
    Vec3 p = u_in;
    double slide = 0.0;
    if (region.status == ClassifyStatus::Separation) {
      p = Vec3::Zero();
    } else if (region.label != ModeLabel::Static && slide_part(region.label) != ModeLabel::Static) {
      const int k = cone.edge_of(slide_part(region.label));
      const Vec3& e = cone.edges[k >= 0 ? k : 0];
      p = std::max(0.0, u_in.dot(e)) * e;
      slide = (u_in - p).norm();
    }
    if (region.label == ModeLabel::Static && region.status == ClassifyStatus::Ok) p = u;
    out.point = p;
    out.slide_excess = slide;
    out.pivot_excess = pivot_part(region.label) != ModeLabel::Static ? std::abs(s) : 0.0;
    out.distance = (u - out.point).norm();
    return out;
  }

  if (region.status == ClassifyStatus::Separation) {
    out.point = Vec3::Zero();
    out.distance = u.norm();
    return out;
  }
  if (region.label == ModeLabel::Static) {
    out.point = u;
    return out;
  }
  if (!is_mixed(region.label)) {
    const int f = cone.face_of(region.label);
    const ConeFace& face = cone.faces[f];
    const Vec3& a = cone.edges[face.e0];
    const Vec3& b = cone.edges[face.e1];
    // Projection onto span(a, b) through the 2x2 Gram system.
    const double g00 = a.dot(a), g01 = a.dot(b), g11 = b.dot(b);
    const double r0 = a.dot(u), r1 = b.dot(u);
    const double det = g00 * g11 - g01 * g01;
    const double alpha = (g11 * r0 - g01 * r1) / det;
    const double beta = (g00 * r1 - g01 * r0) / det;
    out.point = alpha * a + beta * b;
    out.distance = (u - out.point).norm();
    if (is_slide(region.label)) {
      out.slide_excess = out.distance;
    } else {
      out.pivot_excess = out.distance;
    }
    return out;
  }

  // Edge region: residual splits over the two adjacent face normals.
  const int e = cone.edge_of(region.label);
  const Vec3& ev = cone.edges[e];
  out.point = std::max(0.0, u.dot(ev)) * ev;
  Vec3 r = u - out.point;
  out.distance = r.norm();
  const ConeFace& left = cone.faces[(e + 3) % 4];
  const ConeFace& right = cone.faces[e];
  const Vec3& n0 = left.outward_normal;
  const Vec3& n1 = right.outward_normal;
  const double g00 = n0.dot(n0), g01 = n0.dot(n1), g11 = n1.dot(n1);
  const double det = g00 * g11 - g01 * g01;
  double c0 = 0.0, c1 = 0.0;
  if (std::abs(det) > kTinyNorm) {
    c0 = (g11 * n0.dot(r) - g01 * n1.dot(r)) / det;
    c1 = (g00 * n1.dot(r) - g01 * n0.dot(r)) / det;
  }
  for (const auto& [face, coeff] : {std::pair{&left, c0}, std::pair{&right, c1}}) {
    if (is_slide(face->label)) {
      out.slide_excess = std::max(0.0, coeff);
    } else {
      out.pivot_excess = std::max(0.0, coeff);
    }
  }
  return out;
}

Vec3 coplanarity_normal(const Vec3& w_r_hat, const Vec3& w_l_hat) {
  Vec3 c = w_r_hat.cross(w_l_hat);
  double n = c.norm();
  if (n <= 1e-9) throw ParallelEdges("coplanarity_normal: edges are parallel");
  return c / n;
}

Vec3 transform_edge(const Vec3& w_hat, double delta_phi, const Vec3& m_hat) {
  if (std::abs(m_hat.z()) <= 1e-9)
    throw SingularPlane("transform_edge: plane normal has no moment component");
  const Vec2 f = rot2(delta_phi).transpose() * Vec2(w_hat.x(), w_hat.y());
  const double tau_s = -(m_hat.x() * f.x() + m_hat.y() * f.y()) / m_hat.z();
  Vec3 w(f.x(), f.y(), tau_s);
  const double n = w.norm();
  if (n <= kTinyNorm) throw SingularPlane("transform_edge: degenerate result");
  return w / n;
}

Vec3 coplanarity_residual(const Vec3& w_t, const Vec3& w_t_next, const Vec2& p,
                          double f_sq, double delta_phi, double char_length) {
  const Vec3 plane_dir(-p.y() / char_length, p.x() / char_length, -1.0);
  return w_t.cross(w_t_next) - std::sin(delta_phi) * f_sq * plane_dir;
}

}  // namespace pfc
