#include "pfc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace pfc {

void SimConfig::validate() const {
  if (dt <= 0.0) throw ConfigError("SimConfig: dt must be positive");
  if (motion_thresh_pos <= 0.0 || motion_thresh_ang <= 0.0)
    throw ConfigError("SimConfig: motion thresholds must be positive");
  if (max_force <= 0.0) throw ConfigError("SimConfig: max_force must be positive");
  if (speed_gain <= 0.0) throw ConfigError("SimConfig: speed_gain must be positive");
  if (snap_tol <= 0.0) throw ConfigError("SimConfig: snap_tol must be positive");
  if (gravity <= 0.0) throw ConfigError("SimConfig: gravity must be positive");
  if (stiction_multiplier < 1.0)
    throw ConfigError("SimConfig: stiction_multiplier must be >= 1");
}

std::vector<ContactPoint> detect_contacts(const BodyState& body, const Surface& surface,
                                          double snap_tol) {
  const Vec2 h = body.half_extents;
  const Vec2 corners[4] = {Vec2(-h.x(), -h.y()), Vec2(h.x(), -h.y()), Vec2(h.x(), h.y()),
                           Vec2(-h.x(), h.y())};
  struct Hit {
    Vec2 corner_w;
    double height;
    double tangent_coord;
  };
  std::vector<Hit> hits;
  for (const Vec2& c : corners) {
    Vec2 world = body.to_base(c);
    double height = surface.height_of(world);
    if (height < -snap_tol)
      throw Penetration("corner below surface by " + std::to_string(-height) + " m");
    if (height <= snap_tol)
      hits.push_back({c, height, (world - surface.origin).dot(surface.tangent())});
  }
  if (hits.size() > 2) {
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.height < b.height; });
    hits.resize(2);
  }
  std::sort(hits.begin(), hits.end(),
            [](const Hit& a, const Hit& b) { return a.tangent_coord < b.tangent_coord; });
  std::vector<ContactPoint> out;
  for (const Hit& hit : hits)
    out.push_back(ContactPoint{hit.corner_w, surface.normal(), surface.mu});
  return out;
}

Wrench gravity_wrench(const BodyState& body, double gravity) {
  Vec2 f = force_to_wrench_frame(Vec2(0.0, -body.mass * gravity), body.phi);
  return Wrench{f.x(), f.y(), 0.0};
}

bool has_moved(const BodyState& a, const BodyState& b, const SimConfig& cfg) {
  double dp = (b.position() - a.position()).norm();
  double da = std::abs(b.phi - a.phi);
  return dp > cfg.motion_thresh_pos || da > cfg.motion_thresh_ang;
}

bool has_moved(std::span<const BodyState> history, const SimConfig& cfg) {
  if (history.size() < 2) throw ConfigError("has_moved: need at least 2 states");
  return has_moved(history.front(), history.back(), cfg);
}

const char* TrajectoryLog::header(bool with_control) {
  return with_control
             ? "t,x,y,phi,mode,fx,fy,tau,contact_count,c0x,c0y,c1x,c1y,error,magnitude,target_mode"
             : "t,x,y,phi,mode,fx,fy,tau,contact_count,c0x,c0y,c1x,c1y";
}

namespace {
std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}
}  // namespace

void TrajectoryLog::write_csv(std::ostream& os) const {
  os << header(with_control_columns) << "\n";
  for (const TrajectoryRow& r : rows) {
    os << fmt_g(r.t) << ',' << fmt_g(r.x) << ',' << fmt_g(r.y) << ',' << fmt_g(r.phi) << ','
       << r.mode << ',' << fmt_g(r.fx) << ',' << fmt_g(r.fy) << ',' << fmt_g(r.tau) << ','
       << r.contact_count << ',' << fmt_g(r.c0x) << ',' << fmt_g(r.c0y) << ','
       << fmt_g(r.c1x) << ',' << fmt_g(r.c1y);
    if (with_control_columns) {
      os << ',' << (r.error ? fmt_g(*r.error) : "") << ','
         << (r.magnitude ? fmt_g(*r.magnitude) : "") << ','
         << (r.target_mode ? *r.target_mode : "");
    }
    os << "\n";
  }
}

void TrajectoryLog::write_csv_file(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open " + path + " for writing");
  write_csv(os);
}

Simulator::Simulator(BodyState initial, Surface surface, SimConfig cfg)
    : state_(initial), surface_(surface), cfg_(cfg) {
  cfg_.validate();
  char_length_ = cfg_.char_length > 0.0 ? cfg_.char_length : state_.diagonal();
  last_contact_count_ = static_cast<int>(contacts().size());
}

PolyhedralCone Simulator::ground_truth_cone() const {
  return analytical_cone(contacts(), state_.phi, char_length_);
}

void Simulator::reset(const BodyState& state) {
  state_ = state;
  time_ = 0.0;
  last_step_moved_ = false;
  last_contact_count_ = static_cast<int>(contacts().size());
  log_.rows.clear();
}

namespace {

double min_corner_height(const BodyState& body, const Surface& surface) {
  const Vec2 h = body.half_extents;
  const Vec2 corners[4] = {Vec2(-h.x(), -h.y()), Vec2(h.x(), -h.y()), Vec2(h.x(), h.y()),
                           Vec2(-h.x(), h.y())};
  double mn = std::numeric_limits<double>::infinity();
  for (const Vec2& c : corners) mn = std::min(mn, surface.height_of(body.to_base(c)));
  return mn;
}

}  // namespace

StepResult Simulator::apply_command(const Wrench& w_cmd_in) {
  StepResult res;
  Wrench w_cmd = w_cmd_in;
  const double f_norm = w_cmd.force().norm();
  if (f_norm > cfg_.max_force) {
    const double s = cfg_.max_force / f_norm;
    w_cmd.fx *= s;
    w_cmd.fy *= s;
    res.force_capped = true;
  }

  auto cts = contacts();  // throws Penetration on a bad incoming state
  const int prev_count = static_cast<int>(cts.size());
  const Wrench w_total = w_cmd + gravity();
  time_ += cfg_.dt;

  auto finish = [&](const BodyState& st) {
    res.state = st;
    if (logging_) {
      TrajectoryRow row;
      row.t = time_;
      row.x = st.x;
      row.y = st.y;
      row.phi = st.phi;
      row.mode = res.separation ? "separation" : to_string(res.mode);
      row.fx = res.reaction.fx;
      row.fy = res.reaction.fy;
      row.tau = res.reaction.tau;
      row.contact_count = res.contact_count;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.c0x = row.c0y = row.c1x = row.c1y = nan;
      auto now = detect_contacts(st, surface_, cfg_.snap_tol);
      if (!now.empty()) {
        Vec2 c0 = st.to_base(now[0].position_w);
        row.c0x = c0.x();
        row.c0y = c0.y();
      }
      if (now.size() > 1) {
        Vec2 c1 = st.to_base(now[1].position_w);
        row.c1x = c1.x();
        row.c1y = c1.y();
      }
      log_.rows.push_back(std::move(row));
    }
    return res;
  };

  if (cts.empty()) {
    res.separation = true;
    res.contact_count = 0;
    res.contact_lost = prev_count > 0;
    last_contact_count_ = 0;
    last_step_moved_ = false;
    return finish(state_);
  }

  const PolyhedralCone cone = analytical_cone(cts, state_.phi, char_length_);
  const ClassifyResult cls = classify_mode(cone, w_total);
  const Vec3 u = (-w_total).scaled(char_length_);
  const ConeProjection proj = project_onto_cone(cone, u, cls);

  if (cls.status == ClassifyStatus::Separation) {
    res.separation = true;
    res.contact_count = prev_count;
    res.mode = ModeLabel::Static;
    res.reaction = Wrench{};
    last_step_moved_ = false;
    last_contact_count_ = prev_count;
    return finish(state_);
  }

  bool is_static = cls.label == ModeLabel::Static;
  if (!is_static && !last_step_moved_ && cfg_.stiction_multiplier > 1.0) {
    const double breakaway = (cfg_.stiction_multiplier - 1.0) * proj.point.norm();
    if (proj.distance <= breakaway) is_static = true;
  }

  if (is_static) {
    res.mode = ModeLabel::Static;
    res.reaction = -w_total;
    res.contact_count = prev_count;
    res.excess = 0.0;
    last_step_moved_ = false;
    last_contact_count_ = prev_count;
    return finish(state_);  // pose unchanged bit-exact
  }

  res.mode = cls.label;
  res.excess = proj.distance;
  res.reaction = Wrench::from_scaled(proj.point, char_length_);

  // Mode twist: translation along the surface tangent and/or rotation about
  // the pivot contact, rates proportional to the respective excess.
  const ModeLabel slide = slide_part(cls.label);
  const ModeLabel pivot = pivot_part(cls.label);
  const double v_slide =
      slide == ModeLabel::Static
          ? 0.0
          : cfg_.speed_gain * proj.slide_excess * (slide == ModeLabel::SlideRight ? 1.0 : -1.0);
  const double omega =
      pivot == ModeLabel::Static
          ? 0.0
          : cfg_.speed_gain / char_length_ * proj.pivot_excess *
                (pivot == ModeLabel::PivotCcw ? 1.0 : -1.0);

  Vec2 pivot_point = Vec2::Zero();
  if (pivot != ModeLabel::Static) {
    const int f = cone.face_of(pivot);
    const int c = f >= 0 ? cone.faces[f].pivot_contact : 0;
    pivot_point = state_.to_base(cts[static_cast<size_t>(std::max(0, c))].position_w);
  }
  const Vec2 t_hat = surface_.tangent();

  auto advanced = [&](double fraction) {
    BodyState nb = state_;
    const double ds = v_slide * cfg_.dt * fraction;
    const double dphi = omega * cfg_.dt * fraction;
    if (pivot != ModeLabel::Static) {
      const Vec2 q = pivot_point + ds * t_hat;
      const Vec2 c = state_.position() + ds * t_hat;
      const Vec2 rotated = q + rot2(dphi) * (c - q);
      nb.x = rotated.x();
      nb.y = rotated.y();
      nb.phi = state_.phi + dphi;
    } else {
      nb.x = state_.x + ds * t_hat.x();
      nb.y = state_.y + ds * t_hat.y();
    }
    return nb;
  };

  BodyState next = advanced(1.0);
  if (min_corner_height(next, surface_) < -cfg_.snap_tol) {
    // Clip the step where the descending corner reaches the surface band.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (min_corner_height(advanced(mid), surface_) >= -cfg_.snap_tol) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    next = advanced(lo);
  }

  auto new_contacts = detect_contacts(next, surface_, cfg_.snap_tol);
  res.contact_count = static_cast<int>(new_contacts.size());
  res.contact_lost = res.contact_count < prev_count;
  last_contact_count_ = res.contact_count;
  last_step_moved_ = true;
  state_ = next;
  return finish(state_);
}

BodyState resting_pose(const Vec2& half_extents, double mass, const Surface& surface,
                       double tangent_offset) {
  BodyState b;
  b.half_extents = half_extents;
  b.mass = mass;
  b.phi = surface.slope;
  Vec2 center = surface.origin + half_extents.y() * surface.normal() +
                tangent_offset * surface.tangent();
  b.x = center.x();
  b.y = center.y();
  return b;
}

}  // namespace pfc
