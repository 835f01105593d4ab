#include "pfc/control.hpp"

#include <algorithm>
#include <cmath>

namespace pfc {

Vec3 desired_reaction(const PolyhedralCone& cone, ModeLabel mode) {
  if (mode == ModeLabel::Static) throw UnknownMode("desired_reaction: no target for static");
  if (!cone.labelled) throw UnknownMode("desired_reaction: cone has no labels");
  if (is_mixed(mode)) {
    const int e = cone.edge_of(mode);
    if (e < 0) throw UnknownMode("desired_reaction: cone has no edge " + to_string(mode));
    return cone.edges[e];
  }
  const int f = cone.face_of(mode);
  if (f < 0) throw UnknownMode("desired_reaction: cone has no face " + to_string(mode));
  return (cone.edges[cone.faces[f].e0] + cone.edges[cone.faces[f].e1]).normalized();
}

Vec3 command_wrench(const PolyhedralCone& cone, ModeLabel mode, double a, const Gains& gains) {
  const Vec3 w_des = desired_reaction(cone, mode);
  Vec3 w_n;
  if (is_mixed(mode)) {
    const int e = cone.edge_of(mode);
    const int n_faces = static_cast<int>(cone.faces.size());
    const Vec3& n0 = cone.faces[(e + n_faces - 1) % n_faces].outward_normal;
    const Vec3& n1 = cone.faces[e].outward_normal;
    const double s = gains.a1 + gains.a2;
    w_n = a * (gains.a1 * n0 + gains.a2 * n1) / (s > 0.0 ? s : 1.0);
  } else {
    w_n = a * cone.faces[cone.face_of(mode)].outward_normal;
  }
  return -(w_n + gains.beta * w_des);
}

double pd_magnitude(double error, double error_rate, const Gains& gains) {
  return std::max(0.0, gains.kp * error + gains.kd * error_rate);
}

namespace {

struct SlideGeometry {
  Vec3 w_des;
  Vec3 n_dir;  // pushed direction in the wrench space
};

// Two-contact slides push on the slide face; on a single contact the face
// collapses onto the edge it shares with the resting pivot face, and the
// push direction is the in-plane normal to that edge.
SlideGeometry slide_geometry(const PolyhedralCone& cone, ModeLabel dir, ModeLabel resting) {
  SlideGeometry g;
  if (resting == ModeLabel::Static) {
    const int f = cone.face_of(dir);
    if (f < 0) throw UnknownMode("run_task: cone has no face " + to_string(dir));
    g.w_des = desired_reaction(cone, dir);
    g.n_dir = cone.faces[f].outward_normal;
    return g;
  }
  const int fp = cone.face_of(resting);
  const int fs = cone.face_of(dir);
  if (fp < 0 || fs < 0) throw UnknownMode("run_task: cone lacks required faces");
  const ConeFace& pivot_face = cone.faces[fp];
  int shared = -1, other = -1;
  for (int e : {pivot_face.e0, pivot_face.e1}) {
    const ConeFace& slide_face = cone.faces[fs];
    if (e == slide_face.e0 || e == slide_face.e1) {
      shared = e;
    } else {
      other = e;
    }
  }
  if (shared < 0 || other < 0)
    throw UnknownMode("run_task: slide and resting faces do not share an edge");
  const Vec3 m_hat = coplanarity_normal(cone.edges[pivot_face.e0], cone.edges[pivot_face.e1]);
  Vec3 n = m_hat.cross(cone.edges[shared]).normalized();
  if (n.dot(cone.edges[other]) > 0.0) n = -n;  // outward, away from the sector
  g.w_des = cone.edges[shared];
  g.n_dir = n;
  return g;
}

}  // namespace

TaskResult run_task(Simulator& system, const PolyhedralCone& cone_in, const TaskSpec& task,
                    const Gains& gains) {
  TaskResult res;
  res.cone = cone_in;
  if (!cone_in.labelled) throw UnknownMode("run_task: cone has no labels");
  if (task.tolerance <= 0.0) throw ConfigError("run_task: tolerance must be positive");

  const double L = system.char_length();
  const double dt = system.config().dt;
  const bool pivot_task = task.kind == TaskSpec::Kind::Pivot;
  const Vec2 t_b = system.surface().tangent();
  const BodyState start = system.state();

  ModeLabel mode;
  Vec3 m_hat0 = Vec3::Zero();
  SlideGeometry slide_geo;
  ModeLabel resting = ModeLabel::Static;
  if (pivot_task) {
    mode = task.target < 0.0 ? ModeLabel::PivotCw : ModeLabel::PivotCcw;
    const int f = res.cone.face_of(mode);
    if (f < 0) throw UnknownMode("run_task: cone has no face " + to_string(mode));
    m_hat0 = coplanarity_normal(res.cone.edges[res.cone.faces[f].e0],
                                res.cone.edges[res.cone.faces[f].e1]);
  } else {
    mode = task.target > 0.0 ? ModeLabel::SlideRight : ModeLabel::SlideLeft;
    if (system.last_contact_count() == 1) {
      resting = task.resting_face;
      if (!is_pivot(resting))
        throw ConfigError("run_task: slide on a single contact needs resting_face");
    }
    slide_geo = slide_geometry(res.cone, mode, resting);
  }

  const double phi_target = start.phi + (pivot_task ? task.target : 0.0);
  const double s_target = pivot_task ? 0.0 : task.target;

  auto error_now = [&](const BodyState& st) {
    if (pivot_task)
      return mode == ModeLabel::PivotCw ? st.phi - phi_target : phi_target - st.phi;
    const double s = (st.position() - start.position()).dot(t_b);
    return mode == ModeLabel::SlideRight ? s_target - s : s - s_target;
  };

  double e_prev = error_now(system.state());
  double ang_prev = 0.0;
  res.final_error = e_prev;
  int hold = 0;
  const int expected_contacts = system.last_contact_count();

  // With an imperfect cone the push can balance against the true surface
  // short of the target; ratchet the magnitude whenever the pose stops
  // moving outside the tolerance, like the exploration ramp does.
  double boost = 1.0;
  int still_steps = 0;
  BodyState last_pose = system.state();

  for (int step = 0; step < task.timeout_steps; ++step) {
    const double e = error_now(system.state());
    const double e_dot = step == 0 ? 0.0 : (e - e_prev) / dt;
    e_prev = e;
    Gains g = gains;
    g.beta = gains.beta_at(step);
    const double a = pd_magnitude(e, e_dot, g) * boost;

    Vec3 w_a;
    if (pivot_task) {
      w_a = command_wrench(res.cone, mode, a, g);
    } else {
      w_a = -(a * slide_geo.n_dir + g.beta * slide_geo.w_des);
      if (resting != ModeLabel::Static) {
        // Hold the orientation on the corner: with an imperfect cone the
        // slide command has a real off-plane component that slowly rotates
        // the object, so close the loop on the angle as well.
        const double e_ang = system.state().phi - start.phi;
        const double e_ang_rate = step == 0 ? 0.0 : (e_ang - ang_prev) / dt;
        const double hold = gains.kp * (-e_ang) + gains.kd * (-e_ang_rate);
        const double rot_sign = resting == ModeLabel::PivotCw ? -1.0 : 1.0;
        const int fr = res.cone.face_of(resting);
        w_a -= rot_sign * hold * res.cone.faces[fr].outward_normal;
        ang_prev = e_ang;
      }
    }
    const double phi_before = system.state().phi;
    const size_t rows_before = system.log().rows.size();
    const Wrench cmd = Wrench::from_scaled(w_a, L) - system.gravity();
    StepResult r = system.apply_command(cmd);
    ++res.steps;

    if (system.log().rows.size() > rows_before) {
      system.log().with_control_columns = true;
      TrajectoryRow& row = system.log().rows.back();
      row.error = e;
      row.magnitude = a;
      row.target_mode = to_string(mode);
    }

    if (r.separation || r.contact_count == 0) {
      res.status = TaskStatus::ContactLost;
      res.message = "contact lost during " + to_string(mode);
      break;
    }
    if (!pivot_task && r.contact_count < expected_contacts) {
      res.status = TaskStatus::ContactLost;
      res.message = "contact configuration changed during slide";
      break;
    }

    if (pivot_task) {
      const double dphi = r.state.phi - phi_before;
      if (dphi != 0.0) res.cone = transform_cone(res.cone, dphi, mode, m_hat0);
    }

    if (!has_moved(last_pose, r.state, system.config())) {
      if (++still_steps >= 25 && std::abs(e) > task.tolerance) {
        boost = std::min(boost * 1.5, 256.0);
        still_steps = 0;
        last_pose = r.state;
      }
    } else {
      still_steps = 0;
      last_pose = r.state;
    }

    const double err_abs = pivot_task
                               ? std::abs(r.state.phi - phi_target)
                               : std::abs((r.state.position() - start.position()).dot(t_b) -
                                          s_target);
    if (err_abs <= task.tolerance) {
      if (++hold >= task.hold_steps) {
        res.status = TaskStatus::Success;
        res.final_state = r.state;
        res.final_error = err_abs;
        res.duration = res.steps * dt;
        return res;
      }
    } else {
      hold = 0;
    }
  }

  if (res.status == TaskStatus::Success) res.status = TaskStatus::Timeout;
  if (res.message.empty()) res.message = "task did not settle within the step budget";
  res.final_state = system.state();
  res.final_error = std::abs(error_now(res.final_state));
  res.duration = res.steps * dt;
  return res;
}

}  // namespace pfc
