#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pfc/wrench.hpp"

namespace pfc {

/// Planar pose of the object frame in the base frame plus cuboid geometry.
struct BodyState {
  double x = 0.0;    // m
  double y = 0.0;    // m
  double phi = 0.0;  // rad
  Vec2 half_extents = Vec2(0.05, 0.025);  // m
  double mass = 0.1;                       // kg

  Vec2 position() const { return Vec2(x, y); }
  /// Base-frame position of a point given in the object frame.
  Vec2 to_base(const Vec2& p_w) const { return position() + rot2(phi) * p_w; }
  /// Diagonal of the cuboid, the default moment-scaling length.
  double diagonal() const { return 2.0 * half_extents.norm(); }
};

/// Contact surface: a line through `origin` at `slope` radians from
/// horizontal. The free side (where the object lives) is along the normal
/// rot2(slope) * (0, 1).
struct Surface {
  double slope = 0.0;  // rad, 0 horizontal .. pi/2 vertical
  Vec2 origin = Vec2::Zero();
  double mu = 0.5;

  Vec2 normal() const { return rot2(slope) * Vec2(0.0, 1.0); }
  Vec2 tangent() const { return rot2(slope) * Vec2(1.0, 0.0); }
  double height_of(const Vec2& point_b) const { return (point_b - origin).dot(normal()); }
};

struct SimConfig {
  double dt = 0.01;                 // s
  double motion_thresh_pos = 1e-4;  // m
  double motion_thresh_ang = 1e-3;  // rad
  double max_force = 10.0;          // N, command force cap
  double speed_gain = 0.1;          // (m/s) per N of excess outside the cone
  double snap_tol = 2e-5;           // m, contact acquisition band
  double gravity = 9.81;            // m/s^2
  double stiction_multiplier = 1.0; // >1 requires extra excess to break static contact
  double char_length = 0.0;         // moment scale; 0 means the body diagonal
  std::uint64_t seed = 0;           // recorded in logs for provenance

  void validate() const;
};

struct StepResult {
  BodyState state;
  Wrench reaction;        // measured reaction wrench in the object frame
  ModeLabel mode = ModeLabel::Static;
  int contact_count = 0;
  bool contact_lost = false;   // contact count dropped during this step
  bool force_capped = false;   // command force part was clamped
  bool separation = false;     // action pulls the object off all contacts
  double excess = 0.0;         // scaled-space distance of -w_total outside the cone
};

/// Contact set of the body against the surface: corners within snap_tol of
/// the line, at most two, ordered by tangential coordinate. Throws
/// Penetration when a corner sits below the surface by more than snap_tol.
std::vector<ContactPoint> detect_contacts(const BodyState& body, const Surface& surface,
                                          double snap_tol);

/// Gravity wrench in the object frame; zero moment since the frame sits at
/// the center of mass.
Wrench gravity_wrench(const BodyState& body, double gravity);

/// True when pose `b` differs from `a` beyond the motion thresholds
/// (strict inequalities).
bool has_moved(const BodyState& a, const BodyState& b, const SimConfig& cfg);
/// Window form: compares the first and last states.
bool has_moved(std::span<const BodyState> history, const SimConfig& cfg);

/// One CSV row per simulation step. Control columns stay empty for plain
/// simulator logs.
struct TrajectoryRow {
  double t = 0.0;
  double x = 0.0, y = 0.0, phi = 0.0;
  std::string mode;
  double fx = 0.0, fy = 0.0, tau = 0.0;  // measured reaction
  int contact_count = 0;
  // Contact positions in the base frame; NaN when the slot is empty.
  double c0x = 0.0, c0y = 0.0, c1x = 0.0, c1y = 0.0;
  // Controller columns (see control module).
  std::optional<double> error;
  std::optional<double> magnitude;
  std::optional<std::string> target_mode;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  bool with_control_columns = false;

  static const char* header(bool with_control_columns);
  void write_csv(std::ostream& os) const;
  void write_csv_file(const std::string& path) const;
};

/// Quasi-static planar contact simulator. Applies commanded wrenches plus
/// gravity, resolves the contact mode against the analytically known cone,
/// advances the pose along the mode's twist at a rate proportional to how
/// far -w_total sits outside the cone, and reports the measured reaction.
class Simulator {
 public:
  Simulator(BodyState initial, Surface surface, SimConfig cfg);

  const BodyState& state() const { return state_; }
  const Surface& surface() const { return surface_; }
  const SimConfig& config() const { return cfg_; }
  double time() const { return time_; }
  double char_length() const { return char_length_; }

  /// Advance one step under command w_cmd (object frame). The command force
  /// is clamped to max_force and flagged when it exceeds it.
  StepResult apply_command(const Wrench& w_cmd);

  Wrench gravity() const { return gravity_wrench(state_, cfg_.gravity); }
  std::vector<ContactPoint> contacts() const {
    return detect_contacts(state_, surface_, cfg_.snap_tol);
  }
  /// Ground-truth cone at the current pose; evaluation and oracle use.
  PolyhedralCone ground_truth_cone() const;

  int last_contact_count() const { return last_contact_count_; }
  void reset(const BodyState& state);

  TrajectoryLog& log() { return log_; }
  const TrajectoryLog& log() const { return log_; }
  void set_logging(bool on) { logging_ = on; }

 private:
  BodyState state_;
  Surface surface_;
  SimConfig cfg_;
  double char_length_;
  double time_ = 0.0;
  int last_contact_count_ = 0;
  bool last_step_moved_ = false;
  bool logging_ = false;
  TrajectoryLog log_;
};

/// Rest pose on the surface: bottom side flush, center offset along the
/// tangent by `tangent_offset`.
BodyState resting_pose(const Vec2& half_extents, double mass, const Surface& surface,
                       double tangent_offset = 0.0);

}  // namespace pfc
