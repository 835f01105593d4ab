#pragma once

#include <string>
#include <vector>

#include "pfc/estimator.hpp"
#include "pfc/sim.hpp"
#include "pfc/wrench.hpp"

namespace pfc {

// Contact-mode controller: action wrenches point opposite a desired reaction
// inside the target face plus an out-of-plane component along the face
// normal whose magnitude sets the motion rate. A PD law on the task error
// drives that magnitude.

struct Gains {
  double kp = 2.5;
  double kd = 0.79;
  double beta = 10.0;        // N, magnitude of the desired in-cone reaction
  double beta_final = -1.0;  // optional linear ramp target, <0 keeps beta constant
  int beta_ramp_steps = 0;
  double a1 = 1.0, a2 = 1.0;  // mixed-mode split weights, normalized internally

  double beta_at(int step) const {
    if (beta_final < 0.0 || beta_ramp_steps <= 0 || step >= beta_ramp_steps) {
      return beta_final < 0.0 ? beta : beta_final;
    }
    const double s = static_cast<double>(step) / beta_ramp_steps;
    return beta + s * (beta_final - beta);
  }
};

struct TaskSpec {
  enum class Kind { Pivot, Slide };
  Kind kind = Kind::Pivot;
  double target = 0.0;     // rad (pivot, signed) or m (slide, signed along tangent)
  double tolerance = 0.0;  // rad or m
  int hold_steps = 20;     // consecutive in-tolerance steps before success
  int timeout_steps = 20000;
  // For slides on a single corner: the pivot face the object rests on,
  // known from the task sequence (cw after a clockwise pivot).
  ModeLabel resting_face = ModeLabel::Static;
};

/// Desired reaction direction for a mode: main modes take the normalized
/// mean of the target face's edges, mixed modes the shared edge.
/// Throws UnknownMode for Static or a label the cone does not carry.
Vec3 desired_reaction(const PolyhedralCone& cone, ModeLabel mode);

/// Eq-style action wrench w_a = -(w_n + beta * w_des_hat), scaled
/// coordinates; main modes use w_n = a * n_face, mixed modes split over the
/// two adjacent face normals with weights a1:a2.
Vec3 command_wrench(const PolyhedralCone& cone, ModeLabel mode, double a, const Gains& gains);

/// PD magnitude, floored at zero so the command never pushes through the
/// opposite face.
double pd_magnitude(double error, double error_rate, const Gains& gains);

enum class TaskStatus { Success, Timeout, ContactLost };

struct TaskResult {
  TaskStatus status = TaskStatus::Success;
  int steps = 0;
  double duration = 0.0;   // s
  double final_error = 0.0;
  BodyState final_state;
  PolyhedralCone cone;     // transformed cone after the task
  std::string message;
};

/// Run one pivot or slide task with the given labelled cone. Pivot tasks
/// transform the pivot-face edges online with the measured rotation; slide
/// tasks leave the cone untouched. The trajectory is appended to the
/// simulator log with control columns when logging is enabled.
TaskResult run_task(Simulator& system, const PolyhedralCone& cone, const TaskSpec& task,
                    const Gains& gains);

}  // namespace pfc
