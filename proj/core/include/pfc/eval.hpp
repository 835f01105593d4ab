#pragma once

#include <vector>

#include "pfc/wrench.hpp"

namespace pfc {

struct MetricConfig {
  double truncation_height = 1.0;  // along the ground-truth axis, scaled units
  // Nonzero: truncation direction to use instead of the ground-truth axis.
  // The overlap score is symmetric in its arguments once the plane is fixed.
  Vec3 axis_override = Vec3::Zero();
};

/// Error raised when a cone edge has no positive component along the
/// truncation axis.
struct EdgeBehindPlane : Error {
  using Error::Error;
};

/// Finite pyramid cut from an infinite cone: apex at the origin, base on the
/// plane axis . x = height.
ConvexPolytope truncate_cone(const PolyhedralCone& cone, const Vec3& axis, double height);

/// Volume-overlap score v = V(A ∩ B) / V(A ∪ B) between the truncated
/// estimate and ground-truth cones, both cut on the plane normal to the
/// ground-truth axis. 1 for a perfect match, 0 for disjoint cones.
double metric_v(const PolyhedralCone& estimate, const PolyhedralCone& ground_truth,
                const MetricConfig& cfg = {});

struct Summary {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  int count = 0;
};

/// Five-number summary with linearly interpolated quartiles.
Summary summarize(std::vector<double> values);

}  // namespace pfc
