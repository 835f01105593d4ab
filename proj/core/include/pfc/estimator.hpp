#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pfc/rng.hpp"
#include "pfc/sim.hpp"
#include "pfc/wrench.hpp"

namespace pfc {

// Estimation of the polyhedral friction cone from reaction-wrench samples
// only: no geometry, contact locations or friction coefficients enter the
// algorithm. Samples are gathered by probing the system with commanded
// wrenches until motion is detected; the conic hull of the samples is the
// estimate.

struct EstimatorConfig {
  int n_init = 8;                 // initial static samples
  double sigma = 0.5;             // N, Gaussian perturbation of init commands
  double press_force = 2.0;       // N, holds the object against the surface
  double gamma0_rel = 0.1;        // first gamma as a fraction of the edge midpoint norm
  double gamma_growth = 2.0;      // geometric schedule
  int max_gamma_levels = 24;
  int max_probes = 400;           // hard bound on exploration probes
  int max_init_attempts = 200;
  double eps_simplify_deg = 2.0;  // edge dedup / coplanar-drop tolerance
  double explored_dedup_deg = 3.0;
  double jump_thresh = 0.2;       // relative reaction jump marking contact loss
  double beta_label = 2.0;        // N, in-cone bias during labelling probes
  double label_gain = 1.0;        // out-of-plane magnitude per unit base area
  int label_max_steps = 200;      // steps per labelling magnitude before ramping
  int restore_max_steps = 2000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Working state of the estimation: sample set, current edge estimate, base
/// plane and base polygon.
struct EstimateState {
  std::vector<Vec3> samples;        // W, scaled wrench points kept by the hull
  std::vector<Vec3> edges;          // P_bar, unit directions of the samples
  Plane base_plane;                 // pi
  std::vector<Vec3> polygon;        // V, edge/plane intersections in angular order
  std::vector<std::pair<int, int>> polygon_edges;  // E, consecutive index pairs
  std::vector<int> polygon_edge_source;            // estimate edge index per vertex
  std::vector<Vec3> explored_dirs;  // outward normals already probed
  bool planar = false;              // degenerate (flat) sample set
};

/// Conic-hull update: returns the samples kept after adding w_new. When the
/// hull does not change the input is returned untouched. Degenerate (flat)
/// sets fall back to the extreme rays of the planar fan.
std::vector<Vec3> update_estimate(const std::vector<Vec3>& samples, const Vec3& w_new,
                                  double eps_simplify_deg, bool* planar = nullptr);

/// Cross-section polygon of the estimated cone on a base plane: one vertex
/// per edge direction, connected in angular order. Directions nearly
/// orthogonal to the plane normal are dropped with a warning. Two surviving
/// directions give the degenerate two-vertex polygon with both edge
/// orientations.
struct BasePolygon {
  std::vector<Vec3> vertices;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> source;  // estimate edge index per vertex
  std::vector<std::string> warnings;
};
BasePolygon base_polygon(const std::vector<Vec3>& edge_dirs, const Plane& plane);

struct ExploreStats {
  int probes = 0;
  int samples_recorded = 0;
  int edges_explored = 0;
  int stalled = 0;  // probes abandoned at the force cap
  std::vector<std::string> warnings;
};

struct LabelReport {
  PolyhedralCone cone;
  ExploreStats stats;
};

class EstimationSession {
 public:
  EstimationSession(Simulator& system, EstimatorConfig cfg);

  /// Hook called for every accepted sample (raw wrench, pose at record time).
  std::function<void(const Wrench&, const BodyState&)> on_sample;

  /// Gather the initial static samples and build the first estimate.
  /// Throws InitFailure when no static sample can be obtained.
  void initialize();

  /// Exploration loop: probe the longest unexplored base-polygon edge with
  /// an outward-pushed wrench until motion, fold the measured reaction into
  /// the estimate, stop when every edge direction is explored.
  ExploreStats explore();

  /// Reduce the estimate to the 4 edges maximizing the base-polygon area.
  /// Throws TooFewEdges below 4 edges.
  PolyhedralCone finalize() const;

  /// Probe each face of a finalized cone and attach mode labels: contact
  /// loss marks a pivot face, otherwise a slide face; velocity signs pick
  /// the direction. The pose is restored between probes.
  LabelReport label_faces(PolyhedralCone cone);

  const EstimateState& state() const { return st_; }
  const Simulator& system() const { return *sys_; }

  /// Replace the sample set wholesale (scaled wrench points) and rebuild the
  /// estimate; estimation tooling and tests.
  void seed_estimate(const std::vector<Vec3>& samples);

 private:
  void rebuild_polygon();
  void settle();
  Wrench hold_command() const;
  Wrench command_for_total(const Wrench& w_total_desired) const;

  Simulator* sys_;
  EstimatorConfig cfg_;
  Rng rng_;
  EstimateState st_;
  std::vector<std::string> warnings_;
  bool initialized_ = false;
};

/// Select the 4 edge indices whose base polygon on `plane` has maximal
/// area; exhaustive up to 12 edges, greedy removal beyond.
std::vector<int> select_max_area_quadruple(const std::vector<Vec3>& edges, const Plane& plane);

/// Pivot-face transformation after a rotation by delta_phi: both edges of
/// the face labelled `pivot` move via transform_edge against m_hat, the
/// plane normal captured at motion start. Face normals are refreshed.
PolyhedralCone transform_cone(const PolyhedralCone& cone, double delta_phi, ModeLabel pivot,
                              const Vec3& m_hat);

}  // namespace pfc
