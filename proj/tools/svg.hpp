#pragma once

#include <string>
#include <vector>

#include "harness.hpp"

namespace pfc::harness {

/// Box plot of the metric per (length, mu, slope) group from a metric CSV
/// (columns length,mu,slope_deg,rep,seed,v). Self-contained SVG.
std::string box_plot_svg(const CsvTable& metric);

/// Angle and contact-position trajectories against normalized time. Phases
/// are split on target-mode changes and each phase rescaled to unit width;
/// individual trials in grey, their resampled mean in red.
std::string trajectory_plot_svg(const std::vector<CsvTable>& trajectories);

}  // namespace pfc::harness
