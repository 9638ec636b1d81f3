#pragma once

#include <string>
#include <vector>

#include "pdlab/env.hpp"

namespace pdlab {

// One plotted curve: mean line plus optional shaded +/-1 std band (same
// length as mean; empty = no band).
struct CurveSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> mean;
  std::vector<double> std_band;
};

// Hand-rolled SVG: axes with ticks, one polyline per series, shaded band
// polygons, legend. Returns the full <svg> document.
std::string render_curves_svg(const std::vector<CurveSeries>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label);

struct TrajectorySketch {
  std::string label;
  std::vector<Eigen::Vector2d> points;  // task-frame positions
};

// Top-down sketch of the task geometry (wall, gate/slot, goal, start region)
// with rollout paths overlaid.
std::string render_trajectories_svg(const EnvSpec& spec,
                                    const std::vector<TrajectorySketch>& paths,
                                    const std::string& title);

void save_text_file(const std::string& text, const std::string& path);

}  // namespace pdlab
