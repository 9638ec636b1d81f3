#include "pdlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "pdlab/curve.hpp"

namespace pdlab {
namespace {

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#2e8b57", "#b07c1a",
                          "#6a4c93", "#127a87", "#8a3324", "#4f5d75"};
constexpr int kPaletteSize = 8;

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  // Plot coordinates: two decimals keep files small and stable.
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Frame {
  double width = 820, height = 500;
  double left = 70, right = 190, top = 44, bottom = 54;
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;

  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double px(double x) const {
    return left + (x - x_lo) / (x_hi - x_lo) * plot_w();
  }
  double py(double y) const {
    return top + (y_hi - y) / (y_hi - y_lo) * plot_h();
  }
};

// Round ticks: about n steps of 1/2/5 x 10^k covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int n) {
  if (hi <= lo) return {lo};
  const double raw = (hi - lo) / std::max(1, n);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  const double first = std::ceil(lo / step) * step;
  for (double t = first; t <= hi + 0.5 * step; t += step)
    ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return ticks;
}

std::string tick_label(double v) {
  if (v != 0.0 && std::abs(v) >= 10000.0 && std::fmod(v, 1000.0) == 0.0)
    return format_double(v / 1000.0) + "k";
  return format_double(v);
}

}  // namespace

std::string render_curves_svg(const std::vector<CurveSeries>& series,
                              const std::string& title,
                              const std::string& x_label,
                              const std::string& y_label) {
  require(!series.empty(), "render_curves_svg: no series");
  Frame f;
  bool first = true;
  for (const CurveSeries& s : series) {
    require(s.x.size() == s.mean.size(),
            "render_curves_svg: x/mean length mismatch in '" + s.label + "'");
    require(s.std_band.empty() || s.std_band.size() == s.mean.size(),
            "render_curves_svg: band length mismatch in '" + s.label + "'");
    for (size_t i = 0; i < s.x.size(); ++i) {
      const double b = s.std_band.empty() ? 0.0 : s.std_band[i];
      if (first) {
        f.x_lo = f.x_hi = s.x[i];
        f.y_lo = s.mean[i] - b;
        f.y_hi = s.mean[i] + b;
        first = false;
      }
      f.x_lo = std::min(f.x_lo, s.x[i]);
      f.x_hi = std::max(f.x_hi, s.x[i]);
      f.y_lo = std::min(f.y_lo, s.mean[i] - b);
      f.y_hi = std::max(f.y_hi, s.mean[i] + b);
    }
  }
  require(!first, "render_curves_svg: series contain no points");
  if (f.x_hi == f.x_lo) f.x_hi = f.x_lo + 1.0;
  // Success-rate-looking data gets the natural [0, 1] frame.
  if (f.y_lo >= 0.0 && f.y_hi <= 1.0) {
    f.y_lo = 0.0;
    f.y_hi = 1.0;
  } else {
    const double pad = 0.05 * (f.y_hi - f.y_lo + 1e-12);
    f.y_lo -= pad;
    f.y_hi += pad;
  }

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(f.width) + "\" height=\"" + num(f.height) + "\" viewBox=\"0 0 " +
         num(f.width) + " " + num(f.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(f.left + f.plot_w() / 2) + "\" y=\"24\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         xml_escape(title) + "</text>\n";

  // Axes and ticks.
  svg += "<g stroke=\"#333\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" +
         num(f.left) + "\" y2=\"" + num(f.top + f.plot_h()) + "\"/>\n";
  svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top + f.plot_h()) +
         "\" x2=\"" + num(f.left + f.plot_w()) + "\" y2=\"" +
         num(f.top + f.plot_h()) + "\"/>\n";
  svg += "</g>\n";
  svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (double t : nice_ticks(f.x_lo, f.x_hi, 6)) {
    const double x = f.px(t);
    svg += "<line x1=\"" + num(x) + "\" y1=\"" + num(f.top + f.plot_h()) +
           "\" x2=\"" + num(x) + "\" y2=\"" + num(f.top + f.plot_h() + 4) +
           "\" stroke=\"#333\"/>\n";
    svg += "<text x=\"" + num(x) + "\" y=\"" + num(f.top + f.plot_h() + 16) +
           "\" text-anchor=\"middle\">" + xml_escape(tick_label(t)) +
           "</text>\n";
  }
  for (double t : nice_ticks(f.y_lo, f.y_hi, 5)) {
    const double y = f.py(t);
    svg += "<line x1=\"" + num(f.left - 4) + "\" y1=\"" + num(y) +
           "\" x2=\"" + num(f.left) + "\" y2=\"" + num(y) +
           "\" stroke=\"#333\"/>\n";
    svg += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(y) + "\" x2=\"" +
           num(f.left + f.plot_w()) + "\" y2=\"" + num(y) +
           "\" stroke=\"#eee\"/>\n";
    svg += "<text x=\"" + num(f.left - 8) + "\" y=\"" + num(y + 4) +
           "\" text-anchor=\"end\">" + xml_escape(tick_label(t)) +
           "</text>\n";
  }
  svg += "</g>\n";
  svg += "<text x=\"" + num(f.left + f.plot_w() / 2) + "\" y=\"" +
         num(f.height - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">" + xml_escape(x_label) + "</text>\n";
  svg += "<text x=\"18\" y=\"" + num(f.top + f.plot_h() / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\" transform=\"rotate(-90 18 " +
         num(f.top + f.plot_h() / 2) + ")\">" + xml_escape(y_label) +
         "</text>\n";

  // Bands first so every mean line stays visible.
  for (size_t si = 0; si < series.size(); ++si) {
    const CurveSeries& s = series[si];
    if (s.std_band.empty() || s.x.empty()) continue;
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    for (size_t i = 0; i < s.x.size(); ++i)
      pts += num(f.px(s.x[i])) + "," + num(f.py(s.mean[i] + s.std_band[i])) +
             " ";
    for (size_t i = s.x.size(); i-- > 0;)
      pts += num(f.px(s.x[i])) + "," + num(f.py(s.mean[i] - s.std_band[i])) +
             " ";
    svg += "<polygon points=\"" + pts + "\" fill=\"" + color +
           "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
  }
  for (size_t si = 0; si < series.size(); ++si) {
    const CurveSeries& s = series[si];
    if (s.x.empty()) continue;
    const char* color = kPalette[si % kPaletteSize];
    std::string pts;
    for (size_t i = 0; i < s.x.size(); ++i)
      pts += num(f.px(s.x[i])) + "," + num(f.py(s.mean[i])) + " ";
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.8\"/>\n";
  }

  // Legend.
  const double lx = f.left + f.plot_w() + 16;
  double ly = f.top + 8;
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
  for (size_t si = 0; si < series.size(); ++si) {
    const char* color = kPalette[si % kPaletteSize];
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(lx + 22) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly + 4) + "\">" +
           xml_escape(series[si].label) + "</text>\n";
    ly += 18;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

std::string render_trajectories_svg(const EnvSpec& spec,
                                    const std::vector<TrajectorySketch>& paths,
                                    const std::string& title) {
  // Task frame: point_gate lives in [0,1]^2; the arm's reach fits [-1,1]^2.
  const bool arm = spec.name == EnvName::reacher_insert;
  const double lo = arm ? -1.0 : 0.0;
  const double hi = 1.0;
  Frame f;
  f.width = 640;
  f.height = 560;
  f.right = 170;
  f.x_lo = f.y_lo = lo;
  f.x_hi = f.y_hi = hi;
  // Square plot area so the geometry is not distorted.
  f.bottom = f.height - f.top - f.plot_w();

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         num(f.width) + "\" height=\"" + num(f.height) + "\" viewBox=\"0 0 " +
         num(f.width) + " " + num(f.height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(f.left + f.plot_w() / 2) + "\" y=\"24\" "
         "text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         xml_escape(title) + "</text>\n";
  svg += "<rect x=\"" + num(f.px(lo)) + "\" y=\"" + num(f.py(hi)) +
         "\" width=\"" + num(f.plot_w()) + "\" height=\"" + num(f.plot_w()) +
         "\" fill=\"none\" stroke=\"#999\"/>\n";

  if (!arm) {
    const PointGateGeometry& g = spec.gate_geom;
    const double gw = spec.gate_half_width;
    // Wall with the gate gap.
    svg += "<line x1=\"" + num(f.px(g.wall_x)) + "\" y1=\"" + num(f.py(0.0)) +
           "\" x2=\"" + num(f.px(g.wall_x)) + "\" y2=\"" +
           num(f.py(g.gate_y - gw)) +
           "\" stroke=\"#444\" stroke-width=\"4\"/>\n";
    svg += "<line x1=\"" + num(f.px(g.wall_x)) + "\" y1=\"" +
           num(f.py(g.gate_y + gw)) + "\" x2=\"" + num(f.px(g.wall_x)) +
           "\" y2=\"" + num(f.py(1.0)) +
           "\" stroke=\"#444\" stroke-width=\"4\"/>\n";
    // Start region.
    svg += "<rect x=\"" + num(f.px(g.start_x_lo)) + "\" y=\"" +
           num(f.py(g.start_y_hi)) + "\" width=\"" +
           num(f.px(g.start_x_hi) - f.px(g.start_x_lo)) + "\" height=\"" +
           num(f.py(g.start_y_lo) - f.py(g.start_y_hi)) +
           "\" fill=\"#cfe3f5\" stroke=\"none\"/>\n";
    // Goal(s).
    std::vector<Eigen::Vector2d> goals = spec.goal_set;
    if (goals.empty()) goals.push_back(g.fixed_goal);
    for (const auto& goal : goals)
      svg += "<circle cx=\"" + num(f.px(goal.x())) + "\" cy=\"" +
             num(f.py(goal.y())) + "\" r=\"" +
             num(spec.success_radius / (hi - lo) * f.plot_w()) +
             "\" fill=\"#f2c94c\" stroke=\"#b07c1a\"/>\n";
  } else {
    const ReacherGeometry& g = spec.reacher_geom;
    // Wall band (randomized position: draw the extremes) and slot span.
    svg += "<rect x=\"" + num(f.px(g.wall_x_lo)) + "\" y=\"" + num(f.py(hi)) +
           "\" width=\"" + num(f.px(g.wall_x_hi) - f.px(g.wall_x_lo)) +
           "\" height=\"" + num(f.plot_w()) +
           "\" fill=\"#eee\" stroke=\"#bbb\"/>\n";
    svg += "<line x1=\"" + num(f.px(g.wall_x_lo)) + "\" y1=\"" +
           num(f.py(g.slot_y_lo)) + "\" x2=\"" + num(f.px(g.wall_x_lo)) +
           "\" y2=\"" + num(f.py(g.slot_y_hi)) +
           "\" stroke=\"#b07c1a\" stroke-width=\"2\" "
           "stroke-dasharray=\"4 3\"/>\n";
    // Arm base.
    svg += "<circle cx=\"" + num(f.px(0.0)) + "\" cy=\"" + num(f.py(0.0)) +
           "\" r=\"4\" fill=\"#444\"/>\n";
  }

  for (size_t pi = 0; pi < paths.size(); ++pi) {
    const TrajectorySketch& p = paths[pi];
    if (p.points.empty()) continue;
    const char* color = kPalette[pi % kPaletteSize];
    std::string pts;
    for (const auto& q : p.points)
      pts += num(f.px(q.x())) + "," + num(f.py(q.y())) + " ";
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"1.5\" stroke-opacity=\"0.85\"/>\n";
    svg += "<circle cx=\"" + num(f.px(p.points.front().x())) + "\" cy=\"" +
           num(f.py(p.points.front().y())) + "\" r=\"3\" fill=\"" + color +
           "\"/>\n";
  }

  const double lx = f.left + f.plot_w() + 14;
  double ly = f.top + 10;
  svg += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">\n";
  for (size_t pi = 0; pi < paths.size(); ++pi) {
    const char* color = kPalette[pi % kPaletteSize];
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" +
           num(lx + 22) + "\" y2=\"" + num(ly) + "\" stroke=\"" + color +
           "\" stroke-width=\"2.5\"/>\n";
    svg += "<text x=\"" + num(lx + 28) + "\" y=\"" + num(ly + 4) + "\">" +
           xml_escape(paths[pi].label) + "</text>\n";
    ly += 18;
  }
  svg += "</g>\n</svg>\n";
  return svg;
}

void save_text_file(const std::string& text, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("save_text_file: cannot open '" + path + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("save_text_file: write failed for '" + path + "'");
}

}  // namespace pdlab
