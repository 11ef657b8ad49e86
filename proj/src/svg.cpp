#include "flocksim/svg.hpp"

#include <sstream>

namespace flocksim {

namespace {

constexpr const char* kPalette[] = {
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
};
constexpr int kPaletteSize = static_cast<int>(sizeof(kPalette) / sizeof(kPalette[0]));

}  // namespace

std::string origin_color(int origin_id) {
  if (origin_id < 0) return "#999999";
  return kPalette[origin_id % kPaletteSize];
}

std::string render_frame_svg(const FrameView& frame, const TaskSpec& spec) {
  const Arena& a = spec.arena;
  const double margin = 0.04 * std::max(a.width(), a.height());
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
      << "viewBox=\"" << format_double(a.min.x - margin) << " "
      << format_double(a.min.y - margin) << " "
      << format_double(a.width() + 2 * margin) << " "
      << format_double(a.height() + 2 * margin) << "\">\n";
  // Flip y so the arena's y axis points up.
  svg << "<g transform=\"translate(0," << format_double(a.min.y + a.max.y)
      << ") scale(1,-1)\">\n";
  svg << "<rect x=\"" << format_double(a.min.x) << "\" y=\"" << format_double(a.min.y)
      << "\" width=\"" << format_double(a.width()) << "\" height=\""
      << format_double(a.height())
      << "\" fill=\"white\" stroke=\"#333333\" stroke-width=\"0.4\"/>\n";

  const double robot_r = 0.012 * std::max(a.width(), a.height());
  for (std::size_t i = 0; i < frame.positions.size(); ++i) {
    const Vec2 p = frame.positions[i];
    svg << "<circle cx=\"" << format_double(p.x) << "\" cy=\"" << format_double(p.y)
        << "\" r=\"" << format_double(spec.comm_range)
        << "\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"0.15\" "
        << "stroke-dasharray=\"1.5,1.5\"/>\n";
  }
  for (std::size_t i = 0; i < frame.goals.size(); ++i) {
    const Vec2 g = frame.goals[i];
    const double c = robot_r * 1.4;
    const std::string color =
        i < frame.plan_origins.size() ? origin_color(frame.plan_origins[i]) : "#999999";
    svg << "<path d=\"M " << format_double(g.x - c) << " " << format_double(g.y)
        << " L " << format_double(g.x + c) << " " << format_double(g.y) << " M "
        << format_double(g.x) << " " << format_double(g.y - c) << " L "
        << format_double(g.x) << " " << format_double(g.y + c) << "\" stroke=\"" << color
        << "\" stroke-width=\"0.4\" fill=\"none\"/>\n";
  }
  for (std::size_t i = 0; i < frame.positions.size(); ++i) {
    const Vec2 p = frame.positions[i];
    const std::string color =
        i < frame.plan_origins.size() ? origin_color(frame.plan_origins[i]) : "#999999";
    svg << "<circle cx=\"" << format_double(p.x) << "\" cy=\"" << format_double(p.y)
        << "\" r=\"" << format_double(robot_r) << "\" fill=\"" << color
        << "\" stroke=\"#222222\" stroke-width=\"0.15\"/>\n";
    if (i < frame.influences.size()) {
      svg << "<text x=\"" << format_double(p.x) << "\" y=\""
          << format_double(-(p.y + robot_r * 2.2)) << "\" transform=\"scale(1,-1)\" "
          << "font-size=\"2.4\" text-anchor=\"middle\" fill=\"#222222\">"
          << format_double(frame.influences[i]) << "</text>\n";
    }
  }
  svg << "</g>\n";
  svg << "<text x=\"" << format_double(a.min.x) << "\" y=\""
      << format_double(a.min.y - margin * 0.25)
      << "\" font-size=\"3\" fill=\"#222222\">step " << frame.round << "</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace flocksim
