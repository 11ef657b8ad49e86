#pragma once

#include <string>
#include <vector>

#include "flocksim/core.hpp"

// Stand-alone SVG rendering of one simulation frame: robots as disks colored
// by plan origin, goals as crosses, a dashed communication ring per robot.

namespace flocksim {

struct FrameView {
  int round = 0;
  std::vector<Vec2> positions;
  std::vector<int> plan_origins;  // color index per robot
  std::vector<Vec2> goals;
  std::vector<double> influences;
};

// Deterministic color for a plan origin id.
std::string origin_color(int origin_id);

std::string render_frame_svg(const FrameView& frame, const TaskSpec& spec);

}  // namespace flocksim
