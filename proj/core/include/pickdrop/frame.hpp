#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pickdrop/geometry.hpp"
#include "pickdrop/mask.hpp"

namespace pickdrop {

// One detector hit on one frame: a labeled image region with a unit-norm
// semantic embedding and the detector's confidence in (0, 1].
struct Detection {
  std::string label;
  PixelBox bbox;
  std::optional<PixelMask> mask;  // absent: bbox pixels stand in for the mask
  std::vector<float> embedding;
  float confidence = 0.f;
};

// One posed RGB-D scan frame. Color is carried as an opaque reference only;
// nothing downstream consumes it.
struct PosedFrame {
  Pose camera_to_world;
  DepthImage depth;
  std::string color_ref;
  std::vector<Detection> detections;
};

}  // namespace pickdrop
