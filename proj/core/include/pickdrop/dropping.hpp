#pragma once

#include <Eigen/Core>
#include <optional>

#include "pickdrop/geometry.hpp"

namespace pickdrop {

// Point cloud in the robot-aligned frame: +X is the robot facing direction,
// +Y its left, +Z the floor normal; the robot stands at (0, 0) and the floor
// plane is z = 0.
struct AlignedCloud {
  std::vector<Eigen::Vector3d> points;
};

// Where to release the carried object: the gripper moves above (x, y) at
// height z and opens.
struct DropPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

// Rigidly maps a world-frame cloud into the robot-aligned frame: rotates
// about the floor normal so `heading` becomes +X and translates so
// `robot_xy` becomes the origin; z is preserved.
AlignedCloud align_cloud(const PointCloud& cloud,
                         const Eigen::Vector2d& robot_xy,
                         const Eigen::Vector2d& heading);

// Drop heuristic over a segmented receptacle cloud:
//   x_m, y_m : per-axis medians of all points (lower median for even counts)
//   z        : 0.2 + max{ p.z : 0 <= p.x <= x_m, |p.y - y_m| < 0.1 }
// The 0.2 m buffer keeps the gripper clear of the receptacle rim, which is
// what makes the heuristic work on concave receptacles (sinks, bins):
// rim points inside the slab govern the release height.
// `reach_limit`, when set, caps z at the arm's maximum height.
// Throws NoReceptacleError on an empty cloud and DegenerateReceptacleError
// when no point satisfies the slab predicate.
DropPoint compute_drop(const AlignedCloud& cloud,
                       std::optional<double> reach_limit = std::nullopt);

}  // namespace pickdrop
