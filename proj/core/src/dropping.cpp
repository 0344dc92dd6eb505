#include "pickdrop/dropping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pickdrop/errors.hpp"

namespace pickdrop {

AlignedCloud align_cloud(const PointCloud& cloud,
                         const Eigen::Vector2d& robot_xy,
                         const Eigen::Vector2d& heading) {
  if (std::abs(heading.norm() - 1.0) > 1e-6) {
    throw InvalidArgumentError("align_cloud: heading must be unit norm");
  }
  // 2D rotation taking `heading` to +X, applied about the floor normal.
  const double hx = heading.x(), hy = heading.y();
  AlignedCloud aligned;
  aligned.points.reserve(cloud.points.size());
  for (const Eigen::Vector3d& p : cloud.points) {
    const double dx = p.x() - robot_xy.x();
    const double dy = p.y() - robot_xy.y();
    aligned.points.emplace_back(hx * dx + hy * dy, -hy * dx + hx * dy, p.z());
  }
  return aligned;
}

namespace {

// Lower median: order statistic ceil(n/2) counting from 1.
double lower_median(std::vector<double> values) {
  const std::size_t k = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + k, values.end());
  return values[k];
}

}  // namespace

DropPoint compute_drop(const AlignedCloud& cloud,
                       std::optional<double> reach_limit) {
  if (cloud.points.empty()) {
    throw NoReceptacleError("compute_drop: empty receptacle cloud");
  }
  std::vector<double> xs, ys;
  xs.reserve(cloud.points.size());
  ys.reserve(cloud.points.size());
  for (const Eigen::Vector3d& p : cloud.points) {
    xs.push_back(p.x());
    ys.push_back(p.y());
  }
  const double x_m = lower_median(std::move(xs));
  const double y_m = lower_median(std::move(ys));

  double max_z = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (const Eigen::Vector3d& p : cloud.points) {
    if (p.x() >= 0.0 && p.x() <= x_m && std::abs(p.y() - y_m) < 0.1) {
      max_z = std::max(max_z, p.z());
      any = true;
    }
  }
  if (!any) {
    throw DegenerateReceptacleError(
        "compute_drop: no point in the eligibility slab (receptacle behind "
        "the robot?)");
  }
  double z = 0.2 + max_z;
  if (reach_limit) z = std::min(z, *reach_limit);
  return DropPoint{x_m, y_m, z};
}

}  // namespace pickdrop
