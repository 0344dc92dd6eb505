#include "pickdrop/geometry.hpp"

#include <cmath>

#include "pickdrop/errors.hpp"

namespace pickdrop {

bool Pose::is_rigid(double tol) const {
  const Eigen::Matrix3d err =
      rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(rotation.determinant() - 1.0) <= tol;
}

Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr,
                       const Pose& camera_to_world) {
  if (depth.width != intr.width || depth.height != intr.height) {
    throw InvalidArgumentError("backproject: depth image is " +
                               std::to_string(depth.width) + "x" +
                               std::to_string(depth.height) +
                               " but intrinsics expect " +
                               std::to_string(intr.width) + "x" +
                               std::to_string(intr.height));
  }
  PointCloud cloud;
  cloud.points.reserve(depth.values.size());
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const float d = depth.at(u, v);
      if (d <= 0.f) continue;
      cloud.points.push_back(
          camera_to_world.apply(pixel_to_camera(u, v, d, intr)));
    }
  }
  return cloud;
}

std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& world,
                                       const CameraIntrinsics& intr,
                                       const Pose& camera_to_world) {
  const Eigen::Vector3d cam = camera_to_world.inverse().apply(world);
  if (cam.z() <= 0.0) return std::nullopt;
  const double u = intr.fx * cam.x() / cam.z() + intr.cx;
  const double v = intr.fy * cam.y() / cam.z() + intr.cy;
  const long pu = std::lround(u);
  const long pv = std::lround(v);
  if (pu < 0 || pu >= intr.width || pv < 0 || pv >= intr.height) {
    return std::nullopt;
  }
  return Eigen::Vector2d{u, v};
}

}  // namespace pickdrop
