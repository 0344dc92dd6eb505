#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

namespace pickdrop {

// Pinhole camera model. Pixel (u, v) has its center at integer coordinates,
// with u running along image columns and v along rows.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const {
    return fx > 0.0 && fy > 0.0 && width > 0 && height > 0 && cx >= 0.0 &&
           cx < width && cy >= 0.0 && cy < height;
  }
};

// Rigid transform taking camera-frame points to world-frame points.
// The world frame is z-up with the floor plane at z = 0.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose identity() { return Pose{}; }

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  Pose inverse() const {
    Pose inv;
    inv.rotation = rotation.transpose();
    inv.translation = -(inv.rotation * translation);
    return inv;
  }

  // rotation' * rotation == I and det == +1 within tol.
  bool is_rigid(double tol = 1e-9) const;
};

// Applies b first, then a: (a ∘ b)(p) = a(b(p)).
Pose compose(const Pose& a, const Pose& b);

// Depth in meters, row major. A value of 0 marks an invalid pixel; every
// stored value must be finite and non-negative.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), values(size_t(w) * h, 0.f) {}

  float at(int u, int v) const { return values[size_t(v) * width + u]; }
  float& at(int u, int v) { return values[size_t(v) * width + u]; }
  bool valid_at(int u, int v) const { return at(u, v) > 0.f; }
};

struct PointCloud {
  std::vector<Eigen::Vector3d> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

// Camera-frame point of pixel (u, v) at depth d:
//   ((u - cx) * d / fx, (v - cy) * d / fy, d)
inline Eigen::Vector3d pixel_to_camera(double u, double v, double depth,
                                       const CameraIntrinsics& intr) {
  return {(u - intr.cx) * depth / intr.fx, (v - intr.cy) * depth / intr.fy,
          depth};
}

// One world point per valid depth pixel. Pixels with depth 0 are skipped.
// Throws InvalidArgumentError when the depth dimensions do not match the
// intrinsics.
PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr,
                       const Pose& camera_to_world);

// Continuous pixel coordinate of a world point, or nullopt when the point
// lies behind the camera (camera-frame z <= 0) or its covering pixel
// (nearest integer coordinate) falls outside the image.
std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& world,
                                       const CameraIntrinsics& intr,
                                       const Pose& camera_to_world);

}  // namespace pickdrop
