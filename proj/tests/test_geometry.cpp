#include "pickdrop/geometry.hpp"

#include <doctest.h>

#include "pickdrop/errors.hpp"
#include "test_helpers.hpp"

using namespace pickdrop;
using pickdrop::testing::random_pose;

namespace {

CameraIntrinsics small_camera() {
  return CameraIntrinsics{40.0, 40.0, 60.0, 48.0, 128, 96};
}

}  // namespace

TEST_CASE("backproject principal ray") {
  const CameraIntrinsics intr = small_camera();
  DepthImage depth(intr.width, intr.height);
  depth.at(60, 48) = 2.0f;
  const PointCloud cloud = backproject(depth, intr, Pose::identity());
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0].isApprox(Eigen::Vector3d{0, 0, 2}, 1e-12));
}

TEST_CASE("backproject skips invalid depth") {
  const CameraIntrinsics intr = small_camera();
  DepthImage depth(intr.width, intr.height);
  depth.at(10, 10) = 1.0f;
  depth.at(11, 10) = 0.0f;  // invalid
  depth.at(12, 10) = 3.0f;
  const PointCloud cloud = backproject(depth, intr, Pose::identity());
  CHECK(cloud.size() == 2);
}

TEST_CASE("backproject pinhole formula with pose") {
  // pixel (cx + fx, cy) at depth 1 is one meter right of the optical axis
  const CameraIntrinsics intr = small_camera();
  DepthImage depth(intr.width, intr.height);
  depth.at(100, 48) = 1.0f;  // u = cx + fx = 100
  Pose pose;
  pose.translation = {0, 0, 1};
  const PointCloud cloud = backproject(depth, intr, pose);
  REQUIRE(cloud.size() == 1);
  CHECK(cloud.points[0].isApprox(Eigen::Vector3d{1, 0, 2}, 1e-12));
}

TEST_CASE("backproject rejects dimension mismatch") {
  const CameraIntrinsics intr = small_camera();
  DepthImage depth(intr.width + 1, intr.height);
  CHECK_THROWS_AS(backproject(depth, intr, Pose::identity()),
                  InvalidArgumentError);
}

TEST_CASE("project principal ray and out-of-view") {
  const CameraIntrinsics intr = small_camera();
  const auto px = project({0, 0, 2}, intr, Pose::identity());
  REQUIRE(px.has_value());
  CHECK(px->x() == doctest::Approx(intr.cx));
  CHECK(px->y() == doctest::Approx(intr.cy));

  CHECK_FALSE(project({0, 0, -1}, intr, Pose::identity()).has_value());
  CHECK_FALSE(project({50, 0, 1}, intr, Pose::identity()).has_value());
}

TEST_CASE("project inverts backproject within half a pixel") {
  const CameraIntrinsics intr{180.0, 175.0, 127.3, 95.2, 256, 192};
  SplitMix64 rng(31337);
  for (int i = 0; i < 500; ++i) {
    const Pose pose = random_pose(rng);
    const int u = int(rng.uniform(0, intr.width));
    const int v = int(rng.uniform(0, intr.height));
    const double d = rng.uniform(0.2, 8.0);
    const Eigen::Vector3d world = pose.apply(pixel_to_camera(u, v, d, intr));
    const auto px = project(world, intr, pose);
    REQUIRE(px.has_value());
    CHECK(std::abs(px->x() - u) < 0.5);
    CHECK(std::abs(px->y() - v) < 0.5);
  }
}

TEST_CASE("backproject point count equals valid pixel count") {
  const CameraIntrinsics intr = small_camera();
  SplitMix64 rng(99);
  DepthImage depth(intr.width, intr.height);
  int valid = 0;
  for (float& d : depth.values) {
    if (rng.uniform() < 0.3) {
      d = float(rng.uniform(0.1, 5.0));
      ++valid;
    }
  }
  CHECK(backproject(depth, intr, Pose::identity()).size() == size_t(valid));
}

TEST_CASE("compose identity and inverse") {
  SplitMix64 rng(7);
  const Pose p = random_pose(rng);
  const Pose id = Pose::identity();

  const Pose left = compose(id, p);
  CHECK(left.rotation.isApprox(p.rotation, 1e-12));
  CHECK(left.translation.isApprox(p.translation, 1e-12));

  const Pose round = compose(p, p.inverse());
  CHECK(round.rotation.isApprox(Eigen::Matrix3d::Identity(), 1e-9));
  CHECK(round.translation.norm() < 1e-9);
}

TEST_CASE("two quarter turns make a half turn") {
  Pose quarter;
  quarter.rotation = Eigen::AngleAxisd(M_PI / 2, Eigen::Vector3d::UnitZ())
                         .toRotationMatrix();
  const Pose half = compose(quarter, quarter);
  Eigen::Matrix3d expected;
  expected << -1, 0, 0, 0, -1, 0, 0, 0, 1;
  CHECK(half.rotation.isApprox(expected, 1e-12));
}

TEST_CASE("pose composition is associative") {
  SplitMix64 rng(1234);
  for (int i = 0; i < 50; ++i) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Pose ab_c = compose(compose(a, b), c);
    const Pose a_bc = compose(a, compose(b, c));
    CHECK((ab_c.rotation - a_bc.rotation).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((ab_c.translation - a_bc.translation).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("is_rigid flags non-orthonormal rotations") {
  Pose pose;
  CHECK(pose.is_rigid());
  pose.rotation(0, 0) = 2.0;
  CHECK_FALSE(pose.is_rigid());
  pose.rotation = -Eigen::Matrix3d::Identity();  // det = -1
  CHECK_FALSE(pose.is_rigid());
}
