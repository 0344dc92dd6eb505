#include "pickdrop/grasping.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pickdrop/errors.hpp"
#include "test_helpers.hpp"

using namespace pickdrop;
using pickdrop::testing::random_pose;
using pickdrop::testing::random_unit3;

namespace {

CameraIntrinsics camera() {
  return CameraIntrinsics{120.0, 120.0, 64.0, 48.0, 128, 96};
}

GraspProposal proposal(const Eigen::Vector3d& point,
                       const Eigen::Vector3d& approach, double graspness) {
  GraspProposal g;
  g.point = point;
  g.approach = approach.normalized();
  g.width = 0.06;
  g.height = 0.02;
  g.depth = 0.04;
  g.graspness = graspness;
  return g;
}

}  // namespace

TEST_CASE("filter keeps in-mask proposals and drops the rest") {
  const CameraIntrinsics intr = camera();
  PixelMask mask(intr.width, intr.height);
  mask.set(64, 48);  // only the principal pixel

  const std::vector<GraspProposal> proposals{
      proposal({0, 0, 1}, {1, 0, 0}, 0.5),    // principal ray, in mask
      proposal({0.2, 0, 1}, {1, 0, 0}, 0.5),  // projects elsewhere
      proposal({0, 0, -1}, {1, 0, 0}, 0.5),   // behind the camera
  };
  const auto kept = filter_by_mask(proposals, mask, intr, Pose::identity());
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].point == Eigen::Vector3d{0, 0, 1});
}

TEST_CASE("filter rejects mismatched mask dimensions") {
  const CameraIntrinsics intr = camera();
  PixelMask mask(intr.width - 1, intr.height);
  CHECK_THROWS_AS(filter_by_mask({}, mask, intr, Pose::identity()),
                  InvalidArgumentError);
}

TEST_CASE("filter agrees with per-proposal projection oracle") {
  const CameraIntrinsics intr = camera();
  SplitMix64 rng(4242);
  const Pose pose = random_pose(rng);

  PixelMask disk(intr.width, intr.height);
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const double du = u - 70.0, dv = v - 40.0;
      if (du * du + dv * dv <= 30.0 * 30.0) disk.set(u, v);
    }
  }

  std::vector<GraspProposal> proposals;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Vector3d cam{rng.uniform(-1, 1), rng.uniform(-1, 1),
                              rng.uniform(-0.5, 3.0)};
    proposals.push_back(proposal(pose.apply(cam), random_unit3(rng),
                                 rng.uniform(0, 1)));
  }
  const auto kept = filter_by_mask(proposals, disk, intr, pose);

  // independent pinhole arithmetic per proposal
  std::vector<GraspProposal> expected;
  const Pose world_to_cam = pose.inverse();
  for (const GraspProposal& g : proposals) {
    const Eigen::Vector3d c = world_to_cam.apply(g.point);
    if (c.z() <= 0) continue;
    const double u = intr.fx * c.x() / c.z() + intr.cx;
    const double v = intr.fy * c.y() / c.z() + intr.cy;
    const long pu = std::lround(u), pv = std::lround(v);
    if (pu < 0 || pu >= intr.width || pv < 0 || pv >= intr.height) continue;
    if (disk.at(int(pu), int(pv))) expected.push_back(g);
  }
  REQUIRE(kept.size() == expected.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    CHECK(kept[i].point == expected[i].point);  // order preserved
  }
}

TEST_CASE("heuristic score reproduces graspness minus theta^4/10") {
  SUBCASE("horizontal approach carries no penalty") {
    const auto ranked =
        rank_grasps({proposal({0, 0, 0}, {1, 0, 0}, 0.9)});
    CHECK(ranked[0].theta == doctest::Approx(0.0));
    CHECK(ranked[0].heuristic_score == doctest::Approx(0.9));
  }

  SUBCASE("vertical approach pays (pi/2)^4 / 10") {
    const auto ranked =
        rank_grasps({proposal({0, 0, 0}, {0, 0, -1}, 0.9)});
    CHECK(ranked[0].theta == doctest::Approx(M_PI / 2));
    CHECK(ranked[0].heuristic_score ==
          doctest::Approx(0.2911931810376411).epsilon(1e-9));
  }

  SUBCASE("equal graspness: horizontal beats vertical") {
    const auto ranked = rank_grasps({
        proposal({0, 0, 0}, {0, 0, 1}, 0.8),   // vertical (upward travel)
        proposal({0, 0, 0}, {0, 1, 0}, 0.8),   // horizontal
    });
    CHECK(ranked[0].input_index == 1);
  }

  SUBCASE("ties resolve to the lowest input index") {
    const auto ranked = rank_grasps({
        proposal({1, 0, 0}, {1, 0, 0}, 0.7),
        proposal({2, 0, 0}, {1, 0, 0}, 0.7),
    });
    CHECK(ranked[0].input_index == 0);
  }

  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(rank_grasps({}), NoGraspError);
  }
}

TEST_CASE("ranking is invariant to a constant graspness shift") {
  SplitMix64 rng(11);
  std::vector<GraspProposal> a, b;
  for (int i = 0; i < 20; ++i) {
    const GraspProposal g =
        proposal({rng.uniform(-1, 1), 0, 0}, random_unit3(rng),
                 rng.uniform(0, 1));
    a.push_back(g);
    b.push_back(g);
    b.back().graspness += 5.0;
  }
  CHECK(rank_grasps(a)[0].input_index == rank_grasps(b)[0].input_index);
}

TEST_CASE("heuristic penalty grows with theta") {
  double previous = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= 20; ++i) {
    const double elevation = (M_PI / 2) * i / 20;  // 0 horizontal, pi/2 down
    const Eigen::Vector3d approach{std::cos(elevation), 0.0,
                                   -std::sin(elevation)};
    const auto ranked = rank_grasps({proposal({0, 0, 0}, approach, 0.5)});
    CHECK(ranked[0].theta == doctest::Approx(elevation).epsilon(1e-9));
    CHECK(ranked[0].heuristic_score <= previous + 1e-12);
    previous = ranked[0].heuristic_score;
  }
}

TEST_CASE("pregrasp trajectory walks the approach line") {
  SUBCASE("worked example along x") {
    const GraspTrajectory traj =
        pregrasp_trajectory(proposal({1.0, 0, 0.3}, {1, 0, 0}, 0.5));
    CHECK(traj.waypoints[0].x() == doctest::Approx(0.80));
    CHECK(traj.waypoints[1].x() == doctest::Approx(0.92));
    CHECK(traj.waypoints[2].x() == doctest::Approx(0.96));
    CHECK(traj.waypoints[3].x() == doctest::Approx(1.00));
  }

  SUBCASE("downward approach from above") {
    const GraspTrajectory traj =
        pregrasp_trajectory(proposal({0, 0, 0}, {0, 0, -1}, 0.5));
    CHECK(traj.waypoints[0].z() == doctest::Approx(0.20));
    CHECK(traj.waypoints[1].z() == doctest::Approx(0.08));
    CHECK(traj.waypoints[2].z() == doctest::Approx(0.04));
    CHECK(traj.waypoints[3].z() == doctest::Approx(0.0));
  }

  SUBCASE("inter-waypoint distances are 0.12, 0.04, 0.04") {
    SplitMix64 rng(3);
    for (int i = 0; i < 50; ++i) {
      const GraspProposal g = proposal(
          {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 2)},
          random_unit3(rng), 0.5);
      const GraspTrajectory traj = pregrasp_trajectory(g);
      CHECK((traj.waypoints[1] - traj.waypoints[0]).norm() ==
            doctest::Approx(0.12).epsilon(1e-9));
      CHECK((traj.waypoints[2] - traj.waypoints[1]).norm() ==
            doctest::Approx(0.04).epsilon(1e-9));
      CHECK((traj.waypoints[3] - traj.waypoints[2]).norm() ==
            doctest::Approx(0.04).epsilon(1e-9));
      // exact offsets along -approach
      const double k[4] = {0.2, 0.08, 0.04, 0.0};
      for (int w = 0; w < 4; ++w) {
        const Eigen::Vector3d expected = g.point - k[w] * g.approach;
        CHECK(traj.waypoints[w] == expected);
      }
    }
  }

  SUBCASE("non-unit approach is rejected") {
    GraspProposal g = proposal({0, 0, 0}, {1, 0, 0}, 0.5);
    g.approach = {2, 0, 0};
    CHECK_THROWS_AS(pregrasp_trajectory(g), InvalidArgumentError);
  }
}

TEST_CASE("grasp proposal text records round trip") {
  SplitMix64 rng(21);
  std::vector<GraspProposal> proposals;
  for (int i = 0; i < 10; ++i) {
    proposals.push_back(proposal(
        {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 2)},
        random_unit3(rng), rng.uniform(0, 1)));
  }
  std::stringstream stream;
  write_grasp_proposals(stream, proposals);
  const auto back = read_grasp_proposals(stream);
  REQUIRE(back.size() == proposals.size());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    CHECK(back[i].point == proposals[i].point);
    CHECK(back[i].approach == proposals[i].approach);
    CHECK(back[i].graspness == proposals[i].graspness);
  }

  std::istringstream bad("1 2 3 nope");
  CHECK_THROWS_AS(read_grasp_proposals(bad), ParseError);
}
