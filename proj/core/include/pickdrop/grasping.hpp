#pragma once

#include <Eigen/Core>
#include <array>
#include <iosfwd>
#include <vector>

#include "pickdrop/geometry.hpp"
#include "pickdrop/mask.hpp"

namespace pickdrop {

// One grasp candidate from a grasp-generation provider. The approach vector
// is the unit direction the gripper travels toward the grasp point.
struct GraspProposal {
  Eigen::Vector3d point = Eigen::Vector3d::Zero();
  Eigen::Vector3d approach = Eigen::Vector3d::UnitX();
  double width = 0.0;
  double height = 0.0;
  double depth = 0.0;
  double graspness = 0.0;
};

// A proposal with its horizontality deviation theta (0 = horizontal
// approach, pi/2 = vertical) and the heuristic score graspness - theta^4/10.
struct RankedGrasp {
  GraspProposal proposal;
  double theta = 0.0;
  double heuristic_score = 0.0;
  int input_index = 0;
};

// Straight-line pre-grasp approach with progressively smaller motions:
// p - 0.2a, p - 0.08a, p - 0.04a, p; the gripper closes at the last point.
struct GraspTrajectory {
  std::array<Eigen::Vector3d, 4> waypoints;
};

// Keeps exactly the proposals whose grasp point projects to an in-view pixel
// where the mask is set; input order is preserved. Throws
// InvalidArgumentError when the mask dimensions do not match the intrinsics.
std::vector<GraspProposal> filter_by_mask(
    const std::vector<GraspProposal>& proposals, const PixelMask& mask,
    const CameraIntrinsics& intr, const Pose& camera_to_world);

// Ranks proposals by heuristic score, descending, ties resolved to the
// lowest input index; element 0 is the executed grasp. theta is measured as
// the approach vector's deviation from the plane orthogonal to floor_normal.
// Throws NoGraspError on an empty proposal list.
std::vector<RankedGrasp> rank_grasps(
    const std::vector<GraspProposal>& proposals,
    const Eigen::Vector3d& floor_normal = Eigen::Vector3d::UnitZ());

// Throws InvalidArgumentError unless the approach vector is unit norm
// (within 1e-6).
GraspTrajectory pregrasp_trajectory(const GraspProposal& grasp);

// Line-delimited decimal text records:
//   px py pz ax ay az width height depth score
std::vector<GraspProposal> read_grasp_proposals(std::istream& in);
void write_grasp_proposals(std::ostream& out,
                           const std::vector<GraspProposal>& proposals);

}  // namespace pickdrop
