#include "pickdrop/grasping.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "pickdrop/errors.hpp"

namespace pickdrop {

std::vector<GraspProposal> filter_by_mask(
    const std::vector<GraspProposal>& proposals, const PixelMask& mask,
    const CameraIntrinsics& intr, const Pose& camera_to_world) {
  if (mask.width() != intr.width || mask.height() != intr.height) {
    throw InvalidArgumentError("filter_by_mask: mask is " +
                               std::to_string(mask.width()) + "x" +
                               std::to_string(mask.height()) +
                               " but intrinsics expect " +
                               std::to_string(intr.width) + "x" +
                               std::to_string(intr.height));
  }
  std::vector<GraspProposal> kept;
  for (const GraspProposal& g : proposals) {
    const auto pixel = project(g.point, intr, camera_to_world);
    if (!pixel) continue;
    const int u = static_cast<int>(std::lround(pixel->x()));
    const int v = static_cast<int>(std::lround(pixel->y()));
    if (mask.at(u, v)) kept.push_back(g);
  }
  return kept;
}

std::vector<RankedGrasp> rank_grasps(
    const std::vector<GraspProposal>& proposals,
    const Eigen::Vector3d& floor_normal) {
  if (proposals.empty()) {
    throw NoGraspError("rank_grasps: no proposals");
  }
  const Eigen::Vector3d up = floor_normal.normalized();

  std::vector<RankedGrasp> ranked;
  ranked.reserve(proposals.size());
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const GraspProposal& g = proposals[i];
    const double cos_to_up =
        std::clamp(g.approach.normalized().dot(up), -1.0, 1.0);
    const double theta = std::abs(M_PI / 2.0 - std::acos(cos_to_up));
    ranked.push_back(RankedGrasp{
        g, theta, g.graspness - std::pow(theta, 4) / 10.0, int(i)});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const RankedGrasp& a, const RankedGrasp& b) {
                     return a.heuristic_score > b.heuristic_score;
                   });
  return ranked;
}

GraspTrajectory pregrasp_trajectory(const GraspProposal& grasp) {
  if (std::abs(grasp.approach.norm() - 1.0) > 1e-6) {
    throw InvalidArgumentError(
        "pregrasp_trajectory: approach vector must be unit norm");
  }
  GraspTrajectory traj;
  const double offsets[4] = {0.2, 0.08, 0.04, 0.0};
  for (int i = 0; i < 4; ++i) {
    traj.waypoints[i] = grasp.point - offsets[i] * grasp.approach;
  }
  return traj;
}

std::vector<GraspProposal> read_grasp_proposals(std::istream& in) {
  std::vector<GraspProposal> proposals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    GraspProposal g;
    if (!(fields >> g.point.x() >> g.point.y() >> g.point.z() >>
          g.approach.x() >> g.approach.y() >> g.approach.z() >> g.width >>
          g.height >> g.depth >> g.graspness)) {
      throw ParseError("grasp proposals: malformed record on line " +
                       std::to_string(line_no));
    }
    proposals.push_back(g);
  }
  return proposals;
}

void write_grasp_proposals(std::ostream& out,
                           const std::vector<GraspProposal>& proposals) {
  out.precision(17);
  for (const GraspProposal& g : proposals) {
    out << g.point.x() << ' ' << g.point.y() << ' ' << g.point.z() << ' '
        << g.approach.x() << ' ' << g.approach.y() << ' ' << g.approach.z()
        << ' ' << g.width << ' ' << g.height << ' ' << g.depth << ' '
        << g.graspness << '\n';
  }
}

}  // namespace pickdrop
