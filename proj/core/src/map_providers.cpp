#include "pickdrop/map_providers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pickdrop/errors.hpp"
#include "pickdrop/rng.hpp"

namespace pickdrop {

VoxelRaycaster::VoxelRaycaster(const VoxelMap& map) : map_(&map) {
  if (!map.finalized()) {
    throw StateError("VoxelRaycaster: map must be finalized");
  }
  lookup_.reserve(map.indices().size());
  for (std::size_t i = 0; i < map.indices().size(); ++i) {
    lookup_.emplace(map.indices()[i], i);
  }
}

std::optional<VoxelRaycaster::Hit> VoxelRaycaster::cast(
    const Eigen::Vector3d& origin, const Eigen::Vector3d& dir, double t_min,
    double t_max) const {
  const double s = map_->voxel_size();
  VoxelIndex v = voxel_of(origin, s);

  // Amanatides & Woo traversal.
  std::int64_t step[3];
  double t_next[3], t_delta[3];
  const double o[3] = {origin.x(), origin.y(), origin.z()};
  const double d[3] = {dir.x(), dir.y(), dir.z()};
  std::int64_t* vi[3] = {&v.x, &v.y, &v.z};
  for (int a = 0; a < 3; ++a) {
    if (d[a] > 0.0) {
      step[a] = 1;
      t_next[a] = ((double(*vi[a]) + 1.0) * s - o[a]) / d[a];
      t_delta[a] = s / d[a];
    } else if (d[a] < 0.0) {
      step[a] = -1;
      t_next[a] = (double(*vi[a]) * s - o[a]) / d[a];
      t_delta[a] = -s / d[a];
    } else {
      step[a] = 0;
      t_next[a] = std::numeric_limits<double>::infinity();
      t_delta[a] = std::numeric_limits<double>::infinity();
    }
  }

  double t_enter = 0.0;
  while (t_enter <= t_max) {
    if (t_enter >= t_min) {
      const auto it = lookup_.find(v);
      if (it != lookup_.end()) return Hit{it->second, t_enter};
    }
    int axis = 0;
    if (t_next[1] < t_next[axis]) axis = 1;
    if (t_next[2] < t_next[axis]) axis = 2;
    t_enter = t_next[axis];
    t_next[axis] += t_delta[axis];
    *vi[axis] += step[axis];
  }
  return std::nullopt;
}

DepthImage MapDepthCamera::capture(const CameraIntrinsics& intr,
                                   const Pose& camera_to_world) const {
  DepthImage depth(intr.width, intr.height);
  constexpr double kNear = 0.05, kFar = 12.0;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      // Pixel ray with camera-frame z = 1, so t equals the depth value.
      const Eigen::Vector3d dir_world =
          camera_to_world.rotation * pixel_to_camera(u, v, 1.0, intr);
      const auto hit = caster_->cast(camera_to_world.translation, dir_world,
                                     kNear, kFar);
      if (hit) depth.at(u, v) = static_cast<float>(hit->t);
    }
  }
  return depth;
}

std::optional<PixelMask> MapSegmenter::segment(
    const std::string& query, const CameraIntrinsics& intr,
    const Pose& camera_to_world) const {
  const VoxelMap& map = caster_->map();
  const std::vector<float> q = embedder_->embed_text(query);

  // Score every voxel; keep the ones close to the map-wide best.
  std::vector<double> scores(map.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.size(); ++i) {
    const std::span<const float> v = map.vector_at(i);
    double dot = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      dot += double(v[j]) * double(q[j]);
    }
    scores[i] = dot;
    best = std::max(best, dot);
  }
  if (!(best > 0.0)) return std::nullopt;
  const double cutoff = relative_threshold_ * best;

  PixelMask mask(intr.width, intr.height);
  constexpr double kNear = 0.05, kFar = 12.0;
  bool any = false;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Eigen::Vector3d dir_world =
          camera_to_world.rotation * pixel_to_camera(u, v, 1.0, intr);
      const auto hit = caster_->cast(camera_to_world.translation, dir_world,
                                     kNear, kFar);
      if (hit && scores[hit->entry] >= cutoff) {
        mask.set(u, v);
        any = true;
      }
    }
  }
  if (!any) return std::nullopt;
  return mask;
}

std::vector<GraspProposal> MapGraspProvider::propose(
    const Eigen::Vector3d& focus) const {
  struct Candidate {
    double d2;
    std::size_t entry;
  };
  std::vector<Candidate> nearby;
  const auto& indices = map_->indices();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const double d2 = (map_->center_of(indices[i]) - focus).squaredNorm();
    if (d2 <= reach_ * reach_) nearby.push_back(Candidate{d2, i});
  }
  std::sort(nearby.begin(), nearby.end(),
            [&](const Candidate& a, const Candidate& b) {
              if (a.d2 != b.d2) return a.d2 < b.d2;
              return indices[a.entry] < indices[b.entry];
            });
  if (nearby.size() > std::size_t(max_proposals_)) {
    nearby.resize(max_proposals_);
  }

  std::vector<GraspProposal> proposals;
  proposals.reserve(nearby.size());
  for (std::size_t k = 0; k < nearby.size(); ++k) {
    const VoxelIndex idx = indices[nearby[k].entry];
    SplitMix64 rng(seed_ ^ VoxelIndexHash{}(idx));
    GraspProposal g;
    g.point = map_->center_of(idx);
    if (k % 5 == 4) {
      g.approach = -Eigen::Vector3d::UnitZ();  // top-down grasp
    } else {
      const double angle = 2.0 * M_PI * double(k % 8) / 8.0;
      g.approach = {std::cos(angle), std::sin(angle), 0.0};
    }
    g.width = 0.08;
    g.height = 0.02;
    g.depth = 0.05;
    g.graspness = rng.uniform(0.4, 0.95);
    proposals.push_back(g);
  }
  return proposals;
}

}  // namespace pickdrop
