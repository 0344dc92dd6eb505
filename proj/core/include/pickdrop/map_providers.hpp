#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>

#include "pickdrop/providers.hpp"
#include "pickdrop/voxel_map.hpp"

namespace pickdrop {

// Ray marching over the occupied voxels of a finalized map, each voxel
// treated as a solid axis-aligned cube. Lets the pipeline synthesize robot
// point-of-view depth images and masks from nothing but a persisted map,
// which is what the map-backed providers below do.
class VoxelRaycaster {
 public:
  explicit VoxelRaycaster(const VoxelMap& map);

  struct Hit {
    std::size_t entry;  // index into map.indices()
    double t;           // ray parameter at the voxel entry face
  };

  // First occupied voxel along origin + t * dir for t in [t_min, t_max].
  // dir need not be normalized; t is measured in units of |dir|.
  std::optional<Hit> cast(const Eigen::Vector3d& origin,
                          const Eigen::Vector3d& dir, double t_min,
                          double t_max) const;

  const VoxelMap& map() const { return *map_; }

 private:
  const VoxelMap* map_;
  std::unordered_map<VoxelIndex, std::size_t, VoxelIndexHash> lookup_;
};

// Head camera that renders the map's voxel cubes. Depth is the camera-frame
// z of the entry face, matching the scan depth convention.
class MapDepthCamera : public DepthCameraProvider {
 public:
  explicit MapDepthCamera(const VoxelRaycaster& caster) : caster_(&caster) {}

  DepthImage capture(const CameraIntrinsics& intr,
                     const Pose& camera_to_world) const override;

 private:
  const VoxelRaycaster* caster_;
};

// Language-conditioned segmentation over the rendered map: a pixel belongs
// to the mask when the voxel it hits scores at least `relative_threshold`
// times the map-wide best similarity for the query.
class MapSegmenter : public SegmentationProvider {
 public:
  MapSegmenter(const VoxelRaycaster& caster, const EmbeddingProvider& embedder,
               double relative_threshold = 0.8)
      : caster_(&caster),
        embedder_(&embedder),
        relative_threshold_(relative_threshold) {}

  std::optional<PixelMask> segment(const std::string& query,
                                   const CameraIntrinsics& intr,
                                   const Pose& camera_to_world) const override;

 private:
  const VoxelRaycaster* caster_;
  const EmbeddingProvider* embedder_;
  double relative_threshold_;
};

// Grasp candidates sampled on the voxel surface around the focus point:
// grasp points at nearby voxel centers, alternating horizontal and vertical
// approach directions, seeded graspness scores.
class MapGraspProvider : public GraspProvider {
 public:
  explicit MapGraspProvider(const VoxelMap& map, std::uint64_t seed = 0,
                            double reach = 0.35, int max_proposals = 16)
      : map_(&map), seed_(seed), reach_(reach), max_proposals_(max_proposals) {}

  std::vector<GraspProposal> propose(
      const Eigen::Vector3d& focus) const override;

 private:
  const VoxelMap* map_;
  std::uint64_t seed_;
  double reach_;
  int max_proposals_;
};

}  // namespace pickdrop
