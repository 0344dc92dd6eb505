#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pickdrop/providers.hpp"
#include "pickdrop/scan_archive.hpp"
#include "pickdrop/voxel_map.hpp"

namespace pickdrop {

// Axis-aligned labeled box; center is the box center, size the full extents.
struct SceneItem {
  std::string label;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d size = Eigen::Vector3d::Zero();
};

// Declarative description of a synthetic room: floor rectangle
// [0, room_width] x [0, room_depth] at z = 0, thin walls around it, labeled
// receptacles (tables, sinks, ...) and labeled graspable objects.
struct SceneSpec {
  double room_width = 5.0;
  double room_depth = 4.0;
  double wall_height = 2.2;
  int ring_frames = 36;
  CameraIntrinsics camera{160.0, 160.0, 128.0, 96.0, 256, 192};
  Eigen::Vector2d robot_start{0.6, 0.6};
  std::vector<SceneItem> receptacles;
  std::vector<SceneItem> objects;

  static SceneSpec from_file(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Throws InvalidArgumentError when an item pokes outside the room.
  void validate() const;
};

// Built-in scene variants used by tests and demos: a room with a couple of
// receptacles and objects whose placement varies with the variant number.
SceneSpec sample_scene(int variant);

// What the generator knows to be true, persisted next to the archive so
// oracles can check retrieval against reality.
struct GroundTruth {
  struct Item {
    std::string label;
    std::string kind;  // "object" | "receptacle"
    Eigen::Vector3d center = Eigen::Vector3d::Zero();
    Eigen::Vector3d size = Eigen::Vector3d::Zero();
    VoxelIndex voxel;  // voxel_of(center) at the default 5 cm resolution
  };
  std::vector<Item> items;
  Eigen::Vector2d robot_start = Eigen::Vector2d::Zero();

  void save(const std::filesystem::path& path) const;
  static GroundTruth load(const std::filesystem::path& path);
};

// Analytic renderer for a SceneSpec: floor plane, wall slabs and item boxes,
// ray cast per pixel. Depth follows the scan convention (camera-frame z).
class SyntheticScene {
 public:
  explicit SyntheticScene(const SceneSpec& spec);

  struct RenderedView {
    DepthImage depth;
    std::vector<std::int32_t> owner;  // solid index per pixel, -1 = no hit
  };

  RenderedView render(const CameraIntrinsics& intr,
                      const Pose& camera_to_world) const;
  PixelMask mask_for(const RenderedView& view, int solid) const;

  int solid_count() const { return static_cast<int>(labels_.size()); }
  const std::string& label_of(int solid) const { return labels_[solid]; }
  // First solid with this label, or -1. Items shadow structure labels.
  int solid_by_label(const std::string& label) const;
  // Index into spec().objects for a solid, or -1 for non-objects.
  int object_index_of(int solid) const { return object_index_[solid]; }

  const SceneSpec& spec() const { return spec_; }

 private:
  SceneSpec spec_;
  std::vector<std::string> labels_;
  std::vector<Eigen::AlignedBox3d> boxes_;      // ignored for the floor solid
  std::vector<std::int32_t> object_index_;
  int floor_solid_ = 0;
};

// Camera pose with the optical axis through `target`, image up aligned with
// the world's z-up (CV convention: x right, y down, z forward).
Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target);

// Renders a posed scan of the scene: a ring sweep over the room plus a few
// close-ups of every labeled item, with one detection per visible solid per
// frame (mask, embedding of the label, seeded confidence). Identical
// (spec, seed) pairs produce byte-identical archives.
ScanArchive generate_scan(const SceneSpec& spec, std::uint64_t seed,
                          const EmbeddingProvider& embedder,
                          GroundTruth* ground_truth = nullptr);

// Ideal providers backed by the scene itself.

class SceneDepthCamera : public DepthCameraProvider {
 public:
  explicit SceneDepthCamera(const SyntheticScene& scene) : scene_(&scene) {}
  DepthImage capture(const CameraIntrinsics& intr,
                     const Pose& camera_to_world) const override;

 private:
  const SyntheticScene* scene_;
};

class SceneSegmenter : public SegmentationProvider {
 public:
  explicit SceneSegmenter(const SyntheticScene& scene) : scene_(&scene) {}
  std::optional<PixelMask> segment(const std::string& query,
                                   const CameraIntrinsics& intr,
                                   const Pose& camera_to_world) const override;

 private:
  const SyntheticScene* scene_;
};

// Grasp candidates for the scene object nearest to the focus point: the
// object center with horizontal and vertical approaches, plus a few
// deliberately off-object distractors that mask filtering must reject.
class SceneGraspProvider : public GraspProvider {
 public:
  SceneGraspProvider(const SyntheticScene& scene, std::uint64_t seed)
      : scene_(&scene), seed_(seed) {}
  std::vector<GraspProposal> propose(
      const Eigen::Vector3d& focus) const override;

 private:
  const SyntheticScene* scene_;
  std::uint64_t seed_;
};

}  // namespace pickdrop
