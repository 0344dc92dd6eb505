#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "pickdrop/frame.hpp"
#include "pickdrop/geometry.hpp"

namespace pickdrop {

struct VoxelIndex {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  friend auto operator<=>(const VoxelIndex&, const VoxelIndex&) = default;
};

struct VoxelIndexHash {
  std::size_t operator()(const VoxelIndex& v) const noexcept;
};

// Integer voxel index of a point: floor(p_i / voxel_size) per axis.
// Throws InvalidArgumentError on non-finite points or voxel_size <= 0.
VoxelIndex voxel_of(const Eigen::Vector3d& point, double voxel_size);

struct QueryResult {
  VoxelIndex voxel;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // voxel center
  double similarity = 0.0;
};

// Sparse semantic voxel map. During the build phase detections accumulate a
// confidence-weighted embedding sum per voxel; finalize() turns each sum into
// the confidence-weighted average and freezes the map. The averaged vectors
// are deliberately not renormalized: queries rank voxels by the raw dot
// product between a unit query embedding and the stored average.
//
// A finalized map is immutable and safe to query from any number of threads.
class VoxelMap {
 public:
  explicit VoxelMap(double voxel_size = 0.05, int dim = 0);

  double voxel_size() const { return voxel_size_; }
  int dim() const { return dim_; }
  bool finalized() const { return finalized_; }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  // World coordinate of a voxel center: (idx + 0.5) * voxel_size per axis.
  Eigen::Vector3d center_of(const VoxelIndex& idx) const;

  // Adds one weighted observation to the voxel containing `world`:
  //   sum  += confidence * embedding
  //   mass += confidence
  // The first call fixes the embedding dimension when the map was built
  // with dim 0. Throws StateError once finalized.
  void accumulate(const Eigen::Vector3d& world,
                  std::span<const float> embedding, float confidence);

  // Back-projects every valid masked pixel of every detection in the frame
  // and accumulates it. Detections without a mask fall back to their
  // bounding-box pixels.
  void ingest_frame(const PosedFrame& frame, const CameraIntrinsics& intr);

  // Replaces each stored sum by sum / mass and freezes the map.
  // Throws EmptyMapError when nothing was accumulated.
  void finalize();

  // Top-k entries by dot product, descending; ties broken by lexicographic
  // voxel index (smallest first). Requires a finalized map, a unit-norm
  // query embedding of matching dimension and k >= 1. Returns fewer than k
  // results when the map is smaller than k.
  std::vector<QueryResult> query(std::span<const float> embedding,
                                 int k) const;

  // Composite "A near B" query: the top-`top_a` voxels for A and the
  // top-`top_b` voxels for B form a pairwise table of center-to-center
  // Euclidean distances; returns the A entry of the minimal-distance pair.
  // Distance ties resolve to the lowest (A rank, B rank) pair.
  QueryResult query_near(std::span<const float> embedding_a,
                         std::span<const float> embedding_b, int top_a = 10,
                         int top_b = 50) const;

  // Finalized storage, sorted by voxel index.
  const std::vector<VoxelIndex>& indices() const;
  std::span<const float> vector_at(std::size_t i) const;
  float mass_at(std::size_t i) const;

  // Little-endian binary persistence of a finalized map; round trips
  // bit-exactly. Header: u32 format version, f64 voxel size, u32 embedding
  // dimension, u64 entry count. Then per entry: 3x i64 index, dim x f32
  // vector, f32 mass.
  void save(const std::filesystem::path& path) const;
  static VoxelMap load(const std::filesystem::path& path);

 private:
  struct Accumulator {
    std::vector<double> sum;
    double mass = 0.0;
  };

  double dot(std::size_t entry, std::span<const float> q) const;
  void require_finalized(const char* op) const;

  double voxel_size_ = 0.05;
  int dim_ = 0;
  bool finalized_ = false;
  std::unordered_map<VoxelIndex, Accumulator, VoxelIndexHash> building_;

  // Finalized, index-sorted storage.
  std::vector<VoxelIndex> indices_;
  std::vector<float> vectors_;  // size() * dim_
  std::vector<float> masses_;
};

}  // namespace pickdrop
