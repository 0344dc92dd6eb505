#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pickdrop/geometry.hpp"
#include "pickdrop/grasping.hpp"
#include "pickdrop/mask.hpp"

namespace pickdrop {

// Role of a language encoder: text to unit-norm semantic vector.
// Implementations must be deterministic (identical text, identical vector).
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual std::vector<float> embed_text(const std::string& text) const = 0;
};

// Role of a grasp-generation model: grasp candidates for the scene content
// around a world-frame focus point.
class GraspProvider {
 public:
  virtual ~GraspProvider() = default;
  virtual std::vector<GraspProposal> propose(
      const Eigen::Vector3d& focus) const = 0;
};

// Role of a language-conditioned segmenter: the mask of the queried object
// in the given camera view, or nullopt when nothing matches.
class SegmentationProvider {
 public:
  virtual ~SegmentationProvider() = default;
  virtual std::optional<PixelMask> segment(const std::string& query,
                                           const CameraIntrinsics& intr,
                                           const Pose& camera_to_world)
      const = 0;
};

// Role of the robot's head camera: a depth image of the world from an
// arbitrary view.
class DepthCameraProvider {
 public:
  virtual ~DepthCameraProvider() = default;
  virtual DepthImage capture(const CameraIntrinsics& intr,
                             const Pose& camera_to_world) const = 0;
};

// Deterministic stand-in for a pretrained language encoder. The words of the
// bundled detector queries (plus "floor" and "wall") get a jointly
// constructed table of near-orthogonal unit vectors: seeded random starts,
// then a few pairwise-repulsion sweeps until every |dot| is below 0.28.
// Words outside the table fall back to seeded hash vectors. A phrase embeds
// as the normalized sum of its word vectors, so label retrieval behaves like
// a very sharp semantic encoder at desk scale.
class SyntheticVocabulary : public EmbeddingProvider {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed0b9ec7a11ULL;

  explicit SyntheticVocabulary(int dim = 64,
                               std::uint64_t seed = kDefaultSeed);

  int dim() const override { return dim_; }
  std::uint64_t seed() const { return seed_; }

  // Normalized sum of word vectors; words are lowercased alphanumeric runs.
  // Throws InvalidArgumentError when the text contains no word.
  std::vector<float> embed_text(const std::string& text) const override;

  // The vector a single word maps to (table entry or hashed fallback).
  std::vector<float> word_vector(const std::string& word) const;

  const std::vector<std::string>& table_words() const { return table_words_; }

 private:
  std::vector<double> hashed_unit_vector(const std::string& word) const;
  void build_table();

  int dim_;
  std::uint64_t seed_;
  std::vector<std::string> table_words_;
  std::map<std::string, std::vector<float>> table_;
};

// Embeddings computed offline by external model tooling, keyed by exact
// text. File format: {"dim": d, "entries": {"text": [d floats], ...}}.
class PrecomputedEmbeddings : public EmbeddingProvider {
 public:
  explicit PrecomputedEmbeddings(int dim) : dim_(dim) {}
  static PrecomputedEmbeddings from_file(const std::filesystem::path& path);

  void add(const std::string& text, std::vector<float> embedding);
  void save(const std::filesystem::path& path) const;

  int dim() const override { return dim_; }
  // Exact lookup; throws InvalidArgumentError for unknown text.
  std::vector<float> embed_text(const std::string& text) const override;

 private:
  int dim_;
  std::map<std::string, std::vector<float>> entries_;
};

}  // namespace pickdrop
