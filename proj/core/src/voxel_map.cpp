#include "pickdrop/voxel_map.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include "pickdrop/errors.hpp"
#include "pickdrop/serialize.hpp"

namespace pickdrop {

namespace {

std::uint64_t mix64(std::uint64_t v) {
  // splitmix64 finalizer
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

constexpr std::uint32_t kMapFormatVersion = 1;

}  // namespace

std::size_t VoxelIndexHash::operator()(const VoxelIndex& v) const noexcept {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(v.x));
  h = mix64(h ^ static_cast<std::uint64_t>(v.y));
  h = mix64(h ^ static_cast<std::uint64_t>(v.z));
  return static_cast<std::size_t>(h);
}

VoxelIndex voxel_of(const Eigen::Vector3d& point, double voxel_size) {
  if (!(voxel_size > 0.0)) {
    throw InvalidArgumentError("voxel_of: voxel_size must be > 0");
  }
  if (!point.allFinite()) {
    throw InvalidArgumentError("voxel_of: non-finite point");
  }
  return VoxelIndex{
      static_cast<std::int64_t>(std::floor(point.x() / voxel_size)),
      static_cast<std::int64_t>(std::floor(point.y() / voxel_size)),
      static_cast<std::int64_t>(std::floor(point.z() / voxel_size))};
}

VoxelMap::VoxelMap(double voxel_size, int dim)
    : voxel_size_(voxel_size), dim_(dim) {
  if (!(voxel_size > 0.0)) {
    throw InvalidArgumentError("VoxelMap: voxel_size must be > 0");
  }
  if (dim < 0) {
    throw InvalidArgumentError("VoxelMap: negative embedding dimension");
  }
}

std::size_t VoxelMap::size() const {
  return finalized_ ? indices_.size() : building_.size();
}

Eigen::Vector3d VoxelMap::center_of(const VoxelIndex& idx) const {
  return {(double(idx.x) + 0.5) * voxel_size_,
          (double(idx.y) + 0.5) * voxel_size_,
          (double(idx.z) + 0.5) * voxel_size_};
}

void VoxelMap::accumulate(const Eigen::Vector3d& world,
                          std::span<const float> embedding, float confidence) {
  if (finalized_) {
    throw StateError("VoxelMap: accumulate after finalize");
  }
  if (!(confidence > 0.f)) {
    throw InvalidArgumentError("VoxelMap: confidence must be > 0");
  }
  if (dim_ == 0) {
    if (embedding.empty()) {
      throw InvalidArgumentError("VoxelMap: empty embedding");
    }
    dim_ = static_cast<int>(embedding.size());
  } else if (static_cast<int>(embedding.size()) != dim_) {
    throw InvalidArgumentError("VoxelMap: embedding dimension " +
                               std::to_string(embedding.size()) +
                               " does not match map dimension " +
                               std::to_string(dim_));
  }
  Accumulator& acc = building_[voxel_of(world, voxel_size_)];
  if (acc.sum.empty()) acc.sum.assign(dim_, 0.0);
  const double c = confidence;
  for (int i = 0; i < dim_; ++i) acc.sum[i] += c * double(embedding[i]);
  acc.mass += c;
}

void VoxelMap::ingest_frame(const PosedFrame& frame,
                            const CameraIntrinsics& intr) {
  if (finalized_) {
    throw StateError("VoxelMap: ingest_frame after finalize");
  }
  for (const Detection& det : frame.detections) {
    const auto visit_pixel = [&](int u, int v) {
      if (u < 0 || u >= frame.depth.width || v < 0 || v >= frame.depth.height)
        return;
      const float d = frame.depth.at(u, v);
      if (d <= 0.f) return;
      accumulate(
          frame.camera_to_world.apply(pixel_to_camera(u, v, d, intr)),
          det.embedding, det.confidence);
    };
    if (det.mask.has_value()) {
      const PixelMask& mask = *det.mask;
      for (int v = 0; v < mask.height(); ++v) {
        for (int u = 0; u < mask.width(); ++u) {
          if (mask.at(u, v)) visit_pixel(u, v);
        }
      }
    } else {
      for (int v = det.bbox.y; v < det.bbox.y + det.bbox.height; ++v) {
        for (int u = det.bbox.x; u < det.bbox.x + det.bbox.width; ++u) {
          visit_pixel(u, v);
        }
      }
    }
  }
}

void VoxelMap::finalize() {
  if (finalized_) {
    throw StateError("VoxelMap: already finalized");
  }
  if (building_.empty()) {
    throw EmptyMapError("VoxelMap: finalize on empty map");
  }
  indices_.reserve(building_.size());
  for (const auto& [idx, acc] : building_) indices_.push_back(idx);
  std::sort(indices_.begin(), indices_.end());

  vectors_.resize(indices_.size() * size_t(dim_));
  masses_.resize(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    const Accumulator& acc = building_.at(indices_[i]);
    for (int j = 0; j < dim_; ++j) {
      vectors_[i * dim_ + j] = static_cast<float>(acc.sum[j] / acc.mass);
    }
    masses_[i] = static_cast<float>(acc.mass);
  }
  building_.clear();
  finalized_ = true;
}

void VoxelMap::require_finalized(const char* op) const {
  if (!finalized_) {
    throw StateError(std::string("VoxelMap: ") + op +
                     " requires a finalized map");
  }
}

double VoxelMap::dot(std::size_t entry, std::span<const float> q) const {
  const float* v = vectors_.data() + entry * dim_;
  double acc = 0.0;
  for (int i = 0; i < dim_; ++i) acc += double(v[i]) * double(q[i]);
  return acc;
}

namespace {

void check_query_embedding(std::span<const float> q, int dim) {
  if (static_cast<int>(q.size()) != dim) {
    throw InvalidArgumentError("query: embedding dimension mismatch");
  }
  double n2 = 0.0;
  for (const float x : q) n2 += double(x) * double(x);
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-4) {
    throw InvalidArgumentError("query: embedding must be unit norm");
  }
}

}  // namespace

std::vector<QueryResult> VoxelMap::query(std::span<const float> embedding,
                                         int k) const {
  require_finalized("query");
  if (indices_.empty()) {
    throw EmptyMapError("VoxelMap: query on empty map");
  }
  if (k < 1) {
    throw InvalidArgumentError("query: k must be >= 1");
  }
  check_query_embedding(embedding, dim_);

  std::vector<std::size_t> order(indices_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<double> scores(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    scores[i] = dot(i, embedding);
  }
  const auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return indices_[a] < indices_[b];  // entries are index-sorted: a < b
  };
  const std::size_t take = std::min<std::size_t>(k, order.size());
  std::partial_sort(order.begin(), order.begin() + take, order.end(), better);

  std::vector<QueryResult> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const std::size_t i = order[r];
    out.push_back(QueryResult{indices_[i], center_of(indices_[i]), scores[i]});
  }
  return out;
}

QueryResult VoxelMap::query_near(std::span<const float> embedding_a,
                                 std::span<const float> embedding_b, int top_a,
                                 int top_b) const {
  if (top_a < 1 || top_b < 1) {
    throw InvalidArgumentError("query_near: candidate counts must be >= 1");
  }
  const std::vector<QueryResult> a_hits = query(embedding_a, top_a);
  const std::vector<QueryResult> b_hits = query(embedding_b, top_b);

  std::size_t best_a = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t ia = 0; ia < a_hits.size(); ++ia) {
    for (std::size_t ib = 0; ib < b_hits.size(); ++ib) {
      const double d2 =
          (a_hits[ia].position - b_hits[ib].position).squaredNorm();
      if (d2 < best_d2) {  // strict: ties keep the lowest (A rank, B rank)
        best_d2 = d2;
        best_a = ia;
      }
    }
  }
  return a_hits[best_a];
}

const std::vector<VoxelIndex>& VoxelMap::indices() const {
  require_finalized("indices");
  return indices_;
}

std::span<const float> VoxelMap::vector_at(std::size_t i) const {
  require_finalized("vector_at");
  return {vectors_.data() + i * dim_, size_t(dim_)};
}

float VoxelMap::mass_at(std::size_t i) const {
  require_finalized("mass_at");
  return masses_[i];
}

void VoxelMap::save(const std::filesystem::path& path) const {
  require_finalized("save");
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ParseError("VoxelMap: cannot open " + path.string() +
                     " for writing");
  }
  ByteWriter w;
  w.u32(kMapFormatVersion);
  w.f64(voxel_size_);
  w.u32(static_cast<std::uint32_t>(dim_));
  w.u64(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    w.i64(indices_[i].x);
    w.i64(indices_[i].y);
    w.i64(indices_[i].z);
    for (int j = 0; j < dim_; ++j) w.f32(vectors_[i * dim_ + j]);
    w.f32(masses_[i]);
  }
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            std::streamsize(w.bytes().size()));
  if (!out) {
    throw ParseError("VoxelMap: short write to " + path.string());
  }
}

VoxelMap VoxelMap::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("VoxelMap: cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  ByteReader r(bytes);
  const std::uint32_t version = r.u32();
  if (version != kMapFormatVersion) {
    throw ParseError("VoxelMap: unsupported format version " +
                     std::to_string(version));
  }
  const double voxel_size = r.f64();
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size)) {
    throw ParseError("VoxelMap: invalid voxel size");
  }
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  if (dim == 0 || dim > 1u << 20) {
    throw ParseError("VoxelMap: invalid embedding dimension");
  }

  VoxelMap map(voxel_size, static_cast<int>(dim));
  map.indices_.resize(count);
  map.vectors_.resize(count * dim);
  map.masses_.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    map.indices_[i].x = r.i64();
    map.indices_[i].y = r.i64();
    map.indices_[i].z = r.i64();
    for (std::uint32_t j = 0; j < dim; ++j) {
      map.vectors_[i * dim + j] = r.f32();
    }
    map.masses_[i] = r.f32();
    if (!(map.masses_[i] > 0.f)) {
      throw ParseError("VoxelMap: entry " + std::to_string(i) +
                       " has non-positive confidence mass");
    }
  }
  if (!r.exhausted()) {
    throw ParseError("VoxelMap: trailing bytes after last entry");
  }
  if (!std::is_sorted(map.indices_.begin(), map.indices_.end())) {
    throw ParseError("VoxelMap: entries are not index-sorted");
  }
  map.finalized_ = true;
  return map;
}

}  // namespace pickdrop
