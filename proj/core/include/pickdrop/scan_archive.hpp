#pragma once

#include <filesystem>
#include <vector>

#include "pickdrop/frame.hpp"
#include "pickdrop/geometry.hpp"

namespace pickdrop {

// A recorded scan: shared camera intrinsics plus an ordered sequence of
// posed RGB-D frames with attached detections.
//
// On disk an archive is a directory of two files:
//   manifest.json  UTF-8 JSON: format version, intrinsics, embedding
//                  dimension, frame count, and per-frame records (pose as
//                  row-major rotation + translation, payload references,
//                  detections with run-length-encoded masks).
//   payload.bin    little-endian float32 blocks (depth images and detection
//                  embeddings) referenced from the manifest by byte offset.
//
// save/load round trip bit-exactly.
struct ScanArchive {
  CameraIntrinsics intrinsics;
  int embedding_dim = 0;
  std::vector<PosedFrame> frames;

  void save(const std::filesystem::path& dir) const;
  static ScanArchive load(const std::filesystem::path& dir);
};

}  // namespace pickdrop
