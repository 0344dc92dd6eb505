#include "pickdrop/scan_archive.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "pickdrop/errors.hpp"

namespace pickdrop {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

void append_f32_block(std::vector<std::uint8_t>& payload,
                      const std::vector<float>& values) {
  const std::size_t begin = payload.size();
  payload.resize(begin + values.size() * 4);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(payload.data() + begin, values.data(), values.size() * 4);
  } else {
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, &values[i], 4);
      for (int b = 0; b < 4; ++b) {
        payload[begin + i * 4 + b] = std::uint8_t(bits >> (8 * b));
      }
    }
  }
}

std::vector<float> read_f32_block(const std::vector<std::uint8_t>& payload,
                                  std::uint64_t offset, std::uint64_t count,
                                  const std::string& what) {
  if (offset % 4 != 0) {
    throw ParseError(what + ": misaligned payload offset");
  }
  if (offset + count * 4 > payload.size()) {
    throw ParseError(what + ": truncated payload");
  }
  std::vector<float> values(count);
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(values.data(), payload.data() + offset, count * 4);
  } else {
    for (std::uint64_t i = 0; i < count; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) {
        bits |= std::uint32_t(payload[offset + i * 4 + b]) << (8 * b);
      }
      std::memcpy(&values[i], &bits, 4);
    }
  }
  return values;
}

json pose_to_json(const Pose& pose) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
  }
  return json{{"rotation", rot},
              {"translation",
               {pose.translation.x(), pose.translation.y(),
                pose.translation.z()}}};
}

Pose pose_from_json(const json& j, const std::string& what) {
  const auto& rot = j.at("rotation");
  const auto& tr = j.at("translation");
  if (rot.size() != 9 || tr.size() != 3) {
    throw ParseError(what + ": pose must have 9 rotation + 3 translation "
                            "entries");
  }
  Pose pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rot[r * 3 + c];
  }
  for (int i = 0; i < 3; ++i) pose.translation(i) = tr[i];
  if (!pose.is_rigid(1e-6)) {
    throw ParseError(what + ": pose rotation is not orthonormal");
  }
  return pose;
}

void validate_embedding(const std::vector<float>& e, const std::string& what) {
  double n2 = 0.0;
  for (const float x : e) {
    if (!std::isfinite(x)) throw ParseError(what + ": non-finite embedding");
    n2 += double(x) * double(x);
  }
  if (std::abs(std::sqrt(n2) - 1.0) > 1e-4) {
    throw ParseError(what + ": embedding is not unit norm");
  }
}

}  // namespace

void ScanArchive::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);

  std::vector<std::uint8_t> payload;
  json frames_json = json::array();
  for (const PosedFrame& frame : frames) {
    json fj;
    fj["pose"] = pose_to_json(frame.camera_to_world);
    fj["depth"] = {{"offset", payload.size()},
                   {"count", frame.depth.values.size()}};
    append_f32_block(payload, frame.depth.values);
    if (!frame.color_ref.empty()) fj["color_ref"] = frame.color_ref;
    json dets = json::array();
    for (const Detection& det : frame.detections) {
      json dj;
      dj["label"] = det.label;
      dj["bbox"] = {det.bbox.x, det.bbox.y, det.bbox.width, det.bbox.height};
      if (det.mask) {
        dj["mask_rle"] = det.mask->to_rle();
      } else {
        dj["mask_rle"] = nullptr;
      }
      dj["embedding"] = {{"offset", payload.size()},
                         {"count", det.embedding.size()}};
      append_f32_block(payload, det.embedding);
      dj["confidence"] = det.confidence;
      dets.push_back(std::move(dj));
    }
    fj["detections"] = std::move(dets);
    frames_json.push_back(std::move(fj));
  }

  json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["embedding_dim"] = embedding_dim;
  manifest["frame_count"] = frames.size();
  manifest["intrinsics"] = {{"fx", intrinsics.fx},   {"fy", intrinsics.fy},
                            {"cx", intrinsics.cx},   {"cy", intrinsics.cy},
                            {"width", intrinsics.width},
                            {"height", intrinsics.height}};
  manifest["frames"] = std::move(frames_json);

  {
    std::ofstream out(dir / "manifest.json");
    if (!out) {
      throw ParseError("save scan: cannot open " +
                       (dir / "manifest.json").string());
    }
    out << manifest.dump(2) << '\n';
  }
  {
    std::ofstream out(dir / "payload.bin", std::ios::binary);
    if (!out) {
      throw ParseError("save scan: cannot open " +
                       (dir / "payload.bin").string());
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              std::streamsize(payload.size()));
    if (!out) throw ParseError("save scan: short payload write");
  }
}

ScanArchive ScanArchive::load(const std::filesystem::path& dir) {
  json manifest;
  {
    std::ifstream in(dir / "manifest.json");
    if (!in) {
      throw ParseError("load scan: cannot open " +
                       (dir / "manifest.json").string());
    }
    try {
      in >> manifest;
    } catch (const json::exception& e) {
      throw ParseError(std::string("load scan: manifest is not valid JSON: ") +
                       e.what());
    }
  }
  std::vector<std::uint8_t> payload;
  {
    std::ifstream in(dir / "payload.bin", std::ios::binary);
    if (!in) {
      throw ParseError("load scan: cannot open " +
                       (dir / "payload.bin").string());
    }
    payload.assign(std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>());
  }

  ScanArchive archive;
  try {
    const int version = manifest.at("format_version");
    if (version != kFormatVersion) {
      throw ParseError("load scan: unsupported format version " +
                       std::to_string(version));
    }
    archive.embedding_dim = manifest.at("embedding_dim");
    if (archive.embedding_dim <= 0) {
      throw ParseError("load scan: embedding_dim must be positive");
    }
    const auto& ij = manifest.at("intrinsics");
    archive.intrinsics = CameraIntrinsics{ij.at("fx"),    ij.at("fy"),
                                          ij.at("cx"),    ij.at("cy"),
                                          ij.at("width"), ij.at("height")};
    if (!archive.intrinsics.valid()) {
      throw ParseError("load scan: invalid intrinsics");
    }
    const std::size_t frame_count = manifest.at("frame_count");
    const auto& frames_json = manifest.at("frames");
    if (frames_json.size() != frame_count) {
      throw ParseError("load scan: frame_count " +
                       std::to_string(frame_count) + " does not match " +
                       std::to_string(frames_json.size()) + " frame records");
    }

    const int w = archive.intrinsics.width;
    const int h = archive.intrinsics.height;
    archive.frames.reserve(frame_count);
    for (std::size_t fi = 0; fi < frame_count; ++fi) {
      const std::string what = "load scan: frame " + std::to_string(fi);
      const json& fj = frames_json[fi];
      PosedFrame frame;
      frame.camera_to_world = pose_from_json(fj.at("pose"), what);

      const auto& dj = fj.at("depth");
      const std::uint64_t count = dj.at("count");
      if (count != std::uint64_t(w) * h) {
        throw ParseError(what + ": depth count does not match intrinsics");
      }
      frame.depth.width = w;
      frame.depth.height = h;
      frame.depth.values =
          read_f32_block(payload, dj.at("offset"), count, what + " depth");
      for (const float d : frame.depth.values) {
        if (!std::isfinite(d) || d < 0.f) {
          throw ParseError(what + ": depth values must be finite and >= 0");
        }
      }
      if (fj.contains("color_ref")) frame.color_ref = fj.at("color_ref");

      for (const json& det_json : fj.at("detections")) {
        Detection det;
        det.label = det_json.at("label");
        const auto& bb = det_json.at("bbox");
        if (bb.size() != 4) throw ParseError(what + ": bbox must have 4 ints");
        det.bbox = PixelBox{bb[0], bb[1], bb[2], bb[3]};
        if (det.bbox.x < 0 || det.bbox.y < 0 || det.bbox.empty() ||
            det.bbox.x + det.bbox.width > w ||
            det.bbox.y + det.bbox.height > h) {
          throw ParseError(what + ": bbox outside image bounds");
        }
        if (!det_json.at("mask_rle").is_null()) {
          try {
            det.mask = PixelMask::from_rle(
                w, h, det_json.at("mask_rle").get<std::vector<std::uint32_t>>());
          } catch (const ParseError& e) {
            throw ParseError(what + ": " + e.what());
          }
          // mask must be contained in the bbox
          const PixelBox mb = det.mask->bounding_box();
          if (!mb.empty() &&
              (mb.x < det.bbox.x || mb.y < det.bbox.y ||
               mb.x + mb.width > det.bbox.x + det.bbox.width ||
               mb.y + mb.height > det.bbox.y + det.bbox.height)) {
            throw ParseError(what + ": mask escapes its bounding box");
          }
        }
        const auto& ej = det_json.at("embedding");
        const std::uint64_t ecount = ej.at("count");
        if (ecount != std::uint64_t(archive.embedding_dim)) {
          throw ParseError(what + ": detection embedding has dimension " +
                           std::to_string(ecount) + ", archive expects " +
                           std::to_string(archive.embedding_dim));
        }
        det.embedding = read_f32_block(payload, ej.at("offset"), ecount,
                                       what + " embedding");
        validate_embedding(det.embedding, what);
        det.confidence = det_json.at("confidence");
        if (!(det.confidence > 0.f) || det.confidence > 1.f) {
          throw ParseError(what + ": confidence must be in (0, 1]");
        }
        frame.detections.push_back(std::move(det));
      }
      archive.frames.push_back(std::move(frame));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("load scan: malformed manifest: ") +
                     e.what());
  }
  return archive;
}

}  // namespace pickdrop
