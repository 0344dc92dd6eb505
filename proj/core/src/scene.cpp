#include "pickdrop/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <nlohmann/json.hpp>

#include "pickdrop/errors.hpp"
#include "pickdrop/rng.hpp"

namespace pickdrop {

namespace {

using nlohmann::json;

json vec3_to_json(const Eigen::Vector3d& v) {
  return json::array({v.x(), v.y(), v.z()});
}

Eigen::Vector3d vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw ParseError("scene: expected a 3-element array");
  }
  return Eigen::Vector3d(j[0].get<double>(), j[1].get<double>(),
                         j[2].get<double>());
}

json item_to_json(const SceneItem& item) {
  return json{{"label", item.label},
              {"center", vec3_to_json(item.center)},
              {"size", vec3_to_json(item.size)}};
}

SceneItem item_from_json(const json& j) {
  return SceneItem{j.at("label"), vec3_from_json(j.at("center")),
                   vec3_from_json(j.at("size"))};
}

}  // namespace

SceneSpec SceneSpec::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("scene spec: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene spec: bad JSON: ") + e.what());
  }
  SceneSpec spec;
  try {
    const auto& room = j.at("room");
    spec.room_width = room.at("width");
    spec.room_depth = room.at("depth");
    if (room.contains("wall_height")) spec.wall_height = room.at("wall_height");
    if (j.contains("frames")) spec.ring_frames = j.at("frames");
    if (j.contains("camera")) {
      const auto& c = j.at("camera");
      spec.camera = CameraIntrinsics{c.at("fx"),    c.at("fy"),
                                     c.at("cx"),    c.at("cy"),
                                     c.at("width"), c.at("height")};
    }
    if (j.contains("robot_start")) {
      const auto& rs = j.at("robot_start");
      spec.robot_start =
          Eigen::Vector2d(rs.at(0).get<double>(), rs.at(1).get<double>());
    }
    for (const auto& rj : j.value("receptacles", json::array())) {
      spec.receptacles.push_back(item_from_json(rj));
    }
    for (const auto& oj : j.value("objects", json::array())) {
      spec.objects.push_back(item_from_json(oj));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("scene spec: malformed: ") + e.what());
  }
  spec.validate();
  return spec;
}

void SceneSpec::save(const std::filesystem::path& path) const {
  json j;
  j["room"] = {{"width", room_width},
               {"depth", room_depth},
               {"wall_height", wall_height}};
  j["frames"] = ring_frames;
  j["camera"] = {{"fx", camera.fx},       {"fy", camera.fy},
                 {"cx", camera.cx},       {"cy", camera.cy},
                 {"width", camera.width}, {"height", camera.height}};
  j["robot_start"] = {robot_start.x(), robot_start.y()};
  json rj = json::array(), oj = json::array();
  for (const SceneItem& item : receptacles) rj.push_back(item_to_json(item));
  for (const SceneItem& item : objects) oj.push_back(item_to_json(item));
  j["receptacles"] = std::move(rj);
  j["objects"] = std::move(oj);
  std::ofstream out(path);
  if (!out) throw ParseError("scene spec: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

void SceneSpec::validate() const {
  if (!(room_width > 0.0) || !(room_depth > 0.0) || !(wall_height > 0.0)) {
    throw InvalidArgumentError("scene spec: non-positive room extent");
  }
  if (!camera.valid()) {
    throw InvalidArgumentError("scene spec: invalid camera intrinsics");
  }
  if (ring_frames < 4) {
    throw InvalidArgumentError("scene spec: need at least 4 ring frames");
  }
  const auto check = [&](const SceneItem& item) {
    const Eigen::Vector3d lo = item.center - item.size / 2.0;
    const Eigen::Vector3d hi = item.center + item.size / 2.0;
    if (item.label.empty()) {
      throw InvalidArgumentError("scene spec: item without label");
    }
    if (!(item.size.minCoeff() > 0.0)) {
      throw InvalidArgumentError("scene spec: item \"" + item.label +
                                 "\" has non-positive size");
    }
    if (lo.x() < 0.0 || lo.y() < 0.0 || lo.z() < -1e-9 ||
        hi.x() > room_width || hi.y() > room_depth || hi.z() > wall_height) {
      throw InvalidArgumentError("scene spec: item \"" + item.label +
                                 "\" lies outside the room extent");
    }
  };
  for (const SceneItem& item : receptacles) check(item);
  for (const SceneItem& item : objects) check(item);
}

SceneSpec sample_scene(int variant) {
  // Deterministic family of rooms: one table with an object on top, one
  // floor-standing receptacle, one distractor object on the floor.
  SplitMix64 rng(0xa5cede5cULL + std::uint64_t(variant) * 7919);
  SceneSpec spec;
  spec.room_width = 4.6 + 0.8 * rng.uniform();
  spec.room_depth = 3.8 + 0.8 * rng.uniform();
  spec.ring_frames = 36;

  static const char* kPickLabels[] = {"mug",    "bottle", "apple",
                                      "banana", "cup",    "toy"};
  static const char* kDropLabels[] = {"sink", "box", "basket", "bin"};
  const std::string pick = kPickLabels[variant % 6];
  const std::string drop = kDropLabels[variant % 4];
  const std::string decoy = kPickLabels[(variant + 2) % 6];

  const double table_h = 0.72 + 0.06 * rng.uniform();
  const double tx = 0.9 + rng.uniform() * (spec.room_width - 2.2);
  const double ty = spec.room_depth - 1.0;
  spec.receptacles.push_back(
      SceneItem{"table", {tx, ty, table_h / 2}, {1.0, 0.6, table_h}});

  const double sx = spec.room_width - 0.9;
  const double sy = 0.9;
  spec.receptacles.push_back(
      SceneItem{drop, {sx, sy, 0.35}, {0.55, 0.55, 0.7}});

  // Pick object on the table, decoy on the floor far from it.
  spec.objects.push_back(SceneItem{
      pick, {tx - 0.2, ty + 0.1, table_h + 0.045}, {0.07, 0.07, 0.09}});
  spec.objects.push_back(
      SceneItem{decoy, {0.9, spec.room_depth - 0.8, 0.05}, {0.1, 0.1, 0.1}});

  spec.robot_start = {0.8 + 0.3 * rng.uniform(), 0.8 + 0.3 * rng.uniform()};
  spec.validate();
  return spec;
}

void GroundTruth::save(const std::filesystem::path& path) const {
  json items_json = json::array();
  for (const Item& item : items) {
    items_json.push_back(json{{"label", item.label},
                              {"kind", item.kind},
                              {"center", vec3_to_json(item.center)},
                              {"size", vec3_to_json(item.size)},
                              {"voxel",
                               {item.voxel.x, item.voxel.y, item.voxel.z}}});
  }
  json j{{"robot_start", {robot_start.x(), robot_start.y()}},
         {"items", std::move(items_json)}};
  std::ofstream out(path);
  if (!out) throw ParseError("ground truth: cannot open " + path.string());
  out << j.dump(2) << '\n';
}

GroundTruth GroundTruth::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("ground truth: cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("ground truth: bad JSON: ") + e.what());
  }
  GroundTruth gt;
  gt.robot_start =
      Eigen::Vector2d(j.at("robot_start").at(0).get<double>(),
                      j.at("robot_start").at(1).get<double>());
  for (const auto& ij : j.at("items")) {
    Item item;
    item.label = ij.at("label");
    item.kind = ij.at("kind");
    item.center = vec3_from_json(ij.at("center"));
    item.size = vec3_from_json(ij.at("size"));
    item.voxel = VoxelIndex{ij.at("voxel").at(0).get<std::int64_t>(),
                            ij.at("voxel").at(1).get<std::int64_t>(),
                            ij.at("voxel").at(2).get<std::int64_t>()};
    gt.items.push_back(std::move(item));
  }
  return gt;
}

SyntheticScene::SyntheticScene(const SceneSpec& spec) : spec_(spec) {
  spec_.validate();
  const double w = spec_.room_width, d = spec_.room_depth;
  const double h = spec_.wall_height, t = 0.1;

  labels_.push_back("floor");  // solid 0, rendered as a bounded plane
  boxes_.emplace_back();
  object_index_.push_back(-1);
  floor_solid_ = 0;

  const auto add_box = [&](const std::string& label, const Eigen::Vector3d& lo,
                           const Eigen::Vector3d& hi, int object_idx) {
    labels_.push_back(label);
    boxes_.emplace_back(lo, hi);
    object_index_.push_back(object_idx);
  };
  add_box("wall", {-t, -t, 0}, {w + t, 0, h}, -1);
  add_box("wall", {-t, d, 0}, {w + t, d + t, h}, -1);
  add_box("wall", {-t, 0, 0}, {0, d, h}, -1);
  add_box("wall", {w, 0, 0}, {w + t, d, h}, -1);
  for (const SceneItem& item : spec_.receptacles) {
    add_box(item.label, item.center - item.size / 2, item.center + item.size / 2,
            -1);
  }
  for (std::size_t i = 0; i < spec_.objects.size(); ++i) {
    const SceneItem& item = spec_.objects[i];
    add_box(item.label, item.center - item.size / 2, item.center + item.size / 2,
            static_cast<int>(i));
  }
}

int SyntheticScene::solid_by_label(const std::string& label) const {
  // Items first so an object named like a structure wins.
  for (int s = solid_count() - 1; s >= 0; --s) {
    if (labels_[s] == label) return s;
  }
  return -1;
}

namespace {

// Slab-method ray/box intersection; returns the entry parameter or nullopt.
std::optional<double> ray_box(const Eigen::Vector3d& origin,
                              const Eigen::Vector3d& dir,
                              const Eigen::AlignedBox3d& box) {
  double t_lo = 0.0, t_hi = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] == 0.0) {
      if (origin[a] < box.min()[a] || origin[a] > box.max()[a]) {
        return std::nullopt;
      }
      continue;
    }
    double t0 = (box.min()[a] - origin[a]) / dir[a];
    double t1 = (box.max()[a] - origin[a]) / dir[a];
    if (t0 > t1) std::swap(t0, t1);
    t_lo = std::max(t_lo, t0);
    t_hi = std::min(t_hi, t1);
    if (t_lo > t_hi) return std::nullopt;
  }
  return t_lo;
}

}  // namespace

SyntheticScene::RenderedView SyntheticScene::render(
    const CameraIntrinsics& intr, const Pose& camera_to_world) const {
  RenderedView view;
  view.depth = DepthImage(intr.width, intr.height);
  view.owner.assign(std::size_t(intr.width) * intr.height, -1);

  constexpr double kNear = 0.05, kFar = 15.0;
  const Eigen::Vector3d origin = camera_to_world.translation;
  for (int v = 0; v < intr.height; ++v) {
    for (int u = 0; u < intr.width; ++u) {
      const Eigen::Vector3d dir =
          camera_to_world.rotation * pixel_to_camera(u, v, 1.0, intr);
      double best_t = kFar;
      int best_solid = -1;
      // floor plane z = 0 bounded to the room rectangle
      if (dir.z() != 0.0) {
        const double t = -origin.z() / dir.z();
        if (t > kNear && t < best_t) {
          const Eigen::Vector3d p = origin + t * dir;
          if (p.x() >= 0.0 && p.x() <= spec_.room_width && p.y() >= 0.0 &&
              p.y() <= spec_.room_depth) {
            best_t = t;
            best_solid = floor_solid_;
          }
        }
      }
      for (int s = 1; s < solid_count(); ++s) {
        const auto t = ray_box(origin, dir, boxes_[s]);
        if (t && *t > kNear && *t < best_t) {
          best_t = *t;
          best_solid = s;
        }
      }
      if (best_solid >= 0) {
        view.depth.at(u, v) = static_cast<float>(best_t);
        view.owner[std::size_t(v) * intr.width + u] = best_solid;
      }
    }
  }
  return view;
}

PixelMask SyntheticScene::mask_for(const RenderedView& view, int solid) const {
  PixelMask mask(view.depth.width, view.depth.height);
  for (int v = 0; v < view.depth.height; ++v) {
    for (int u = 0; u < view.depth.width; ++u) {
      if (view.owner[std::size_t(v) * view.depth.width + u] == solid) {
        mask.set(u, v);
      }
    }
  }
  return mask;
}

Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target) {
  const Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d right = forward.cross(Eigen::Vector3d::UnitZ());
  if (right.norm() < 1e-9) right = Eigen::Vector3d::UnitX();  // looking down
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  Pose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = down;
  pose.rotation.col(2) = forward;
  pose.translation = eye;
  return pose;
}

ScanArchive generate_scan(const SceneSpec& spec, std::uint64_t seed,
                          const EmbeddingProvider& embedder,
                          GroundTruth* ground_truth) {
  const SyntheticScene scene(spec);
  const Eigen::Vector3d room_center{spec.room_width / 2, spec.room_depth / 2,
                                    0.0};

  std::vector<Pose> poses;
  // Ring sweep: alternate between an inner position looking outward and an
  // outer position looking inward, so both the room border and the interior
  // floor get depth coverage.
  const double rx = std::max(0.4, spec.room_width / 2 - 0.6);
  const double ry = std::max(0.4, spec.room_depth / 2 - 0.6);
  for (int i = 0; i < spec.ring_frames; ++i) {
    const double angle = 2.0 * M_PI * double(i) / spec.ring_frames;
    const Eigen::Vector3d dir{std::cos(angle), std::sin(angle), 0.0};
    Eigen::Vector3d eye, target;
    if (i % 2 == 0) {
      eye = room_center + 0.30 * Eigen::Vector3d(rx * dir.x(), ry * dir.y(), 0);
      target =
          room_center + 1.05 * Eigen::Vector3d(rx * dir.x(), ry * dir.y(), 0);
    } else {
      eye = room_center + 0.85 * Eigen::Vector3d(rx * dir.x(), ry * dir.y(), 0);
      target =
          room_center - 0.55 * Eigen::Vector3d(rx * dir.x(), ry * dir.y(), 0);
    }
    eye.z() = 1.5;
    target.z() = 0.0;
    poses.push_back(look_at(eye, target));
  }
  // Close-ups: four oblique views of every labeled item.
  const auto add_closeups = [&](const SceneItem& item) {
    for (int k = 0; k < 4; ++k) {
      const double angle = M_PI / 4 + k * M_PI / 2;
      Eigen::Vector3d eye = item.center + Eigen::Vector3d(std::cos(angle),
                                                          std::sin(angle), 0) *
                                              1.1;
      eye.z() = item.center.z() + item.size.z() / 2 + 0.7;
      eye.x() = std::clamp(eye.x(), 0.25, spec.room_width - 0.25);
      eye.y() = std::clamp(eye.y(), 0.25, spec.room_depth - 0.25);
      poses.push_back(look_at(eye, item.center));
    }
  };
  for (const SceneItem& item : spec.receptacles) add_closeups(item);
  for (const SceneItem& item : spec.objects) add_closeups(item);

  ScanArchive archive;
  archive.intrinsics = spec.camera;
  archive.embedding_dim = embedder.dim();

  constexpr int kMinPixels = 30;
  for (std::size_t fi = 0; fi < poses.size(); ++fi) {
    PosedFrame frame;
    frame.camera_to_world = poses[fi];
    const SyntheticScene::RenderedView view =
        scene.render(spec.camera, poses[fi]);
    frame.depth = view.depth;
    for (int s = 0; s < scene.solid_count(); ++s) {
      PixelMask mask = scene.mask_for(view, s);
      if (mask.count() < kMinPixels) continue;
      Detection det;
      det.label = scene.label_of(s);
      det.bbox = mask.bounding_box();
      det.mask = std::move(mask);
      det.embedding = embedder.embed_text(det.label);
      SplitMix64 rng(seed ^ (fi * 1000003ULL + std::uint64_t(s)));
      det.confidence = static_cast<float>(rng.uniform(0.6, 0.95));
      frame.detections.push_back(std::move(det));
    }
    archive.frames.push_back(std::move(frame));
  }

  if (ground_truth) {
    ground_truth->items.clear();
    ground_truth->robot_start = spec.robot_start;
    const auto add_item = [&](const SceneItem& item, const char* kind) {
      ground_truth->items.push_back(GroundTruth::Item{
          item.label, kind, item.center, item.size,
          voxel_of(item.center, 0.05)});
    };
    for (const SceneItem& item : spec.objects) add_item(item, "object");
    for (const SceneItem& item : spec.receptacles) {
      add_item(item, "receptacle");
    }
  }
  return archive;
}

DepthImage SceneDepthCamera::capture(const CameraIntrinsics& intr,
                                     const Pose& camera_to_world) const {
  return scene_->render(intr, camera_to_world).depth;
}

std::optional<PixelMask> SceneSegmenter::segment(
    const std::string& query, const CameraIntrinsics& intr,
    const Pose& camera_to_world) const {
  const int solid = scene_->solid_by_label(query);
  if (solid < 0) return std::nullopt;
  PixelMask mask =
      scene_->mask_for(scene_->render(intr, camera_to_world), solid);
  if (mask.count() == 0) return std::nullopt;
  return mask;
}

std::vector<GraspProposal> SceneGraspProvider::propose(
    const Eigen::Vector3d& focus) const {
  // Nearest scene object to the focus point.
  int best = -1;
  double best_d2 = 0.6 * 0.6;
  const auto& objects = scene_->spec().objects;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const double d2 = (objects[i].center - focus).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = static_cast<int>(i);
    }
  }
  if (best < 0) return {};

  const SceneItem& object = objects[best];
  SplitMix64 rng(seed_ ^ fnv1a64(object.label) ^ std::uint64_t(best));
  std::vector<GraspProposal> proposals;
  for (int k = 0; k < 8; ++k) {  // horizontal approaches around the object
    const double angle = 2.0 * M_PI * k / 8.0;
    GraspProposal g;
    g.point = object.center;
    g.approach = {std::cos(angle), std::sin(angle), 0.0};
    g.width = object.size.x();
    g.height = 0.02;
    g.depth = 0.04;
    g.graspness = rng.uniform(0.45, 0.9);
    proposals.push_back(g);
  }
  for (int k = 0; k < 2; ++k) {  // top-down approaches
    GraspProposal g;
    g.point = object.center;
    g.approach = -Eigen::Vector3d::UnitZ();
    g.width = object.size.x();
    g.height = 0.02;
    g.depth = 0.04;
    g.graspness = rng.uniform(0.45, 0.9);
    proposals.push_back(g);
  }
  for (int k = 0; k < 4; ++k) {  // floating distractors, must be filtered out
    const double angle = M_PI / 4 + k * M_PI / 2;
    GraspProposal g;
    g.point = focus + Eigen::Vector3d(0.45 * std::cos(angle),
                                      0.45 * std::sin(angle), 0.25);
    g.approach = {std::cos(angle), std::sin(angle), 0.0};
    g.width = 0.05;
    g.height = 0.02;
    g.depth = 0.04;
    g.graspness = rng.uniform(0.9, 0.99);
    proposals.push_back(g);
  }
  return proposals;
}

}  // namespace pickdrop
