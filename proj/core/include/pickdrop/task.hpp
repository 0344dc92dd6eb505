#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "pickdrop/dropping.hpp"
#include "pickdrop/grasping.hpp"
#include "pickdrop/navigation.hpp"
#include "pickdrop/providers.hpp"
#include "pickdrop/voxel_map.hpp"

namespace pickdrop {

// "Pick up A (from B) and drop it on/in C".
struct TaskSpec {
  std::string pick_query;                 // A
  std::optional<std::string> from_query;  // B; triggers the "A near B" query
  std::string drop_query;                 // C
};

// The fixed, recovery-free stage sequence. A failed stage terminates the
// task; later stages never run.
enum class Stage {
  NavigateToObject = 0,
  Grasp = 1,
  NavigateToGoal = 2,
  Drop = 3,
};
const char* stage_name(Stage stage);

// Structured trace of one pick-and-drop run. Artifacts are only present for
// stages that executed.
struct TaskReport {
  TaskSpec task;

  // navigate-to-object
  std::optional<QueryResult> object_hit;
  std::optional<NavTarget> object_nav;
  std::optional<Path> object_path;
  // grasp
  std::optional<int> proposal_count;
  std::optional<int> kept_count;
  std::optional<RankedGrasp> grasp;
  std::optional<GraspTrajectory> trajectory;
  // navigate-to-goal
  std::optional<QueryResult> goal_hit;
  std::optional<NavTarget> goal_nav;
  std::optional<Path> goal_path;
  // drop
  std::optional<DropPoint> drop;

  std::optional<Stage> failed_stage;
  std::string failure_reason;

  bool ok() const { return !failed_stage.has_value(); }

  nlohmann::json to_json() const;
  std::string to_text() const;  // dump(2) of to_json, deterministic
};

struct ProviderSet {
  const EmbeddingProvider* embedder = nullptr;
  const GraspProvider* grasps = nullptr;
  const SegmentationProvider* segmenter = nullptr;
  const DepthCameraProvider* camera = nullptr;
};

struct RunOptions {
  Eigen::Vector2d start{0.0, 0.0};  // robot standing position at task start
  double camera_height = 1.2;       // head camera height above the floor
  CameraIntrinsics camera{160.0, 160.0, 128.0, 96.0, 256, 192};
  double similarity_floor = 0.0;  // > 0 enables the navigation-failure filter
  int near_top_a = 10;            // candidate counts for "A near B"
  int near_top_b = 50;
  double path_lambda = 1.0;  // obstacle penalty weight in path costs
};

// Executes the linear chain
//   navigate-to-object -> grasp -> navigate-to-goal -> drop
// over a finalized map and an inflated grid. Every stage records its
// artifacts; the first failure ends the run with that stage named. No
// exception escapes: provider and module errors surface as stage failures.
TaskReport run_task(const VoxelMap& map, const ObstacleGrid& grid,
                    const TaskSpec& task, const ProviderSet& providers,
                    const RunOptions& options = {});

}  // namespace pickdrop
