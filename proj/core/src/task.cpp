#include "pickdrop/task.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "pickdrop/errors.hpp"
#include "pickdrop/scene.hpp"

namespace pickdrop {

namespace {

using nlohmann::json;

json vec_to_json(const Eigen::Vector2d& v) { return json::array({v.x(), v.y()}); }
json vec_to_json(const Eigen::Vector3d& v) {
  return json::array({v.x(), v.y(), v.z()});
}

json query_to_json(const QueryResult& q) {
  return json{{"voxel", {q.voxel.x, q.voxel.y, q.voxel.z}},
              {"position", vec_to_json(q.position)},
              {"similarity", q.similarity}};
}

json nav_to_json(const NavTarget& t) {
  return json{{"position", vec_to_json(t.position)},
              {"heading", vec_to_json(t.heading)},
              {"score", t.score},
              {"cell", {t.cell.row, t.cell.col}}};
}

json path_to_json(const Path& path) {
  json out = json::array();
  for (const GridCell& c : path) out.push_back(json::array({c.row, c.col}));
  return out;
}

json grasp_to_json(const RankedGrasp& g) {
  return json{{"point", vec_to_json(g.proposal.point)},
              {"approach", vec_to_json(g.proposal.approach)},
              {"width", g.proposal.width},
              {"height", g.proposal.height},
              {"depth", g.proposal.depth},
              {"graspness", g.proposal.graspness},
              {"theta", g.theta},
              {"heuristic_score", g.heuristic_score},
              {"input_index", g.input_index}};
}

}  // namespace

const char* stage_name(Stage stage) {
  switch (stage) {
    case Stage::NavigateToObject:
      return "navigate-to-object";
    case Stage::Grasp:
      return "grasp";
    case Stage::NavigateToGoal:
      return "navigate-to-goal";
    case Stage::Drop:
      return "drop";
  }
  return "unknown";
}

json TaskReport::to_json() const {
  json stages = json::array();
  const auto stage_entry = [&](Stage stage) {
    json e;
    e["name"] = stage_name(stage);
    e["ok"] = !(failed_stage && *failed_stage == stage);
    if (failed_stage && *failed_stage == stage) e["error"] = failure_reason;
    return e;
  };
  const auto ran = [&](Stage stage) {
    return !failed_stage || int(*failed_stage) >= int(stage);
  };

  if (ran(Stage::NavigateToObject)) {
    json e = stage_entry(Stage::NavigateToObject);
    if (object_hit) e["query"] = query_to_json(*object_hit);
    if (object_nav) e["nav_target"] = nav_to_json(*object_nav);
    if (object_path) e["path"] = path_to_json(*object_path);
    stages.push_back(std::move(e));
  }
  if (ran(Stage::Grasp)) {
    json e = stage_entry(Stage::Grasp);
    if (proposal_count) e["proposals"] = *proposal_count;
    if (kept_count) e["kept"] = *kept_count;
    if (grasp) e["grasp"] = grasp_to_json(*grasp);
    if (trajectory) {
      json wp = json::array();
      for (const Eigen::Vector3d& p : trajectory->waypoints) {
        wp.push_back(vec_to_json(p));
      }
      e["trajectory"] = std::move(wp);
    }
    stages.push_back(std::move(e));
  }
  if (ran(Stage::NavigateToGoal)) {
    json e = stage_entry(Stage::NavigateToGoal);
    if (goal_hit) e["query"] = query_to_json(*goal_hit);
    if (goal_nav) e["nav_target"] = nav_to_json(*goal_nav);
    if (goal_path) e["path"] = path_to_json(*goal_path);
    stages.push_back(std::move(e));
  }
  if (ran(Stage::Drop)) {
    json e = stage_entry(Stage::Drop);
    if (drop) e["drop_point"] = json::array({drop->x, drop->y, drop->z});
    stages.push_back(std::move(e));
  }

  json j;
  j["task"] = {{"pick", task.pick_query},
               {"from", task.from_query ? json(*task.from_query) : json()},
               {"drop", task.drop_query}};
  j["ok"] = ok();
  j["failed_stage"] = failed_stage ? json(stage_name(*failed_stage)) : json();
  j["stages"] = std::move(stages);
  return j;
}

std::string TaskReport::to_text() const { return to_json().dump(2) + "\n"; }

namespace {

// Shared by both navigation stages: retrieve, pick a standing cell, plan.
struct NavOutcome {
  QueryResult hit;
  NavTarget target;
  Path path;
};

NavOutcome navigate(const VoxelMap& map, const ObstacleGrid& grid,
                    const std::string& query,
                    const std::optional<std::string>& near_query,
                    const EmbeddingProvider& embedder, GridCell start_cell,
                    const RunOptions& options) {
  const std::vector<float> q = embedder.embed_text(query);
  QueryResult hit;
  if (near_query) {
    hit = map.query_near(q, embedder.embed_text(*near_query),
                         options.near_top_a, options.near_top_b);
  } else {
    hit = map.query(q, 1).front();
  }
  if (options.similarity_floor > 0.0 &&
      hit.similarity < options.similarity_floor) {
    throw UnreachableTargetError(
        "query \"" + query + "\" best similarity " +
        std::to_string(hit.similarity) + " is below the floor " +
        std::to_string(options.similarity_floor));
  }
  NavOutcome out;
  out.hit = hit;
  out.target =
      select_nav_target(grid, Eigen::Vector2d{hit.position.x(),
                                              hit.position.y()});
  out.path = plan_path(grid, start_cell, out.target.cell, options.path_lambda);
  return out;
}

Pose head_camera_pose(const Eigen::Vector2d& standing, double camera_height,
                      const Eigen::Vector3d& look_target) {
  return look_at({standing.x(), standing.y(), camera_height}, look_target);
}

}  // namespace

TaskReport run_task(const VoxelMap& map, const ObstacleGrid& grid,
                    const TaskSpec& task, const ProviderSet& providers,
                    const RunOptions& options) {
  TaskReport report;
  report.task = task;

  if (!providers.embedder || !providers.grasps || !providers.segmenter ||
      !providers.camera) {
    report.failed_stage = Stage::NavigateToObject;
    report.failure_reason = "incomplete provider set";
    return report;
  }

  const auto fail = [&](Stage stage, const std::string& reason) {
    report.failed_stage = stage;
    report.failure_reason = reason;
    return report;
  };

  // navigate-to-object
  try {
    const GridCell start_cell = grid.cell_at(options.start);
    if (!grid.in_bounds(start_cell)) {
      throw InvalidArgumentError("start position is outside the grid");
    }
    const NavOutcome nav =
        navigate(map, grid, task.pick_query, task.from_query,
                 *providers.embedder, start_cell, options);
    report.object_hit = nav.hit;
    report.object_nav = nav.target;
    report.object_path = nav.path;
  } catch (const std::exception& e) {
    return fail(Stage::NavigateToObject, e.what());
  }

  // grasp
  try {
    const Pose view = head_camera_pose(report.object_nav->position,
                                       options.camera_height,
                                       report.object_hit->position);
    const auto mask =
        providers.segmenter->segment(task.pick_query, options.camera, view);
    if (!mask) {
      throw NoGraspError("segmentation found no \"" + task.pick_query +
                         "\" in the robot view");
    }
    const std::vector<GraspProposal> proposals =
        providers.grasps->propose(report.object_hit->position);
    report.proposal_count = static_cast<int>(proposals.size());
    const std::vector<GraspProposal> kept =
        filter_by_mask(proposals, *mask, options.camera, view);
    report.kept_count = static_cast<int>(kept.size());
    if (kept.empty()) {
      throw NoGraspError("no grasp proposal projects into the object mask");
    }
    report.grasp = rank_grasps(kept).front();
    report.trajectory = pregrasp_trajectory(report.grasp->proposal);
  } catch (const std::exception& e) {
    return fail(Stage::Grasp, e.what());
  }

  // navigate-to-goal
  try {
    const NavOutcome nav =
        navigate(map, grid, task.drop_query, std::nullopt,
                 *providers.embedder, report.object_nav->cell, options);
    report.goal_hit = nav.hit;
    report.goal_nav = nav.target;
    report.goal_path = nav.path;
  } catch (const std::exception& e) {
    return fail(Stage::NavigateToGoal, e.what());
  }

  // drop
  try {
    const Pose view = head_camera_pose(report.goal_nav->position,
                                       options.camera_height,
                                       report.goal_hit->position);
    const auto mask =
        providers.segmenter->segment(task.drop_query, options.camera, view);
    if (!mask) {
      throw NoReceptacleError("segmentation found no \"" + task.drop_query +
                              "\" in the robot view");
    }
    const DepthImage depth = providers.camera->capture(options.camera, view);
    PointCloud receptacle;
    for (int v = 0; v < depth.height; ++v) {
      for (int u = 0; u < depth.width; ++u) {
        if (!mask->at(u, v) || !depth.valid_at(u, v)) continue;
        receptacle.points.push_back(
            view.apply(pixel_to_camera(u, v, depth.at(u, v), options.camera)));
      }
    }
    const AlignedCloud aligned = align_cloud(
        receptacle, report.goal_nav->position, report.goal_nav->heading);
    report.drop = compute_drop(aligned);
  } catch (const std::exception& e) {
    return fail(Stage::Drop, e.what());
  }

  return report;
}

}  // namespace pickdrop
