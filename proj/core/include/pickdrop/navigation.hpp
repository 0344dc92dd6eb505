#pragma once

#include <Eigen/Core>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pickdrop/voxel_map.hpp"

namespace pickdrop {

enum class CellState : std::uint8_t { Navigable = 0, Occupied = 1, Unexplored = 2 };

struct GridCell {
  int row = 0;
  int col = 0;

  friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

// Navigation score terms, all distances in centimeters:
//   s1 = ||x - x_o||                     distance to the object
//   s2 = 40 - min(||x - x_o||, 40)       closeness penalty
//   s3 = 1 / ||x - x_obs||  if <= 30     obstacle proximity penalty, else 0
//   s  = s1 + 8*s2 + 8*s3
// x_obs is the nearest Occupied/Unexplored cell center; the distance is
// measured from the center of the cell containing x (cell-center
// granularity). s3 is +infinity when x falls inside an obstacle cell.
struct NavScore {
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  double total = 0.0;
};

struct NavTarget {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();  // candidate cell center
  Eigen::Vector2d heading = Eigen::Vector2d::UnitX();  // toward the object
  double score = 0.0;
  GridCell cell;
};

// 8-connected grid path; consecutive cells are Chebyshev-adjacent and no
// cell is blocked.
using Path = std::vector<GridCell>;

// 2D navigability grid derived from the voxel map. Cells are classified
// Navigable / Occupied / Unexplored; inflate() dilates the obstacle set by a
// safety radius and precomputes the exact squared distance transform used by
// the score functions and the planner. Grids are value types; a prepared
// grid is immutable in practice and safe for concurrent reads.
class ObstacleGrid {
 public:
  ObstacleGrid() = default;
  ObstacleGrid(int rows, int cols, double cell_size,
               const Eigen::Vector2d& origin);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double cell_size() const { return cell_size_; }
  const Eigen::Vector2d& origin() const { return origin_; }

  bool in_bounds(GridCell c) const {
    return c.row >= 0 && c.row < rows_ && c.col >= 0 && c.col < cols_;
  }
  CellState state(GridCell c) const { return states_[offset(c)]; }
  void set_state(GridCell c, CellState s);

  // True for Occupied and Unexplored cells; both are treated as obstacles.
  bool obstacle(GridCell c) const {
    return states_[offset(c)] != CellState::Navigable;
  }
  // True once the cell is non-navigable after inflation.
  bool inflated(GridCell c) const { return inflated_[offset(c)] != 0; }
  bool blocked(GridCell c) const { return obstacle(c) || inflated(c); }

  Eigen::Vector2d center(GridCell c) const {
    return {origin_.x() + (c.col + 0.5) * cell_size_,
            origin_.y() + (c.row + 0.5) * cell_size_};
  }
  // Cell containing a world point; may be out of bounds.
  GridCell cell_at(const Eigen::Vector2d& world) const;

  bool prepared() const { return prepared_; }

  // Squared distance in cell units from this cell's center to the nearest
  // obstacle cell center; negative when the grid holds no obstacle at all.
  std::int64_t obstacle_distance_sq(GridCell c) const {
    return obstacle_d2_[offset(c)];
  }

  // Obstacle-proximity score of a cell, from the distance transform.
  double s3_at(GridCell c) const;

  friend ObstacleGrid inflate(ObstacleGrid grid, double radius);
  friend ObstacleGrid grid_from_text(const std::string& text);

 private:
  std::size_t offset(GridCell c) const {
    return std::size_t(c.row) * cols_ + c.col;
  }
  void compute_distance_transform();

  int rows_ = 0;
  int cols_ = 0;
  double cell_size_ = 0.10;
  Eigen::Vector2d origin_ = Eigen::Vector2d::Zero();
  std::vector<CellState> states_;
  std::vector<std::uint8_t> inflated_;
  std::vector<std::int64_t> obstacle_d2_;
  bool prepared_ = false;
};

// Projects the voxel map onto a 2D grid between a floor and ceiling height:
// a cell with any voxel center strictly between the two heights is Occupied;
// a cell with no voxel at all is Unexplored; a cell with only floor
// (z <= floor_height) or ceiling (z >= ceiling_height) voxels is Navigable.
// The returned grid is not yet inflated.
ObstacleGrid build_grid(const VoxelMap& map, double floor_height,
                        double ceiling_height, double cell_size = 0.10);

// Marks every cell whose center lies within `radius` of an Occupied or
// Unexplored cell center as non-navigable, and prepares the distance
// transform. radius 0 inflates exactly the obstacle cells themselves.
ObstacleGrid inflate(ObstacleGrid grid, double radius = 0.20);

// Evaluates the navigation score terms at world point x for an object at
// world point `object`. Requires an inflated grid.
NavScore score(const Eigen::Vector2d& x, const Eigen::Vector2d& object,
               const ObstacleGrid& grid);

// Scans every Navigable, non-inflated cell center and returns the cell
// minimizing s, ties broken by lexicographic (row, col). The heading points
// from the selected cell toward the object.
NavTarget select_nav_target(const ObstacleGrid& grid,
                            const Eigen::Vector2d& object);

// A* over 8-connected unblocked cells. Step cost is 1 for axis moves and
// sqrt(2) for diagonal moves (cell units) plus lambda * s3 of the entered
// cell; the heuristic is the Euclidean cell distance to the goal, which
// stays admissible for any lambda >= 0.
Path plan_path(const ObstacleGrid& grid, GridCell start, GridCell goal,
               double lambda = 1.0);

// Text dump: header line "grid <cols> <rows> <cell_size> <ox> <oy>" then one
// row per line, '.' navigable, '#' occupied, '?' unexplored, '+' navigable
// but blocked by inflation.
std::string to_text(const ObstacleGrid& grid);
ObstacleGrid grid_from_text(const std::string& text);

// Line-delimited "row col" pairs.
std::string path_to_text(const Path& path);
Path path_from_text(const std::string& text);

}  // namespace pickdrop
