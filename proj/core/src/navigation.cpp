#include "pickdrop/navigation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

#include "pickdrop/errors.hpp"

namespace pickdrop {

namespace {

constexpr std::int64_t kNoObstacle = -1;
constexpr double kObjectReachCm = 40.0;   // s2 saturation distance
constexpr double kObstacleCutoffCm = 30.0;  // s3 cutoff distance

// Exact 1D squared distance transform (lower envelope of parabolas).
// f holds squared distances (kUnset for "no site in this column"); out[i] =
// min_j ((i - j)^2 + f[j]).
constexpr std::int64_t kUnset = std::numeric_limits<std::int64_t>::max();

void distance_transform_1d(const std::vector<std::int64_t>& f,
                           std::vector<std::int64_t>& out) {
  const int n = static_cast<int>(f.size());
  out.assign(n, kUnset);

  std::vector<int> hull;      // parabola positions on the lower envelope
  std::vector<double> bound;  // bound[k]: left boundary of hull[k]'s range
  hull.reserve(n);
  bound.reserve(n + 1);

  const auto intersect = [&](int p, int q) {
    // Abscissa where parabolas rooted at p and q cross.
    return (double(f[p] + std::int64_t(p) * p) -
            double(f[q] + std::int64_t(q) * q)) /
           (2.0 * (p - q));
  };

  for (int q = 0; q < n; ++q) {
    if (f[q] == kUnset) continue;
    double s = 0.0;
    while (!hull.empty()) {
      s = intersect(q, hull.back());
      if (s <= bound.back()) {
        hull.pop_back();
        bound.pop_back();
      } else {
        break;
      }
    }
    if (hull.empty()) {
      bound.push_back(-std::numeric_limits<double>::infinity());
    } else {
      bound.push_back(s);
    }
    hull.push_back(q);
  }
  if (hull.empty()) return;  // no sites anywhere

  std::size_t k = 0;
  for (int i = 0; i < n; ++i) {
    while (k + 1 < hull.size() && bound[k + 1] < double(i)) ++k;
    const std::int64_t d = i - hull[k];
    out[i] = d * d + f[hull[k]];
  }
}

}  // namespace

ObstacleGrid::ObstacleGrid(int rows, int cols, double cell_size,
                           const Eigen::Vector2d& origin)
    : rows_(rows), cols_(cols), cell_size_(cell_size), origin_(origin) {
  if (rows <= 0 || cols <= 0) {
    throw InvalidArgumentError("ObstacleGrid: non-positive dimensions");
  }
  if (!(cell_size > 0.0)) {
    throw InvalidArgumentError("ObstacleGrid: cell_size must be > 0");
  }
  states_.assign(std::size_t(rows) * cols, CellState::Navigable);
  inflated_.assign(states_.size(), 0);
  obstacle_d2_.assign(states_.size(), kNoObstacle);
}

void ObstacleGrid::set_state(GridCell c, CellState s) {
  states_[offset(c)] = s;
  prepared_ = false;
}

GridCell ObstacleGrid::cell_at(const Eigen::Vector2d& world) const {
  return GridCell{
      static_cast<int>(std::floor((world.y() - origin_.y()) / cell_size_)),
      static_cast<int>(std::floor((world.x() - origin_.x()) / cell_size_))};
}

void ObstacleGrid::compute_distance_transform() {
  // Vertical pass: per column, distance in rows to the nearest obstacle.
  std::vector<std::int64_t> vertical(states_.size(), kUnset);
  for (int col = 0; col < cols_; ++col) {
    std::int64_t last = kUnset;
    for (int row = 0; row < rows_; ++row) {
      if (obstacle(GridCell{row, col})) last = 0;
      else if (last != kUnset) ++last;
      vertical[offset(GridCell{row, col})] = last;
    }
    last = kUnset;
    for (int row = rows_ - 1; row >= 0; --row) {
      if (obstacle(GridCell{row, col})) last = 0;
      else if (last != kUnset) ++last;
      auto& v = vertical[offset(GridCell{row, col})];
      v = std::min(v, last);
    }
  }
  // Horizontal pass over squared vertical distances.
  std::vector<std::int64_t> f(cols_), out;
  for (int row = 0; row < rows_; ++row) {
    for (int col = 0; col < cols_; ++col) {
      const std::int64_t v = vertical[offset(GridCell{row, col})];
      f[col] = v == kUnset ? kUnset : v * v;
    }
    distance_transform_1d(f, out);
    for (int col = 0; col < cols_; ++col) {
      obstacle_d2_[offset(GridCell{row, col})] =
          out[col] == kUnset ? kNoObstacle : out[col];
    }
  }
}

double ObstacleGrid::s3_at(GridCell c) const {
  const std::int64_t d2 = obstacle_d2_[offset(c)];
  if (d2 == kNoObstacle) return 0.0;
  if (d2 == 0) return std::numeric_limits<double>::infinity();
  const double dist_cm = std::sqrt(double(d2)) * cell_size_ * 100.0;
  return dist_cm <= kObstacleCutoffCm ? 1.0 / dist_cm : 0.0;
}

ObstacleGrid build_grid(const VoxelMap& map, double floor_height,
                        double ceiling_height, double cell_size) {
  if (!map.finalized()) {
    throw StateError("build_grid: map must be finalized");
  }
  if (map.empty()) {
    throw EmptyMapError("build_grid: map has no voxels");
  }
  if (!(floor_height < ceiling_height)) {
    throw InvalidArgumentError("build_grid: floor_height must be below "
                               "ceiling_height");
  }
  if (!(cell_size > 0.0)) {
    throw InvalidArgumentError("build_grid: cell_size must be > 0");
  }

  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_y;
  for (const VoxelIndex& idx : map.indices()) {
    const Eigen::Vector3d c = map.center_of(idx);
    min_x = std::min(min_x, c.x());
    min_y = std::min(min_y, c.y());
    max_x = std::max(max_x, c.x());
    max_y = std::max(max_y, c.y());
  }
  const Eigen::Vector2d origin{std::floor(min_x / cell_size) * cell_size,
                               std::floor(min_y / cell_size) * cell_size};
  const int cols =
      static_cast<int>(std::floor((max_x - origin.x()) / cell_size)) + 1;
  const int rows =
      static_cast<int>(std::floor((max_y - origin.y()) / cell_size)) + 1;

  ObstacleGrid grid(rows, cols, cell_size, origin);

  enum : std::uint8_t { kLow = 1, kMid = 2, kHigh = 4 };
  std::vector<std::uint8_t> bands(std::size_t(rows) * cols, 0);
  for (const VoxelIndex& idx : map.indices()) {
    const Eigen::Vector3d c = map.center_of(idx);
    const GridCell cell = grid.cell_at({c.x(), c.y()});
    if (!grid.in_bounds(cell)) continue;
    auto& b = bands[std::size_t(cell.row) * cols + cell.col];
    if (c.z() > floor_height && c.z() < ceiling_height) b |= kMid;
    else if (c.z() <= floor_height) b |= kLow;
    else b |= kHigh;
  }
  for (int row = 0; row < rows; ++row) {
    for (int col = 0; col < cols; ++col) {
      const std::uint8_t b = bands[std::size_t(row) * cols + col];
      CellState s = CellState::Unexplored;
      if (b & kMid) s = CellState::Occupied;
      else if (b != 0) s = CellState::Navigable;
      grid.set_state(GridCell{row, col}, s);
    }
  }
  return grid;
}

ObstacleGrid inflate(ObstacleGrid grid, double radius) {
  if (radius < 0.0) {
    throw InvalidArgumentError("inflate: radius must be >= 0");
  }
  std::fill(grid.inflated_.begin(), grid.inflated_.end(), 0);

  // Disk of cell offsets whose center distance is within the radius.
  const int reach = static_cast<int>(std::ceil(radius / grid.cell_size_));
  std::vector<std::pair<int, int>> disk;
  for (int dr = -reach; dr <= reach; ++dr) {
    for (int dc = -reach; dc <= reach; ++dc) {
      const double dx = dc * grid.cell_size_;
      const double dy = dr * grid.cell_size_;
      if (dx * dx + dy * dy <= radius * radius) disk.emplace_back(dr, dc);
    }
  }

  for (int row = 0; row < grid.rows_; ++row) {
    for (int col = 0; col < grid.cols_; ++col) {
      if (!grid.obstacle(GridCell{row, col})) continue;
      for (const auto& [dr, dc] : disk) {
        const GridCell n{row + dr, col + dc};
        if (grid.in_bounds(n)) grid.inflated_[grid.offset(n)] = 1;
      }
    }
  }
  grid.compute_distance_transform();
  grid.prepared_ = true;
  return grid;
}

namespace {

GridCell clamp_to_grid(GridCell c, const ObstacleGrid& grid) {
  c.row = std::clamp(c.row, 0, grid.rows() - 1);
  c.col = std::clamp(c.col, 0, grid.cols() - 1);
  return c;
}

}  // namespace

NavScore score(const Eigen::Vector2d& x, const Eigen::Vector2d& object,
               const ObstacleGrid& grid) {
  if (!grid.prepared()) {
    throw StateError("score: grid must be inflated first");
  }
  NavScore s;
  s.s1 = 100.0 * (x - object).norm();
  s.s2 = kObjectReachCm - std::min(s.s1, kObjectReachCm);
  s.s3 = grid.s3_at(clamp_to_grid(grid.cell_at(x), grid));
  s.total = s.s1 + 8.0 * s.s2 + 8.0 * s.s3;
  return s;
}

NavTarget select_nav_target(const ObstacleGrid& grid,
                            const Eigen::Vector2d& object) {
  if (!grid.prepared()) {
    throw StateError("select_nav_target: grid must be inflated first");
  }
  bool found = false;
  GridCell best_cell;
  double best_total = std::numeric_limits<double>::infinity();
  for (int row = 0; row < grid.rows(); ++row) {
    for (int col = 0; col < grid.cols(); ++col) {
      const GridCell cell{row, col};
      if (grid.blocked(cell)) continue;
      const NavScore sc = score(grid.center(cell), object, grid);
      if (!found || sc.total < best_total) {
        found = true;
        best_total = sc.total;
        best_cell = cell;
      }
    }
  }
  if (!found) {
    throw UnreachableTargetError(
        "select_nav_target: no navigable, non-inflated cell");
  }
  NavTarget target;
  target.cell = best_cell;
  target.position = grid.center(best_cell);
  target.score = best_total;
  const Eigen::Vector2d to_object = object - target.position;
  const double norm = to_object.norm();
  target.heading = norm > 0.0 ? Eigen::Vector2d(to_object / norm)
                              : Eigen::Vector2d::UnitX();
  return target;
}

Path plan_path(const ObstacleGrid& grid, GridCell start, GridCell goal,
               double lambda) {
  if (!grid.prepared()) {
    throw StateError("plan_path: grid must be inflated first");
  }
  if (!grid.in_bounds(start) || !grid.in_bounds(goal)) {
    throw InvalidArgumentError("plan_path: endpoint out of bounds");
  }
  if (grid.blocked(start) || grid.blocked(goal)) {
    throw InvalidArgumentError("plan_path: endpoint is blocked");
  }
  if (lambda < 0.0) {
    throw InvalidArgumentError("plan_path: lambda must be >= 0");
  }
  if (start == goal) return Path{start};

  const int rows = grid.rows(), cols = grid.cols();
  const auto id = [cols](GridCell c) {
    return std::size_t(c.row) * cols + c.col;
  };
  const auto heuristic = [&](GridCell c) {
    const double dr = c.row - goal.row;
    const double dc = c.col - goal.col;
    return std::sqrt(dr * dr + dc * dc);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> g(std::size_t(rows) * cols, kInf);
  std::vector<std::int32_t> parent(g.size(), -1);
  std::vector<std::uint8_t> closed(g.size(), 0);

  struct Node {
    double f;
    double h;
    GridCell cell;
    bool operator>(const Node& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return cell > o.cell;  // fully deterministic expansion order
    }
  };
  std::priority_queue<Node, std::vector<Node>, std::greater<Node>> open;

  g[id(start)] = 0.0;
  open.push(Node{heuristic(start), heuristic(start), start});

  static constexpr int kOffsets[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                         {0, 1},   {1, -1}, {1, 0},  {1, 1}};
  const double sqrt2 = std::sqrt(2.0);

  while (!open.empty()) {
    const Node node = open.top();
    open.pop();
    const std::size_t ni = id(node.cell);
    if (closed[ni]) continue;
    closed[ni] = 1;
    if (node.cell == goal) {
      Path path;
      GridCell c = goal;
      while (true) {
        path.push_back(c);
        const std::int32_t p = parent[id(c)];
        if (p < 0) break;
        c = GridCell{int(p) / cols, int(p) % cols};
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (const auto& off : kOffsets) {
      const GridCell next{node.cell.row + off[0], node.cell.col + off[1]};
      if (!grid.in_bounds(next) || grid.blocked(next)) continue;
      const std::size_t xi = id(next);
      if (closed[xi]) continue;
      const double step = (off[0] != 0 && off[1] != 0) ? sqrt2 : 1.0;
      const double cost = g[ni] + step + lambda * grid.s3_at(next);
      if (cost < g[xi]) {
        g[xi] = cost;
        parent[xi] = static_cast<std::int32_t>(ni);
        open.push(Node{cost + heuristic(next), heuristic(next), next});
      }
    }
  }
  throw NoPathError("plan_path: goal is unreachable from start");
}

std::string to_text(const ObstacleGrid& grid) {
  std::ostringstream out;
  out.precision(17);
  out << "grid " << grid.cols() << ' ' << grid.rows() << ' '
      << grid.cell_size() << ' ' << grid.origin().x() << ' '
      << grid.origin().y() << '\n';
  for (int row = 0; row < grid.rows(); ++row) {
    for (int col = 0; col < grid.cols(); ++col) {
      const GridCell c{row, col};
      char ch = '.';
      switch (grid.state(c)) {
        case CellState::Occupied:
          ch = '#';
          break;
        case CellState::Unexplored:
          ch = '?';
          break;
        case CellState::Navigable:
          ch = grid.inflated(c) ? '+' : '.';
          break;
      }
      out << ch;
    }
    out << '\n';
  }
  return out.str();
}

ObstacleGrid grid_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int cols = 0, rows = 0;
  double cell_size = 0.0, ox = 0.0, oy = 0.0;
  if (!(in >> tag >> cols >> rows >> cell_size >> ox >> oy) || tag != "grid") {
    throw ParseError("grid_from_text: malformed header");
  }
  ObstacleGrid grid(rows, cols, cell_size, {ox, oy});
  std::string line;
  std::getline(in, line);  // consume end of header line
  std::vector<std::uint8_t> inflated(std::size_t(rows) * cols, 0);
  for (int row = 0; row < rows; ++row) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) < cols) {
      throw ParseError("grid_from_text: truncated at row " +
                       std::to_string(row));
    }
    for (int col = 0; col < cols; ++col) {
      switch (line[col]) {
        case '.':
          break;
        case '+':
          inflated[std::size_t(row) * cols + col] = 1;
          break;
        case '#':
          grid.set_state(GridCell{row, col}, CellState::Occupied);
          break;
        case '?':
          grid.set_state(GridCell{row, col}, CellState::Unexplored);
          break;
        default:
          throw ParseError(std::string("grid_from_text: bad cell char '") +
                           line[col] + "'");
      }
    }
  }
  // Re-derive the transform; restore the stored inflation marks.
  grid = inflate(std::move(grid), 0.0);
  for (std::size_t i = 0; i < inflated.size(); ++i) {
    if (inflated[i]) grid.inflated_[i] = 1;
  }
  return grid;
}

std::string path_to_text(const Path& path) {
  std::ostringstream out;
  for (const GridCell& c : path) out << c.row << ' ' << c.col << '\n';
  return out.str();
}

Path path_from_text(const std::string& text) {
  std::istringstream in(text);
  Path path;
  GridCell c;
  while (in >> c.row >> c.col) path.push_back(c);
  return path;
}

}  // namespace pickdrop
