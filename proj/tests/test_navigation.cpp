#include "pickdrop/navigation.hpp"

#include <doctest.h>

#include <cmath>
#include <deque>
#include <optional>

#include "pickdrop/errors.hpp"
#include "pickdrop/rng.hpp"

using namespace pickdrop;

namespace {

ObstacleGrid empty_grid(int rows, int cols, double cell = 0.1) {
  return ObstacleGrid(rows, cols, cell, {0.0, 0.0});
}

ObstacleGrid random_grid(SplitMix64& rng, int rows, int cols,
                         double obstacle_density) {
  ObstacleGrid grid = empty_grid(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double u = rng.uniform();
      if (u < obstacle_density / 2) {
        grid.set_state({r, c}, CellState::Occupied);
      } else if (u < obstacle_density) {
        grid.set_state({r, c}, CellState::Unexplored);
      }
    }
  }
  return grid;
}

// Independent nearest-obstacle distance in centimeters: integer cell deltas,
// exhaustive scan.
std::optional<double> brute_obstacle_cm(const ObstacleGrid& grid,
                                        GridCell from) {
  std::optional<std::int64_t> best;
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      if (!grid.obstacle({r, c})) continue;
      const std::int64_t d2 = std::int64_t(r - from.row) * (r - from.row) +
                              std::int64_t(c - from.col) * (c - from.col);
      if (!best || d2 < *best) best = d2;
    }
  }
  if (!best) return std::nullopt;
  return std::sqrt(double(*best)) * grid.cell_size() * 100.0;
}

// Direct evaluation of the score formulas against the brute-force obstacle
// distance.
NavScore brute_score(const Eigen::Vector2d& x, const Eigen::Vector2d& object,
                     const ObstacleGrid& grid) {
  NavScore s;
  s.s1 = 100.0 * (x - object).norm();
  s.s2 = 40.0 - std::min(s.s1, 40.0);
  GridCell cell = grid.cell_at(x);
  cell.row = std::clamp(cell.row, 0, grid.rows() - 1);
  cell.col = std::clamp(cell.col, 0, grid.cols() - 1);
  const auto d = brute_obstacle_cm(grid, cell);
  if (!d) {
    s.s3 = 0.0;
  } else if (*d == 0.0) {
    s.s3 = std::numeric_limits<double>::infinity();
  } else {
    s.s3 = *d <= 30.0 ? 1.0 / *d : 0.0;
  }
  s.total = s.s1 + 8.0 * s.s2 + 8.0 * s.s3;
  return s;
}

// BFS reachability over the same adjacency as the planner.
bool flood_fill_reachable(const ObstacleGrid& grid, GridCell start,
                          GridCell goal) {
  if (grid.blocked(start) || grid.blocked(goal)) return false;
  std::vector<std::uint8_t> seen(std::size_t(grid.rows()) * grid.cols(), 0);
  const auto id = [&](GridCell c) {
    return std::size_t(c.row) * grid.cols() + c.col;
  };
  std::deque<GridCell> queue{start};
  seen[id(start)] = 1;
  while (!queue.empty()) {
    const GridCell c = queue.front();
    queue.pop_front();
    if (c == goal) return true;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const GridCell n{c.row + dr, c.col + dc};
        if (!grid.in_bounds(n) || grid.blocked(n) || seen[id(n)]) continue;
        seen[id(n)] = 1;
        queue.push_back(n);
      }
    }
  }
  return false;
}

// Octile shortest-path cost by Dijkstra; the lambda = 0 reference.
std::optional<double> dijkstra_octile(const ObstacleGrid& grid, GridCell start,
                                      GridCell goal) {
  if (grid.blocked(start) || grid.blocked(goal)) return std::nullopt;
  const std::size_t n = std::size_t(grid.rows()) * grid.cols();
  const auto id = [&](GridCell c) {
    return std::size_t(c.row) * grid.cols() + c.col;
  };
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> done(n, 0);
  dist[id(start)] = 0.0;
  const double sqrt2 = std::sqrt(2.0);
  while (true) {
    std::size_t u = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && dist[i] < best) {
        best = dist[i];
        u = i;
      }
    }
    if (u == n) break;
    done[u] = 1;
    const GridCell c{int(u) / grid.cols(), int(u) % grid.cols()};
    if (c == goal) break;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        const GridCell nb{c.row + dr, c.col + dc};
        if (!grid.in_bounds(nb) || grid.blocked(nb)) continue;
        const double w = (dr != 0 && dc != 0) ? sqrt2 : 1.0;
        if (dist[u] + w < dist[id(nb)]) dist[id(nb)] = dist[u] + w;
      }
    }
  }
  const double d = dist[id(goal)];
  if (std::isinf(d)) return std::nullopt;
  return d;
}

double path_cost(const ObstacleGrid& grid, const Path& path, double lambda) {
  double cost = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const int dr = path[i].row - path[i - 1].row;
    const int dc = path[i].col - path[i - 1].col;
    cost += (dr != 0 && dc != 0) ? std::sqrt(2.0) : 1.0;
    cost += lambda * grid.s3_at(path[i]);
  }
  return cost;
}

void check_path_valid(const ObstacleGrid& grid, const Path& path,
                      GridCell start, GridCell goal) {
  REQUIRE(!path.empty());
  CHECK(path.front() == start);
  CHECK(path.back() == goal);
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK_FALSE(grid.blocked(path[i]));
    if (i > 0) {
      const int dr = std::abs(path[i].row - path[i - 1].row);
      const int dc = std::abs(path[i].col - path[i - 1].col);
      CHECK(std::max(dr, dc) == 1);  // Chebyshev-adjacent, no repeats
    }
  }
}

}  // namespace

TEST_CASE("build_grid classifies floor, obstacle and unexplored cells") {
  VoxelMap map(0.05, 2);
  const std::vector<float> e{1.f, 0.f};
  map.accumulate({0.05, 0.05, 0.02}, e, 1.0f);  // floor voxel, cell (0,0)
  map.accumulate({0.55, 0.05, 0.90}, e, 1.0f);  // mid voxel, cell (0,5)
  map.accumulate({1.05, 1.05, 0.02}, e, 1.0f);  // floor voxel, cell (10,10)
  map.accumulate({0.05, 0.75, 1.95}, e, 1.0f);  // ceiling-only cell (7,0)
  map.finalize();

  const ObstacleGrid grid = build_grid(map, 0.1, 1.8, 0.1);
  CHECK(grid.cell_size() == 0.1);
  CHECK(grid.state({0, 0}) == CellState::Navigable);
  CHECK(grid.state({0, 5}) == CellState::Occupied);
  CHECK(grid.state({10, 10}) == CellState::Navigable);
  CHECK(grid.state({7, 0}) == CellState::Navigable);  // ceiling counts as seen
  CHECK(grid.state({5, 5}) == CellState::Unexplored);  // nothing projects here
}

TEST_CASE("build_grid: occupied wins over floor evidence") {
  VoxelMap map(0.05, 2);
  const std::vector<float> e{1.f, 0.f};
  map.accumulate({0.05, 0.05, 0.02}, e, 1.0f);  // floor voxel
  map.accumulate({0.07, 0.07, 0.50}, e, 1.0f);  // mid voxel, same cell
  map.finalize();
  const ObstacleGrid grid = build_grid(map, 0.1, 1.8, 0.1);
  CHECK(grid.state({0, 0}) == CellState::Occupied);
}

TEST_CASE("build_grid requires a finalized, non-empty map") {
  VoxelMap map(0.05, 2);
  CHECK_THROWS_AS(build_grid(map, 0.1, 1.8, 0.1), StateError);
}

TEST_CASE("inflate with radius zero marks exactly the obstacles") {
  SplitMix64 rng(5);
  ObstacleGrid grid = inflate(random_grid(rng, 12, 9, 0.3), 0.0);
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      CHECK(grid.inflated({r, c}) == grid.obstacle({r, c}));
    }
  }
}

TEST_CASE("inflating one obstacle by 20 cm covers the 13-cell disk") {
  ObstacleGrid grid = empty_grid(9, 9);
  grid.set_state({4, 4}, CellState::Occupied);
  grid = inflate(std::move(grid), 0.20);
  int count = 0;
  for (int r = 0; r < 9; ++r) {
    for (int c = 0; c < 9; ++c) {
      if (grid.inflated({r, c})) ++count;
    }
  }
  CHECK(count == 13);
  CHECK(grid.inflated({4, 6}));   // exactly 0.20 m away: included
  CHECK_FALSE(grid.inflated({3, 6}));  // sqrt(5) cells away: out
}

TEST_CASE("fully navigable grid stays uninflated") {
  ObstacleGrid grid = inflate(empty_grid(6, 6), 0.20);
  for (int r = 0; r < 6; ++r) {
    for (int c = 0; c < 6; ++c) CHECK_FALSE(grid.inflated({r, c}));
  }
}

TEST_CASE("inflation covers the obstacles and nothing farther than radius") {
  SplitMix64 rng(1010);
  const double radius = 0.20;
  const ObstacleGrid grid = inflate(random_grid(rng, 20, 20, 0.12), radius);
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      const auto d = brute_obstacle_cm(grid, {r, c});
      const bool within = d && *d <= radius * 100.0 + 1e-9;
      CHECK(grid.inflated({r, c}) == within);
      if (grid.obstacle({r, c})) CHECK(grid.inflated({r, c}));
    }
  }
}

TEST_CASE("score reproduces the formula table") {
  // obstacle at cell (0,0); navigable elsewhere
  ObstacleGrid grid = empty_grid(12, 12);
  grid.set_state({0, 0}, CellState::Occupied);
  grid = inflate(std::move(grid), 0.20);

  SUBCASE("40 cm from the object, obstacle far: s = s1 = 40") {
    // x at cell (0,9) center, object 0.4 m away, obstacle 90 cm away
    const Eigen::Vector2d x = grid.center({0, 9});
    const Eigen::Vector2d object = x + Eigen::Vector2d{0.4, 0.0};
    const NavScore s = score(x, object, grid);
    CHECK(s.s1 == doctest::Approx(40.0).epsilon(1e-12));
    CHECK(s.s2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(s.s3 == 0.0);
    CHECK(s.total == doctest::Approx(40.0).epsilon(1e-12));
  }

  SUBCASE("on top of the object: s2 saturates at 40") {
    const Eigen::Vector2d x = grid.center({5, 9});
    const NavScore s = score(x, x, grid);
    CHECK(s.s1 == 0.0);
    CHECK(s.s2 == 40.0);
  }

  SUBCASE("obstacle at exactly 30 cm: s3 = 1/30; farther: 0") {
    const Eigen::Vector2d object{0.95, 0.95};
    const NavScore at30 = score(grid.center({0, 3}), object, grid);
    CHECK(at30.s3 == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
    // sqrt(10) cells = 31.6 cm, beyond the cutoff
    const NavScore at31 = score(grid.center({1, 3}), object, grid);
    CHECK(at31.s3 == 0.0);
    // 50 cm away
    const NavScore at50 = score(grid.center({0, 5}), object, grid);
    CHECK(at50.s3 == 0.0);
  }

  SUBCASE("standing inside an obstacle cell: s3 is infinite") {
    const NavScore s = score(grid.center({0, 0}), {0.5, 0.5}, grid);
    CHECK(std::isinf(s.s3));
    CHECK(std::isinf(s.total));
  }
}

TEST_CASE("score matches direct formula evaluation on random grids") {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const ObstacleGrid grid = inflate(random_grid(rng, 15, 15, 0.2), 0.20);
    for (int i = 0; i < 30; ++i) {
      const Eigen::Vector2d x{rng.uniform(0, 1.5), rng.uniform(0, 1.5)};
      const Eigen::Vector2d object{rng.uniform(0, 1.5), rng.uniform(0, 1.5)};
      const NavScore got = score(x, object, grid);
      const NavScore want = brute_score(x, object, grid);
      CHECK(got.s1 == want.s1);
      CHECK(got.s2 == want.s2);
      CHECK(got.s3 == want.s3);
      CHECK(got.total == want.total);
    }
  }
}

TEST_CASE("s is monotone in lone-obstacle distance") {
  const Eigen::Vector2d object{2.0, 0.05};
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 8; ++k) {
    ObstacleGrid grid = empty_grid(3, 40);
    grid.set_state({0, k}, CellState::Occupied);
    grid = inflate(std::move(grid), 0.20);
    const NavScore s = score(grid.center({0, 0}), object, grid);
    CHECK(s.total <= previous);
    previous = s.total;
  }
}

TEST_CASE("select_nav_target settles at the 40 cm ring on an open grid") {
  const ObstacleGrid grid = inflate(empty_grid(50, 50), 0.20);  // 5 m x 5 m
  const Eigen::Vector2d object{2.5, 2.5};
  const NavTarget target = select_nav_target(grid, object);
  const double dist = (target.position - object).norm();
  CHECK(std::abs(dist - 0.40) <= 0.1 + 1e-12);
  CHECK(target.heading.norm() == doctest::Approx(1.0));
  // heading points at the object
  CHECK((target.position + dist * target.heading - object).norm() < 1e-9);
}

TEST_CASE("select_nav_target returns the single candidate") {
  ObstacleGrid grid = empty_grid(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (!(r == 2 && c == 1)) grid.set_state({r, c}, CellState::Occupied);
    }
  }
  grid = inflate(std::move(grid), 0.0);
  const NavTarget target = select_nav_target(grid, {0.0, 0.0});
  CHECK(target.cell == GridCell{2, 1});
}

TEST_CASE("select_nav_target equals the exhaustive argmin") {
  SplitMix64 rng(515);
  for (int trial = 0; trial < 30; ++trial) {
    const ObstacleGrid grid = inflate(random_grid(rng, 25, 25, 0.15), 0.20);
    const Eigen::Vector2d object{rng.uniform(0, 2.5), rng.uniform(0, 2.5)};

    bool found = false;
    GridCell best_cell;
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < grid.rows(); ++r) {
      for (int c = 0; c < grid.cols(); ++c) {
        if (grid.blocked({r, c})) continue;
        const double s = score(grid.center({r, c}), object, grid).total;
        if (!found || s < best) {
          found = true;
          best = s;
          best_cell = GridCell{r, c};
        }
      }
    }
    if (!found) {
      CHECK_THROWS_AS(select_nav_target(grid, object),
                      UnreachableTargetError);
      continue;
    }
    const NavTarget target = select_nav_target(grid, object);
    CHECK(target.cell == best_cell);
    CHECK(target.score == best);
  }
}

TEST_CASE("select_nav_target with no candidates throws") {
  ObstacleGrid grid = empty_grid(3, 3);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) grid.set_state({r, c}, CellState::Unexplored);
  }
  grid = inflate(std::move(grid), 0.0);
  CHECK_THROWS_AS(select_nav_target(grid, {0.1, 0.1}),
                  UnreachableTargetError);
}

TEST_CASE("plan_path trivial cases") {
  const ObstacleGrid grid = inflate(empty_grid(5, 10), 0.20);
  const Path single = plan_path(grid, {2, 3}, {2, 3});
  REQUIRE(single.size() == 1);
  CHECK(single[0] == GridCell{2, 3});

  const Path corridor = plan_path(grid, {2, 0}, {2, 9});
  check_path_valid(grid, corridor, {2, 0}, {2, 9});
  CHECK(corridor.size() == 10);  // straight line, Chebyshev length + 1
}

TEST_CASE("plan_path rejects blocked endpoints") {
  ObstacleGrid grid = empty_grid(5, 5);
  grid.set_state({2, 2}, CellState::Occupied);
  grid = inflate(std::move(grid), 0.0);
  CHECK_THROWS_AS(plan_path(grid, {2, 2}, {0, 0}), InvalidArgumentError);
  CHECK_THROWS_AS(plan_path(grid, {0, 0}, {2, 2}), InvalidArgumentError);
  CHECK_THROWS_AS(plan_path(grid, {0, 0}, {9, 9}), InvalidArgumentError);
}

TEST_CASE("plan_path agrees with flood fill on walled grids") {
  SplitMix64 rng(606);
  for (int trial = 0; trial < 40; ++trial) {
    // vertical wall with a possible gap
    ObstacleGrid grid = empty_grid(20, 20);
    const int wall_col = 10;
    const bool has_gap = rng.uniform() < 0.6;
    const int gap_row = int(rng.uniform(0, 20));
    for (int r = 0; r < 20; ++r) {
      if (has_gap && r == gap_row) continue;
      grid.set_state({r, wall_col}, CellState::Occupied);
    }
    const double radius = rng.uniform() < 0.5 ? 0.0 : 0.1;
    grid = inflate(std::move(grid), radius);
    const GridCell start{int(rng.uniform(0, 20)), int(rng.uniform(0, 5))};
    const GridCell goal{int(rng.uniform(0, 20)), 15 + int(rng.uniform(0, 5))};
    if (grid.blocked(start) || grid.blocked(goal)) continue;

    const bool reachable = flood_fill_reachable(grid, start, goal);
    if (reachable) {
      const Path path = plan_path(grid, start, goal);
      check_path_valid(grid, path, start, goal);
    } else {
      CHECK_THROWS_AS(plan_path(grid, start, goal), NoPathError);
    }
  }
}

TEST_CASE("plan_path with lambda zero matches Dijkstra octile costs") {
  SplitMix64 rng(707);
  int compared = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const ObstacleGrid grid = inflate(random_grid(rng, 15, 15, 0.2), 0.1);
    const GridCell start{int(rng.uniform(0, 15)), int(rng.uniform(0, 15))};
    const GridCell goal{int(rng.uniform(0, 15)), int(rng.uniform(0, 15))};
    if (grid.blocked(start) || grid.blocked(goal)) continue;
    const auto reference = dijkstra_octile(grid, start, goal);
    if (!reference) {
      CHECK_THROWS_AS(plan_path(grid, start, goal, 0.0), NoPathError);
      continue;
    }
    const Path path = plan_path(grid, start, goal, 0.0);
    check_path_valid(grid, path, start, goal);
    CHECK(path_cost(grid, path, 0.0) == doctest::Approx(*reference).epsilon(1e-9));
    ++compared;
  }
  CHECK(compared > 10);
}

TEST_CASE("obstacle penalty pushes paths away from walls") {
  // corridor with a wall along row 0; penalized plans hug the far side
  ObstacleGrid grid = empty_grid(6, 30);
  for (int c = 0; c < 30; ++c) grid.set_state({0, c}, CellState::Occupied);
  grid = inflate(std::move(grid), 0.1);
  const Path path = plan_path(grid, {2, 0}, {2, 29}, 5.0);
  check_path_valid(grid, path, {2, 0}, {2, 29});
  int rows_away = 0;
  for (const GridCell& c : path) rows_away += c.row >= 3 ? 1 : 0;
  CHECK(rows_away > int(path.size()) / 2);
}

TEST_CASE("grid text round trip") {
  SplitMix64 rng(808);
  ObstacleGrid grid = inflate(random_grid(rng, 8, 13, 0.25), 0.2);
  const std::string text = to_text(grid);
  const ObstacleGrid back = grid_from_text(text);
  REQUIRE(back.rows() == grid.rows());
  REQUIRE(back.cols() == grid.cols());
  CHECK(back.cell_size() == grid.cell_size());
  CHECK(back.origin() == grid.origin());
  for (int r = 0; r < grid.rows(); ++r) {
    for (int c = 0; c < grid.cols(); ++c) {
      CHECK(back.state({r, c}) == grid.state({r, c}));
      CHECK(back.inflated({r, c}) == grid.inflated({r, c}));
    }
  }
  CHECK(to_text(back) == text);
  CHECK_THROWS_AS(grid_from_text("grid 3 3"), ParseError);
}

TEST_CASE("path text round trip") {
  const Path path{{0, 0}, {1, 1}, {1, 2}};
  CHECK(path_from_text(path_to_text(path)) == path);
}
