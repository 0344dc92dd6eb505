#pragma once

#include "pickdrop/navigation.hpp"
#include "pickdrop/scan_archive.hpp"
#include "pickdrop/voxel_map.hpp"

namespace pickdrop {

struct BuildMapOptions {
  double voxel_size = 0.05;
  double floor_height = 0.10;
  double ceiling_height = 1.80;
  double cell_size = 0.10;
  double inflation_radius = 0.20;
};

struct BuiltMap {
  VoxelMap map;
  ObstacleGrid grid;
};

// Ingests every frame of a scan into a fresh voxel map, finalizes it, and
// derives the inflated obstacle grid. Deterministic given the scan.
BuiltMap build_map(const ScanArchive& scan, const BuildMapOptions& options = {});

// Grid derivation alone, for maps loaded from disk.
ObstacleGrid derive_grid(const VoxelMap& map, const BuildMapOptions& options = {});

}  // namespace pickdrop
