#include "pickdrop/pipeline.hpp"

namespace pickdrop {

BuiltMap build_map(const ScanArchive& scan, const BuildMapOptions& options) {
  VoxelMap map(options.voxel_size, scan.embedding_dim);
  for (const PosedFrame& frame : scan.frames) {
    map.ingest_frame(frame, scan.intrinsics);
  }
  map.finalize();
  ObstacleGrid grid = derive_grid(map, options);
  return BuiltMap{std::move(map), std::move(grid)};
}

ObstacleGrid derive_grid(const VoxelMap& map, const BuildMapOptions& options) {
  return inflate(build_grid(map, options.floor_height, options.ceiling_height,
                            options.cell_size),
                 options.inflation_radius);
}

}  // namespace pickdrop
