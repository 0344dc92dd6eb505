#pragma once

#include <filesystem>
#include <iosfwd>

#include "pickdrop/geometry.hpp"

namespace pickdrop {

// ASCII PLY with float32 x/y/z vertex properties; coordinates are printed
// with 9 significant digits so float32 payloads round trip exactly.
void write_ply(std::ostream& out, const PointCloud& cloud);
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

PointCloud read_ply(std::istream& in);
PointCloud read_ply(const std::filesystem::path& path);

}  // namespace pickdrop
