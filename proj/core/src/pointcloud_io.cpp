#include "pickdrop/pointcloud_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "pickdrop/errors.hpp"

namespace pickdrop {

void write_ply(std::ostream& out, const PointCloud& cloud) {
  out << "ply\nformat ascii 1.0\nelement vertex " << cloud.points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
      << "end_header\n";
  char line[96];
  for (const Eigen::Vector3d& p : cloud.points) {
    std::snprintf(line, sizeof line, "%.9g %.9g %.9g\n", double(float(p.x())),
                  double(float(p.y())), double(float(p.z())));
    out << line;
  }
}

void write_ply(const std::filesystem::path& path, const PointCloud& cloud) {
  std::ofstream out(path);
  if (!out) throw ParseError("write_ply: cannot open " + path.string());
  write_ply(out, cloud);
  if (!out) throw ParseError("write_ply: short write to " + path.string());
}

PointCloud read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw ParseError("read_ply: missing ply magic");
  }
  std::size_t vertex_count = 0;
  bool in_header = true;
  while (in_header && std::getline(in, line)) {
    std::istringstream fields(line);
    std::string keyword;
    fields >> keyword;
    if (keyword == "format") {
      std::string fmt;
      fields >> fmt;
      if (fmt != "ascii") throw ParseError("read_ply: only ascii supported");
    } else if (keyword == "element") {
      std::string name;
      fields >> name >> vertex_count;
      if (name != "vertex") {
        throw ParseError("read_ply: unsupported element " + name);
      }
    } else if (keyword == "end_header") {
      in_header = false;
    }
    // comments and property lines pass through
  }
  if (in_header) throw ParseError("read_ply: truncated header");

  PointCloud cloud;
  cloud.points.reserve(vertex_count);
  for (std::size_t i = 0; i < vertex_count; ++i) {
    float x, y, z;
    if (!(in >> x >> y >> z)) {
      throw ParseError("read_ply: truncated at vertex " + std::to_string(i));
    }
    cloud.points.emplace_back(x, y, z);
  }
  return cloud;
}

PointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("read_ply: cannot open " + path.string());
  return read_ply(in);
}

}  // namespace pickdrop
