#pragma once

#include <filesystem>
#include <vector>

#include "stresspath/types.hpp"

namespace stresspath {

enum class MoveKind { infill, contour, travel };

// Ordered deposition (or travel) path with a surface normal per point. The
// normal defines the 5-axis tool orientation. Closed polylines do not repeat
// the first point; the closing segment is implicit.
struct Polyline {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  bool closed = false;
  MoveKind kind = MoveKind::infill;
  int iso_index = -1;  // isoline ordinal within the layer, infill only

  std::size_t size() const { return points.size(); }
  double length() const;
};

struct LayerToolpath {
  int layer_index = 0;
  double iso_value = 0.0;
  std::vector<Polyline> paths;  // print polylines with travels in between
  double print_length = 0.0;    // mm, infill + contours
};

struct ToolpathProgram {
  std::vector<LayerToolpath> layers;  // ordered by increasing iso value
};

// Machine-neutral text format, one record per line:
//   LAYER <k>
//   PRINT <x> <y> <z> <nx> <ny> <nz>
//   TRAVEL <x> <y> <z> <nx> <ny> <nz>
// Six decimal places, LF line endings.
void write_toolpath(const ToolpathProgram& program, const std::filesystem::path& path);
ToolpathProgram read_toolpath(const std::filesystem::path& path);

}  // namespace stresspath
