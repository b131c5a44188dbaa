#include "stresspath/toolpath.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace stresspath {

double Polyline::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < points.size(); ++i) len += (points[i] - points[i - 1]).norm();
  if (closed && points.size() > 2) len += (points.front() - points.back()).norm();
  return len;
}

void write_toolpath(const ToolpathProgram& program, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw ValidationError("cannot write toolpath file " + path.string());
  out << "# stresspath toolpath: kind x y z nx ny nz\n";
  char buf[160];
  for (const auto& layer : program.layers) {
    out << "LAYER " << layer.layer_index << "\n";
    for (const auto& line : layer.paths) {
      const char* kind = line.kind == MoveKind::travel ? "TRAVEL" : "PRINT";
      auto emit = [&](const Vec3& p, const Vec3& n) {
        if (!p.allFinite() || !n.allFinite())
          throw ComputeError("toolpath contains a non-finite record");
        std::snprintf(buf, sizeof(buf), "%s %.6f %.6f %.6f %.6f %.6f %.6f\n", kind, p.x(),
                      p.y(), p.z(), n.x(), n.y(), n.z());
        out << buf;
      };
      for (std::size_t i = 0; i < line.points.size(); ++i) emit(line.points[i], line.normals[i]);
      if (line.closed && !line.points.empty()) emit(line.points.front(), line.normals.front());
    }
  }
}

ToolpathProgram read_toolpath(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open toolpath file " + path.string());
  ToolpathProgram program;
  std::string word;
  Polyline* current = nullptr;
  MoveKind current_kind = MoveKind::infill;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    ss >> word;
    if (word == "LAYER") {
      int index = 0;
      ss >> index;
      program.layers.push_back({});
      program.layers.back().layer_index = index;
      current = nullptr;
    } else if (word == "PRINT" || word == "TRAVEL") {
      if (program.layers.empty())
        throw ValidationError("toolpath record before the first LAYER line");
      MoveKind kind = word == "TRAVEL" ? MoveKind::travel : MoveKind::infill;
      double x, y, z, nx, ny, nz;
      if (!(ss >> x >> y >> z >> nx >> ny >> nz))
        throw ValidationError("malformed toolpath record: '" + line + "'");
      if (!current || kind != current_kind) {
        program.layers.back().paths.push_back({});
        current = &program.layers.back().paths.back();
        current->kind = kind;
        current_kind = kind;
      }
      current->points.emplace_back(x, y, z);
      current->normals.emplace_back(nx, ny, nz);
    } else {
      throw ValidationError("unknown toolpath record kind '" + word + "'");
    }
  }
  for (auto& layer : program.layers)
    for (auto& p : layer.paths)
      if (p.kind != MoveKind::travel) layer.print_length += p.length();
  return program;
}

}  // namespace stresspath
