#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "stresspath/types.hpp"

namespace stresspath {

// Triangle surface mesh. Lengths in millimetres. Faces are consistently
// wound; `normals` is either empty or one unit vector per vertex.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
  std::vector<Vec3> normals;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }

  Vec3 face_normal(int f) const;
  double face_area(int f) const;
  double total_area() const;
  double mean_edge_length() const;

  // Edges incident to exactly one face, as (a, b) in face winding order.
  std::vector<std::array<int, 2>> boundary_edges() const;
};

// Tetrahedral volume mesh. Tets are stored with positive signed volume;
// boundary faces are wound so their normals point out of the solid.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<std::array<int, 3>> boundary_faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t tet_count() const { return tets.size(); }

  double tet_volume(int t) const;
  double total_volume() const;
  double mean_edge_length() const;

  // Indices of vertices referenced by at least one boundary face.
  std::vector<int> boundary_vertices() const;
};

// TetGen-style readers: .node holds "index x y z" rows, .ele holds
// "index v1 v2 v3 v4" rows. 0- or 1-based indexing is detected from the
// first index. Negative-volume tets are reordered; degenerate ones are an
// error. Boundary faces are extracted on load.
TetMesh load_tet_mesh(const std::filesystem::path& node_path,
                      const std::filesystem::path& ele_path);
void save_tet_mesh(const TetMesh& mesh, const std::filesystem::path& node_path,
                   const std::filesystem::path& ele_path);

// OBJ (v/f lines) or binary STL, chosen by file extension. STL vertices are
// welded at 1e-6 mm. Winding is made consistent; a non-orientable surface or
// an edge shared by more than two faces is an error.
TriMesh load_tri_mesh(const std::filesystem::path& path);
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

// Angle-weighted average of incident face normals. Errors on isolated
// vertices.
std::vector<Vec3> vertex_normals(const TriMesh& mesh);

// Faces of `tets` that appear in exactly one tet, wound outward.
std::vector<std::array<int, 3>> extract_boundary_faces(
    const std::vector<std::array<int, 4>>& tets);

// Boundary surface of a tet mesh as a compact TriMesh (vertices renumbered).
TriMesh boundary_trimesh(const TetMesh& mesh);

constexpr double kDegenerateFaceArea = 1e-12;  // mm^2
constexpr double kStlWeldTolerance = 1e-6;     // mm

}  // namespace stresspath
