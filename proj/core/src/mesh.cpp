#include "stresspath/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace stresspath {

namespace {

std::string fmt_index(int i) { return std::to_string(i); }

// Round-trippable double formatting shared by the text writers.
void write_double(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  os << buf;
}

}  // namespace

// ---------------------------------------------------------------- TriMesh

Vec3 TriMesh::face_normal(int f) const {
  const auto& t = faces[f];
  Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
  double len = n.norm();
  if (len <= 0.0) return Vec3::Zero();
  return n / len;
}

double TriMesh::face_area(int f) const {
  const auto& t = faces[f];
  return 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) a += face_area(static_cast<int>(f));
  return a;
}

double TriMesh::mean_edge_length() const {
  double sum = 0.0;
  long count = 0;
  for (const auto& t : faces) {
    for (int e = 0; e < 3; ++e) {
      sum += (vertices[t[(e + 1) % 3]] - vertices[t[e]]).norm();
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::vector<std::array<int, 2>> TriMesh::boundary_edges() const {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : faces) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}]++;
    }
  }
  std::vector<std::array<int, 2>> edges;
  for (const auto& t : faces) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (edge_count[{std::min(a, b), std::max(a, b)}] == 1) edges.push_back({a, b});
    }
  }
  return edges;
}

// ---------------------------------------------------------------- TetMesh

double TetMesh::tet_volume(int t) const {
  const auto& q = tets[t];
  return (vertices[q[1]] - vertices[q[0]])
             .dot((vertices[q[2]] - vertices[q[0]]).cross(vertices[q[3]] - vertices[q[0]])) /
         6.0;
}

double TetMesh::total_volume() const {
  double v = 0.0;
  for (std::size_t t = 0; t < tets.size(); ++t) v += tet_volume(static_cast<int>(t));
  return v;
}

double TetMesh::mean_edge_length() const {
  static const int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  double sum = 0.0;
  long count = 0;
  for (const auto& q : tets) {
    for (const auto& p : pairs) {
      sum += (vertices[q[p[1]]] - vertices[q[p[0]]]).norm();
      ++count;
    }
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::vector<int> TetMesh::boundary_vertices() const {
  std::vector<char> seen(vertices.size(), 0);
  for (const auto& f : boundary_faces)
    for (int v : f) seen[v] = 1;
  std::vector<int> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<std::array<int, 3>> extract_boundary_faces(
    const std::vector<std::array<int, 4>>& tets) {
  // Outward-wound faces of a positive-volume tet (v0,v1,v2,v3).
  static const int local[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};
  std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> count;
  for (const auto& q : tets) {
    for (const auto& lf : local) {
      std::array<int, 3> face = {q[lf[0]], q[lf[1]], q[lf[2]]};
      std::array<int, 3> key = face;
      std::sort(key.begin(), key.end());
      auto it = count.find(key);
      if (it == count.end())
        count.emplace(key, std::make_pair(1, face));
      else
        it->second.first++;
    }
  }
  std::vector<std::array<int, 3>> boundary;
  for (const auto& [key, val] : count)
    if (val.first == 1) boundary.push_back(val.second);
  return boundary;
}

TriMesh boundary_trimesh(const TetMesh& mesh) {
  TriMesh out;
  std::vector<int> remap(mesh.vertex_count(), -1);
  for (const auto& face : mesh.boundary_faces) {
    std::array<int, 3> tri;
    for (int c = 0; c < 3; ++c) {
      int v = face[c];
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(mesh.vertices[v]);
      }
      tri[c] = remap[v];
    }
    out.faces.push_back(tri);
  }
  return out;
}

// ------------------------------------------------------------ .node/.ele

namespace {

struct IndexedRows {
  std::vector<long> indices;
  std::vector<std::vector<double>> values;
};

IndexedRows read_indexed_rows(const std::filesystem::path& path, int min_values,
                              const char* what) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + std::string(what) + " file: " + path.string());
  IndexedRows rows;
  std::string line;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    std::vector<double> tokens;
    double v;
    while (ss >> v) tokens.push_back(v);
    if (tokens.empty()) continue;
    // TetGen files start with a header row (counts and attribute flags).
    if (first_data_line && tokens.size() < static_cast<std::size_t>(min_values + 1)) {
      first_data_line = false;
      continue;
    }
    first_data_line = false;
    if (tokens.size() < static_cast<std::size_t>(min_values + 1))
      throw ValidationError(std::string(what) + " row with too few columns in " + path.string());
    rows.indices.push_back(static_cast<long>(tokens[0]));
    rows.values.emplace_back(tokens.begin() + 1, tokens.begin() + 1 + min_values);
  }
  if (rows.indices.empty())
    throw ValidationError("empty " + std::string(what) + " file: " + path.string());
  return rows;
}

}  // namespace

TetMesh load_tet_mesh(const std::filesystem::path& node_path,
                      const std::filesystem::path& ele_path) {
  IndexedRows nodes = read_indexed_rows(node_path, 3, "node");
  IndexedRows eles = read_indexed_rows(ele_path, 4, "ele");

  long node_base = *std::min_element(nodes.indices.begin(), nodes.indices.end());
  if (node_base != 0 && node_base != 1)
    throw ValidationError("node file must be 0- or 1-based, got first index " +
                          std::to_string(node_base));

  TetMesh mesh;
  mesh.vertices.resize(nodes.indices.size());
  std::vector<char> filled(nodes.indices.size(), 0);
  for (std::size_t i = 0; i < nodes.indices.size(); ++i) {
    long idx = nodes.indices[i] - node_base;
    if (idx < 0 || idx >= static_cast<long>(mesh.vertices.size()))
      throw ValidationError("non-contiguous node index " + std::to_string(nodes.indices[i]));
    mesh.vertices[idx] = Vec3(nodes.values[i][0], nodes.values[i][1], nodes.values[i][2]);
    filled[idx] = 1;
  }
  for (std::size_t i = 0; i < filled.size(); ++i)
    if (!filled[i]) throw ValidationError("missing node index " + std::to_string(i + node_base));

  mesh.tets.reserve(eles.indices.size());
  const long n = static_cast<long>(mesh.vertices.size());
  for (std::size_t e = 0; e < eles.indices.size(); ++e) {
    std::array<int, 4> q;
    for (int j = 0; j < 4; ++j) {
      long idx = static_cast<long>(eles.values[e][j]) - node_base;
      if (idx < 0 || idx >= n)
        throw ValidationError("ele row " + std::to_string(eles.indices[e]) +
                              " references node " +
                              std::to_string(static_cast<long>(eles.values[e][j])) +
                              " outside the node file");
      q[j] = static_cast<int>(idx);
    }
    mesh.tets.push_back(q);
  }

  // Canonical ordering: positive signed volume. A negative tet is fixed by
  // swapping two vertices; a zero-volume one cannot be fixed at all.
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    double vol = mesh.tet_volume(static_cast<int>(t));
    double scale = std::pow(mesh.mean_edge_length(), 3);
    if (std::abs(vol) <= 1e-14 * std::max(scale, 1.0))
      throw ValidationError("tet " + fmt_index(static_cast<int>(t)) +
                            " is degenerate (volume " + std::to_string(vol) + ")");
    if (vol < 0) std::swap(mesh.tets[t][2], mesh.tets[t][3]);
  }

  mesh.boundary_faces = extract_boundary_faces(mesh.tets);
  return mesh;
}

void save_tet_mesh(const TetMesh& mesh, const std::filesystem::path& node_path,
                   const std::filesystem::path& ele_path) {
  std::ofstream node(node_path);
  if (!node) throw ValidationError("cannot write " + node_path.string());
  node << mesh.vertices.size() << " 3 0 0\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    node << i;
    for (int k = 0; k < 3; ++k) {
      node << ' ';
      write_double(node, mesh.vertices[i][k]);
    }
    node << '\n';
  }
  std::ofstream ele(ele_path);
  if (!ele) throw ValidationError("cannot write " + ele_path.string());
  ele << mesh.tets.size() << " 4 0\n";
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    ele << t;
    for (int j = 0; j < 4; ++j) ele << ' ' << mesh.tets[t][j];
    ele << '\n';
  }
}

// ------------------------------------------------------------- OBJ / STL

namespace {

TriMesh parse_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  TriMesh mesh;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z))
        throw ValidationError("bad vertex at " + path.string() + ":" + std::to_string(line_no));
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) {
        // "i", "i/t", "i/t/n", "i//n" all start with the vertex index.
        int v = std::stoi(tok.substr(0, tok.find('/')));
        if (v <= 0 || v > static_cast<int>(mesh.vertices.size()))
          throw ValidationError("face references missing vertex " + std::to_string(v) + " at " +
                                path.string() + ":" + std::to_string(line_no));
        idx.push_back(v - 1);
      }
      if (idx.size() < 3)
        throw ValidationError("face with fewer than 3 vertices at " + path.string() + ":" +
                              std::to_string(line_no));
      for (std::size_t k = 2; k < idx.size(); ++k)
        mesh.faces.push_back({idx[0], idx[static_cast<int>(k) - 1], idx[static_cast<int>(k)]});
    }
  }
  if (mesh.vertices.empty()) throw ValidationError("no vertices in " + path.string());
  return mesh;
}

// Spatial-hash weld used by the STL reader.
class VertexWelder {
 public:
  explicit VertexWelder(double tol) : tol_(tol) {}

  int add(const Vec3& p, std::vector<Vec3>& vertices) {
    const std::int64_t ix = static_cast<std::int64_t>(std::floor(p.x() / tol_));
    const std::int64_t iy = static_cast<std::int64_t>(std::floor(p.y() / tol_));
    const std::int64_t iz = static_cast<std::int64_t>(std::floor(p.z() / tol_));
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy)
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key(ix + dx, iy + dy, iz + dz));
          if (it == cells_.end()) continue;
          for (int idx : it->second)
            if ((vertices[idx] - p).norm() <= tol_) return idx;
        }
    int idx = static_cast<int>(vertices.size());
    vertices.push_back(p);
    cells_[key(ix, iy, iz)].push_back(idx);
    return idx;
  }

 private:
  static std::uint64_t key(std::int64_t x, std::int64_t y, std::int64_t z) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t v : {x, y, z}) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
  double tol_;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
};

TriMesh parse_stl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  char header[80];
  in.read(header, 80);
  std::uint32_t n_facets = 0;
  in.read(reinterpret_cast<char*>(&n_facets), 4);
  if (!in) throw ValidationError("truncated STL header in " + path.string());

  TriMesh mesh;
  VertexWelder welder(kStlWeldTolerance);
  for (std::uint32_t f = 0; f < n_facets; ++f) {
    float data[12];
    in.read(reinterpret_cast<char*>(data), 48);
    std::uint16_t attr;
    in.read(reinterpret_cast<char*>(&attr), 2);
    if (!in) throw ValidationError("truncated STL facet in " + path.string());
    std::array<int, 3> tri;
    for (int c = 0; c < 3; ++c) {
      Vec3 p(data[3 + 3 * c], data[4 + 3 * c], data[5 + 3 * c]);
      tri[c] = welder.add(p, mesh.vertices);
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;  // collapsed facet
    mesh.faces.push_back(tri);
  }
  if (mesh.faces.empty()) throw ValidationError("no facets in " + path.string());
  return mesh;
}

// Flip faces until winding agrees across every interior edge. Errors on
// non-manifold edges (>2 faces) and non-orientable surfaces.
void make_winding_consistent(TriMesh& mesh) {
  std::map<std::pair<int, int>, std::vector<int>> edge_faces;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      auto key = std::make_pair(std::min(a, b), std::max(a, b));
      edge_faces[key].push_back(static_cast<int>(f));
      if (edge_faces[key].size() > 2)
        throw ValidationError("non-manifold edge (" + fmt_index(a) + ", " + fmt_index(b) +
                              ") shared by more than two faces");
    }
  }

  auto traverses_forward = [&](int f, int a, int b) {
    const auto& t = mesh.faces[f];
    for (int e = 0; e < 3; ++e)
      if (t[e] == a && t[(e + 1) % 3] == b) return true;
    return false;
  };

  std::vector<int> state(mesh.faces.size(), 0);  // 0 unvisited, 1 queued/done
  for (std::size_t seed = 0; seed < mesh.faces.size(); ++seed) {
    if (state[seed]) continue;
    std::vector<int> stack = {static_cast<int>(seed)};
    state[seed] = 1;
    while (!stack.empty()) {
      int f = stack.back();
      stack.pop_back();
      const auto t = mesh.faces[f];
      for (int e = 0; e < 3; ++e) {
        int a = t[e], b = t[(e + 1) % 3];
        auto key = std::make_pair(std::min(a, b), std::max(a, b));
        for (int g : edge_faces[key]) {
          if (g == f) continue;
          bool same_direction = traverses_forward(g, a, b);
          if (!state[g]) {
            if (same_direction) std::swap(mesh.faces[g][1], mesh.faces[g][2]);
            state[g] = 1;
            stack.push_back(g);
          } else if (same_direction) {
            throw ValidationError("surface is not orientable near edge (" + fmt_index(a) + ", " +
                                  fmt_index(b) + ")");
          }
        }
      }
    }
  }
}

}  // namespace

TriMesh load_tri_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  TriMesh mesh;
  if (ext == ".obj")
    mesh = parse_obj(path);
  else if (ext == ".stl")
    mesh = parse_stl(path);
  else
    throw ValidationError("unreadable mesh format '" + ext + "' (expected .obj or .stl)");

  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    for (int v : mesh.faces[f])
      if (v < 0 || v >= static_cast<int>(mesh.vertices.size()))
        throw ValidationError("face " + fmt_index(static_cast<int>(f)) + " index out of range");

  make_winding_consistent(mesh);
  return mesh;
}

void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  for (const auto& v : mesh.vertices) {
    out << "v";
    for (int k = 0; k < 3; ++k) {
      out << ' ';
      write_double(out, v[k]);
    }
    out << '\n';
  }
  for (const auto& f : mesh.faces)
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

std::vector<Vec3> vertex_normals(const TriMesh& mesh) {
  std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
  std::vector<char> touched(mesh.vertices.size(), 0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    Vec3 n = mesh.face_normal(static_cast<int>(f));
    for (int c = 0; c < 3; ++c) {
      const Vec3 e0 = (mesh.vertices[t[(c + 1) % 3]] - mesh.vertices[t[c]]).normalized();
      const Vec3 e1 = (mesh.vertices[t[(c + 2) % 3]] - mesh.vertices[t[c]]).normalized();
      double angle = std::acos(std::clamp(e0.dot(e1), -1.0, 1.0));
      normals[t[c]] += angle * n;
      touched[t[c]] = 1;
    }
  }
  for (std::size_t v = 0; v < normals.size(); ++v) {
    if (!touched[v])
      throw ValidationError("isolated vertex " + fmt_index(static_cast<int>(v)) +
                            " has no incident face");
    double len = normals[v].norm();
    normals[v] = len > 0 ? Vec3(normals[v] / len) : Vec3(0, 0, 1);
  }
  return normals;
}

}  // namespace stresspath
