#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "stresspath/fea.hpp"
#include "stresspath/slicing.hpp"

namespace testsupport {

// Unique scratch directory under the build tree, cleaned on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("stresspath_" + tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
             std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Uniform uniaxial stress field sigma_xx = value on every node.
inline stresspath::StressTensorField uniaxial_stress(std::size_t nodes, double value) {
  stresspath::StressTensorField field;
  field.tensors.assign(nodes, {value, 0, 0, 0, 0, 0});
  return field;
}

// A slice-like object from a triangle mesh with a uniform stress tensor.
inline stresspath::Slice slice_from_mesh(const stresspath::TriMesh& mesh,
                                         const std::array<double, 6>& tensor) {
  stresspath::Slice slice;
  slice.surface = mesh;
  slice.tensors.assign(mesh.vertex_count(), tensor);
  stresspath::StressTensorField field;
  field.tensors = slice.tensors;
  slice.stress = stresspath::principal_decomposition(field).nodes;
  slice.normals = stresspath::vertex_normals(mesh);
  return slice;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(20240817u);
  return gen;
}

}  // namespace testsupport
