#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "stresspath/mesh.hpp"
#include "stresspath/sparse.hpp"

namespace stresspath {

// Isotropic material. The stress field of the linear problem does not depend
// on the Young's modulus (stiffness and strain scale inversely), so E only
// affects the reported displacements.
struct Material {
  double young_modulus = 2.0e9;  // Pa
  double poisson_ratio = 0.3;

  void validate() const;
};

struct BoundaryConditions {
  struct Fix {
    int node = -1;
    std::array<bool, 3> axes = {true, true, true};
    Vec3 value = Vec3::Zero();  // prescribed displacement, mm
  };
  struct Load {
    int node = -1;
    Vec3 force = Vec3::Zero();  // N
  };
  std::vector<Fix> fixed;
  std::vector<Load> loads;

  // Requires at least 3 non-collinear fully fixed nodes and in-range indices.
  void validate(const TetMesh& mesh) const;
};

// Per-node symmetric Cauchy tensor, Voigt order xx, yy, zz, xy, xz, yz (Pa).
struct StressTensorField {
  std::vector<std::array<double, 6>> tensors;

  std::size_t size() const { return tensors.size(); }
  Eigen::Matrix3d tensor(int node) const;
  static std::array<double, 6> to_voigt(const Eigen::Matrix3d& m);
};

// Principal values ordered by descending magnitude, |s1| >= |s2| >= |s3|,
// with orthonormal unit directions. Sign convention: the largest-magnitude
// component of each direction is positive.
struct PrincipalStressField {
  struct Entry {
    double s1 = 0, s2 = 0, s3 = 0;
    Vec3 d1 = Vec3::UnitX(), d2 = Vec3::UnitY(), d3 = Vec3::UnitZ();
  };
  std::vector<Entry> nodes;

  std::size_t size() const { return nodes.size(); }
  double max_abs_s1() const;
};

struct ElasticitySolution {
  std::vector<Vec3> displacements;  // mm
  StressTensorField stress;
};

// Linear tet4 elasticity. Element stress is constant per tet; nodal stress is
// the volume-weighted average over incident elements.
ElasticitySolution solve_elasticity(const TetMesh& mesh, const Material& material,
                                    const BoundaryConditions& bc,
                                    const SolveOptions& opts = {1e-10, 0,
                                                                SolveOptions::Method::direct});

PrincipalStressField principal_decomposition(const StressTensorField& field);

// Stress CSV exchange format: header "node,sxx,syy,szz,sxy,sxz,syz", Pa,
// node indices matching the .node file.
StressTensorField load_stress_csv(const std::filesystem::path& path, std::size_t node_count);
void save_stress_csv(const StressTensorField& field, const std::filesystem::path& path);

}  // namespace stresspath
