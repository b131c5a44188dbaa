#pragma once

#include <Eigen/SparseCore>

#include "stresspath/mesh.hpp"

namespace stresspath {

// Piecewise-linear gradient on a triangle mesh: a sparse (3F x V) map taking
// per-vertex scalars to per-face 3D gradients. Rows 3f..3f+2 hold the x/y/z
// components for face f. Constants map to zero; on a planar mesh the
// gradient of a linear field is exact.
struct FaceGradientOperator {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd face_area;

  Vec3 face_gradient(int f, const Eigen::VectorXd& scalars) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& scalars) const { return matrix * scalars; }
};

// Stiffness (cotangent) Laplacian, positive semi-definite with zero row
// sums, and the lumped mass matrix diagonal (area/3 per vertex, mm^2).
struct DiscreteOperators {
  Eigen::SparseMatrix<double> laplacian;
  Eigen::VectorXd mass;
};

std::pair<FaceGradientOperator, DiscreteOperators> build_operators(const TriMesh& mesh);

// Volumetric analogue on a tet mesh: per-tet gradients (3T x V), linear FEM
// stiffness Laplacian, and lumped mass (volume/4 per vertex, mm^3).
struct TetOperators {
  Eigen::SparseMatrix<double> gradient;
  Eigen::VectorXd tet_volume;
  Eigen::SparseMatrix<double> laplacian;
  Eigen::VectorXd mass;

  Vec3 tet_gradient(int t, const Eigen::VectorXd& scalars) const;
};

TetOperators build_tet_operators(const TetMesh& mesh);

// Gradients of the four linear shape functions of one tet, rows 0..3.
Eigen::Matrix<double, 4, 3> tet_shape_gradients(const TetMesh& mesh, int t);

}  // namespace stresspath
