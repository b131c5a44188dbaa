#include "stresspath/operators.hpp"

#include <Eigen/Dense>
#include <vector>

namespace stresspath {

Vec3 FaceGradientOperator::face_gradient(int f, const Eigen::VectorXd& scalars) const {
  Eigen::VectorXd rows = matrix.middleRows(3 * f, 3) * scalars;
  return Vec3(rows[0], rows[1], rows[2]);
}

std::pair<FaceGradientOperator, DiscreteOperators> build_operators(const TriMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertex_count());
  const int nf = static_cast<int>(mesh.face_count());

  FaceGradientOperator grad;
  grad.face_area.resize(nf);
  std::vector<Eigen::Triplet<double>> g_trip;
  g_trip.reserve(static_cast<std::size_t>(nf) * 9);
  std::vector<Eigen::Triplet<double>> l_trip;
  l_trip.reserve(static_cast<std::size_t>(nf) * 9);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(nv);

  for (int f = 0; f < nf; ++f) {
    const auto& t = mesh.faces[f];
    const Vec3& p0 = mesh.vertices[t[0]];
    const Vec3& p1 = mesh.vertices[t[1]];
    const Vec3& p2 = mesh.vertices[t[2]];
    Vec3 n = (p1 - p0).cross(p2 - p0);
    double double_area = n.norm();
    double area = 0.5 * double_area;
    if (area <= kDegenerateFaceArea)
      throw ValidationError("degenerate face " + std::to_string(f) + " (area " +
                            std::to_string(area) + " mm^2)");
    n /= double_area;
    grad.face_area[f] = area;

    // grad(hat_i) = n x e_i / (2A), with e_i the edge opposite vertex i.
    Vec3 g[3];
    g[0] = n.cross(p2 - p1) / double_area;
    g[1] = n.cross(p0 - p2) / double_area;
    g[2] = n.cross(p1 - p0) / double_area;

    for (int i = 0; i < 3; ++i) {
      for (int c = 0; c < 3; ++c) g_trip.emplace_back(3 * f + c, t[i], g[i][c]);
      mass[t[i]] += area / 3.0;
      for (int j = 0; j < 3; ++j) l_trip.emplace_back(t[i], t[j], area * g[i].dot(g[j]));
    }
  }

  grad.matrix.resize(3 * nf, nv);
  grad.matrix.setFromTriplets(g_trip.begin(), g_trip.end());

  DiscreteOperators ops;
  ops.laplacian.resize(nv, nv);
  ops.laplacian.setFromTriplets(l_trip.begin(), l_trip.end());
  ops.mass = mass;
  return {std::move(grad), std::move(ops)};
}

Eigen::Matrix<double, 4, 3> tet_shape_gradients(const TetMesh& mesh, int t) {
  const auto& q = mesh.tets[t];
  Eigen::Matrix3d edges;
  edges.col(0) = mesh.vertices[q[1]] - mesh.vertices[q[0]];
  edges.col(1) = mesh.vertices[q[2]] - mesh.vertices[q[0]];
  edges.col(2) = mesh.vertices[q[3]] - mesh.vertices[q[0]];
  Eigen::Matrix3d inv = edges.inverse();
  Eigen::Matrix<double, 4, 3> g;
  for (int i = 0; i < 3; ++i) g.row(i + 1) = inv.row(i);
  g.row(0) = -(g.row(1) + g.row(2) + g.row(3));
  return g;
}

Vec3 TetOperators::tet_gradient(int t, const Eigen::VectorXd& scalars) const {
  Eigen::VectorXd rows = gradient.middleRows(3 * t, 3) * scalars;
  return Vec3(rows[0], rows[1], rows[2]);
}

TetOperators build_tet_operators(const TetMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertex_count());
  const int nt = static_cast<int>(mesh.tet_count());

  TetOperators ops;
  ops.tet_volume.resize(nt);
  std::vector<Eigen::Triplet<double>> g_trip;
  g_trip.reserve(static_cast<std::size_t>(nt) * 12);
  std::vector<Eigen::Triplet<double>> l_trip;
  l_trip.reserve(static_cast<std::size_t>(nt) * 16);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(nv);

  for (int t = 0; t < nt; ++t) {
    double vol = mesh.tet_volume(t);
    if (vol <= 0.0)
      throw ValidationError("tet " + std::to_string(t) + " has non-positive volume");
    ops.tet_volume[t] = vol;
    Eigen::Matrix<double, 4, 3> g = tet_shape_gradients(mesh, t);
    const auto& q = mesh.tets[t];
    for (int i = 0; i < 4; ++i) {
      for (int c = 0; c < 3; ++c) g_trip.emplace_back(3 * t + c, q[i], g(i, c));
      mass[q[i]] += vol / 4.0;
      for (int j = 0; j < 4; ++j)
        l_trip.emplace_back(q[i], q[j], vol * g.row(i).dot(g.row(j)));
    }
  }

  ops.gradient.resize(3 * nt, nv);
  ops.gradient.setFromTriplets(g_trip.begin(), g_trip.end());
  ops.laplacian.resize(nv, nv);
  ops.laplacian.setFromTriplets(l_trip.begin(), l_trip.end());
  ops.mass = mass;
  return ops;
}

}  // namespace stresspath
