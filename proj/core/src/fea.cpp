#include "stresspath/fea.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "stresspath/operators.hpp"

namespace stresspath {

void Material::validate() const {
  if (!(young_modulus > 0.0))
    throw ValidationError("young_modulus must be positive, got " +
                          std::to_string(young_modulus));
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5))
    throw ValidationError("poisson_ratio must lie in (-1, 0.5), got " +
                          std::to_string(poisson_ratio));
}

void BoundaryConditions::validate(const TetMesh& mesh) const {
  const int n = static_cast<int>(mesh.vertex_count());
  std::vector<Vec3> fully_fixed;
  for (const auto& f : fixed) {
    if (f.node < 0 || f.node >= n)
      throw ValidationError("fixed node " + std::to_string(f.node) + " out of range");
    if (f.axes[0] && f.axes[1] && f.axes[2]) fully_fixed.push_back(mesh.vertices[f.node]);
  }
  for (const auto& l : loads)
    if (l.node < 0 || l.node >= n)
      throw ValidationError("loaded node " + std::to_string(l.node) + " out of range");

  if (fully_fixed.size() < 3)
    throw ValidationError("need at least 3 fully fixed nodes to remove rigid modes, got " +
                          std::to_string(fully_fixed.size()));
  const double scale = mesh.mean_edge_length();
  bool non_collinear = false;
  for (std::size_t i = 0; i < fully_fixed.size() && !non_collinear; ++i)
    for (std::size_t j = i + 1; j < fully_fixed.size() && !non_collinear; ++j)
      for (std::size_t k = j + 1; k < fully_fixed.size() && !non_collinear; ++k) {
        Vec3 a = fully_fixed[j] - fully_fixed[i];
        Vec3 b = fully_fixed[k] - fully_fixed[i];
        if (a.cross(b).norm() > 1e-9 * scale * scale) non_collinear = true;
      }
  if (!non_collinear)
    throw ValidationError("fully fixed nodes are collinear; rotation about their axis is free");
}

Eigen::Matrix3d StressTensorField::tensor(int node) const {
  const auto& v = tensors[node];
  Eigen::Matrix3d m;
  m << v[0], v[3], v[4],
       v[3], v[1], v[5],
       v[4], v[5], v[2];
  return m;
}

std::array<double, 6> StressTensorField::to_voigt(const Eigen::Matrix3d& m) {
  return {m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2)};
}

double PrincipalStressField::max_abs_s1() const {
  double v = 0.0;
  for (const auto& e : nodes) v = std::max(v, std::abs(e.s1));
  return v;
}

namespace {

// Constitutive matrix for E = 1, Voigt order xx yy zz xy xz yz with
// engineering shear strains.
Eigen::Matrix<double, 6, 6> unit_constitutive(double nu) {
  Eigen::Matrix<double, 6, 6> d = Eigen::Matrix<double, 6, 6>::Zero();
  const double c = 1.0 / ((1.0 + nu) * (1.0 - 2.0 * nu));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d(i, j) = c * (i == j ? 1.0 - nu : nu);
  for (int i = 3; i < 6; ++i) d(i, i) = c * (1.0 - 2.0 * nu) / 2.0;
  return d;
}

Eigen::Matrix<double, 6, 12> strain_matrix(const Eigen::Matrix<double, 4, 3>& g) {
  Eigen::Matrix<double, 6, 12> b = Eigen::Matrix<double, 6, 12>::Zero();
  for (int i = 0; i < 4; ++i) {
    const double gx = g(i, 0), gy = g(i, 1), gz = g(i, 2);
    b(0, 3 * i + 0) = gx;
    b(1, 3 * i + 1) = gy;
    b(2, 3 * i + 2) = gz;
    b(3, 3 * i + 0) = gy;
    b(3, 3 * i + 1) = gx;
    b(4, 3 * i + 0) = gz;
    b(4, 3 * i + 2) = gx;
    b(5, 3 * i + 1) = gz;
    b(5, 3 * i + 2) = gy;
  }
  return b;
}

}  // namespace

ElasticitySolution solve_elasticity(const TetMesh& mesh, const Material& material,
                                    const BoundaryConditions& bc, const SolveOptions& opts) {
  material.validate();
  bc.validate(mesh);

  const int nv = static_cast<int>(mesh.vertex_count());
  const int ndof = 3 * nv;
  const Eigen::Matrix<double, 6, 6> d_hat = unit_constitutive(material.poisson_ratio);

  // The stiffness scales linearly with E, so the system is assembled and
  // solved with E = 1. Stress needs no rescaling; displacements divide by E
  // at the end. This keeps all downstream direction fields bit-identical
  // across moduli.
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.tet_count() * 144);
  std::vector<Eigen::Matrix<double, 6, 12>> b_mats(mesh.tet_count());
  for (int t = 0; t < static_cast<int>(mesh.tet_count()); ++t) {
    const double vol = mesh.tet_volume(t);
    const Eigen::Matrix<double, 4, 3> g = tet_shape_gradients(mesh, t);
    b_mats[t] = strain_matrix(g);
    Eigen::Matrix<double, 12, 12> ke = vol * b_mats[t].transpose() * d_hat * b_mats[t];
    const auto& q = mesh.tets[t];
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        trip.emplace_back(3 * q[i / 3] + i % 3, 3 * q[j / 3] + j % 3, ke(i, j));
  }
  Eigen::SparseMatrix<double> stiffness(ndof, ndof);
  stiffness.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd force = Eigen::VectorXd::Zero(ndof);
  for (const auto& l : bc.loads)
    for (int c = 0; c < 3; ++c) force[3 * l.node + c] += l.force[c];

  std::vector<char> constrained(ndof, 0);
  Eigen::VectorXd prescribed = Eigen::VectorXd::Zero(ndof);
  for (const auto& f : bc.fixed)
    for (int c = 0; c < 3; ++c)
      if (f.axes[c]) {
        constrained[3 * f.node + c] = 1;
        prescribed[3 * f.node + c] = f.value[c];
      }

  std::vector<int> free_index(ndof, -1);
  int n_free = 0;
  for (int i = 0; i < ndof; ++i)
    if (!constrained[i]) free_index[i] = n_free++;

  // Reduced system K_ff u_f = f_f - K_fc u_c.
  std::vector<Eigen::Triplet<double>> free_trip;
  free_trip.reserve(trip.size());
  Eigen::VectorXd rhs(n_free);
  for (int i = 0; i < ndof; ++i)
    if (free_index[i] >= 0) rhs[free_index[i]] = force[i];
  for (int k = 0; k < stiffness.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(stiffness, k); it; ++it) {
      int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (free_index[r] < 0) continue;
      if (free_index[c] >= 0)
        free_trip.emplace_back(free_index[r], free_index[c], it.value());
      else
        rhs[free_index[r]] -= it.value() * prescribed[c];
    }

  Eigen::VectorXd u_free;
  try {
    u_free = solve_spd(SparseMatrix(n_free, n_free, free_trip, true), rhs, opts);
  } catch (const ComputeError& e) {
    throw ComputeError(std::string("elastic solve failed (insufficient constraints?): ") +
                       e.what());
  }

  Eigen::VectorXd u_hat(ndof);
  for (int i = 0; i < ndof; ++i)
    u_hat[i] = free_index[i] >= 0 ? u_free[free_index[i]] : prescribed[i];

  // Constant element stress, volume-averaged to nodes.
  std::vector<Eigen::Matrix<double, 6, 1>> nodal(nv, Eigen::Matrix<double, 6, 1>::Zero());
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(nv);
  for (int t = 0; t < static_cast<int>(mesh.tet_count()); ++t) {
    const auto& q = mesh.tets[t];
    Eigen::Matrix<double, 12, 1> ue;
    for (int i = 0; i < 4; ++i) ue.segment<3>(3 * i) = u_hat.segment<3>(3 * q[i]);
    Eigen::Matrix<double, 6, 1> sigma = d_hat * (b_mats[t] * ue);
    const double vol = mesh.tet_volume(t);
    for (int i = 0; i < 4; ++i) {
      nodal[q[i]] += vol * sigma;
      weight[q[i]] += vol;
    }
  }

  ElasticitySolution out;
  out.stress.tensors.resize(nv);
  for (int v = 0; v < nv; ++v) {
    Eigen::Matrix<double, 6, 1> s =
        weight[v] > 0 ? Eigen::Matrix<double, 6, 1>(nodal[v] / weight[v])
                      : Eigen::Matrix<double, 6, 1>::Zero();
    out.stress.tensors[v] = {s[0], s[1], s[2], s[3], s[4], s[5]};
  }
  out.displacements.resize(nv);
  const double inv_e = 1.0 / material.young_modulus;
  for (int v = 0; v < nv; ++v)
    out.displacements[v] = Vec3(u_hat[3 * v], u_hat[3 * v + 1], u_hat[3 * v + 2]) * inv_e;
  return out;
}

PrincipalStressField principal_decomposition(const StressTensorField& field) {
  PrincipalStressField out;
  out.nodes.resize(field.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig;
  for (std::size_t n = 0; n < field.size(); ++n) {
    eig.compute(field.tensor(static_cast<int>(n)));
    std::array<int, 3> order = {0, 1, 2};
    const auto& vals = eig.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double da = std::abs(vals[a]), db = std::abs(vals[b]);
      if (da != db) return da > db;
      return vals[a] > vals[b];
    });

    auto signed_dir = [&](int k) {
      Vec3 d = eig.eigenvectors().col(order[k]);
      int imax = 0;
      for (int i = 1; i < 3; ++i)
        if (std::abs(d[i]) > std::abs(d[imax])) imax = i;
      if (d[imax] < 0) d = -d;
      return Vec3(d.normalized());
    };

    auto& e = out.nodes[n];
    e.s1 = vals[order[0]];
    e.s2 = vals[order[1]];
    e.s3 = vals[order[2]];
    e.d1 = signed_dir(0);
    e.d2 = signed_dir(1);
    e.d3 = signed_dir(2);
  }
  return out;
}

StressTensorField load_stress_csv(const std::filesystem::path& path, std::size_t node_count) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stress CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty stress CSV: " + path.string());
  // Tolerate whitespace in the header but require the column order.
  std::string compact;
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
  if (compact != "node,sxx,syy,szz,sxy,sxz,syz")
    throw ValidationError("stress CSV header must be 'node,sxx,syy,szz,sxy,sxz,syz', got '" +
                          line + "'");

  std::vector<std::array<double, 7>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::array<double, 7> row;
    for (double& v : row)
      if (!(ss >> v))
        throw ValidationError("malformed stress CSV row: '" + line + "'");
    rows.push_back(row);
  }
  if (rows.empty()) throw ValidationError("stress CSV has no data rows");

  long base = static_cast<long>(rows[0][0]);
  for (const auto& r : rows) base = std::min(base, static_cast<long>(r[0]));
  if (base != 0 && base != 1)
    throw ValidationError("stress CSV node indices must be 0- or 1-based");

  StressTensorField field;
  field.tensors.assign(node_count, {0, 0, 0, 0, 0, 0});
  std::vector<char> filled(node_count, 0);
  for (const auto& r : rows) {
    long idx = static_cast<long>(r[0]) - base;
    if (idx < 0 || idx >= static_cast<long>(node_count))
      throw ValidationError("stress CSV node " + std::to_string(static_cast<long>(r[0])) +
                            " outside mesh with " + std::to_string(node_count) + " nodes");
    field.tensors[idx] = {r[1], r[2], r[3], r[4], r[5], r[6]};
    filled[idx] = 1;
  }
  for (std::size_t i = 0; i < node_count; ++i)
    if (!filled[i])
      throw ValidationError("stress CSV missing node " + std::to_string(i + base));
  return field;
}

void save_stress_csv(const StressTensorField& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << "node,sxx,syy,szz,sxy,sxz,syz\n";
  char buf[32];
  for (std::size_t n = 0; n < field.size(); ++n) {
    out << n;
    for (double v : field.tensors[n]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace stresspath
