#include "stresspath/stressflow.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <queue>

namespace stresspath {

long TangentFlow::valid_count() const {
  long n = 0;
  for (char v : valid) n += v ? 1 : 0;
  return n;
}

long CriticalMask::count() const {
  long n = 0;
  for (char v : flags) n += v ? 1 : 0;
  return n;
}

TangentFlow project_orthogonal(const Slice& slice) {
  const std::size_t n = slice.surface.vertex_count();
  if (slice.stress.size() != n || slice.normals.size() != n)
    throw ValidationError("slice is missing stress or normals");

  TangentFlow flow;
  flow.stage = FlowStage::projected_orthogonal;
  flow.vectors.assign(n, Vec3::Zero());
  flow.valid.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const Vec3& f = slice.stress[v].d1;
    const Vec3& normal = slice.normals[v];
    Vec3 u = f - (f.dot(normal) / normal.dot(normal)) * normal;
    if (u.norm() <= 1e-8 * f.norm()) continue;  // stress normal to the slice
    Vec3 rotated = u.cross(normal);
    double len = rotated.norm();
    if (len <= 0) continue;
    flow.vectors[v] = rotated / len;
    flow.valid[v] = 1;
  }
  return flow;
}

TangentFlow rectify(const TangentFlow& flow, RectifyInfo* info, RectifyAxisMode mode) {
  if (flow.stage == FlowStage::preprocessed)
    throw ValidationError("rectify expects a projected flow, got a preprocessed one");
  if (flow.valid_count() == 0)
    throw ComputeError("all flow vectors are invalid; cannot rectify");

  RectifyInfo local;
  for (std::size_t v = 0; v < flow.vectors.size(); ++v) {
    if (!flow.valid[v]) continue;
    for (int i = 0; i < 3; ++i) local.scores[i] += std::abs(flow.vectors[v][i]);
  }
  local.axis = 0;
  for (int i = 1; i < 3; ++i)
    if (local.scores[i] > local.scores[local.axis]) local.axis = i;
  {
    std::array<double, 3> sorted = local.scores;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    local.ambiguous = sorted[0] > 0 && (sorted[0] - sorted[1]) < 0.1 * sorted[0];
  }

  Vec3 axis_dir = Vec3::Unit(local.axis);
  if (mode == RectifyAxisMode::pca) {
    // Orientation-blind covariance of the field; its top eigenvector is the
    // dominant flow direction even when that direction is diagonal.
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (std::size_t v = 0; v < flow.vectors.size(); ++v)
      if (flow.valid[v]) cov += flow.vectors[v] * flow.vectors[v].transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    axis_dir = eig.eigenvectors().col(2);
    int imax = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(axis_dir[i]) > std::abs(axis_dir[imax])) imax = i;
    if (axis_dir[imax] < 0) axis_dir = -axis_dir;
  }
  local.axis_direction = axis_dir;

  TangentFlow out = flow;
  out.stage = FlowStage::rectified;
  for (std::size_t v = 0; v < out.vectors.size(); ++v) {
    if (!out.valid[v]) continue;
    if (out.vectors[v].dot(axis_dir) < 0) out.vectors[v] = -out.vectors[v];
  }
  if (info) *info = local;
  return out;
}

CriticalMask classify_critical(const Slice& slice, double theta_a, double theta_s,
                               double global_max_s1) {
  if (!(theta_a > 1.0))
    throw ValidationError("theta_a must be > 1, got " + std::to_string(theta_a));
  if (!(theta_s > 0.0 && theta_s < 1.0))
    throw ValidationError("theta_s must lie in (0, 1), got " + std::to_string(theta_s));
  if (global_max_s1 < 0) throw ValidationError("global max |s1| must be >= 0");

  CriticalMask mask;
  mask.theta_a = theta_a;
  mask.theta_s = theta_s;
  mask.flags.assign(slice.stress.size(), 0);
  if (global_max_s1 == 0) return mask;  // no stress anywhere
  for (std::size_t v = 0; v < slice.stress.size(); ++v) {
    const double s1 = std::abs(slice.stress[v].s1);
    const double s3 = std::abs(slice.stress[v].s3);
    const bool anisotropic = (s3 == 0.0) ? (s1 > 0.0) : (s1 / s3 > theta_a);
    const bool significant = s1 / global_max_s1 > theta_s;
    mask.flags[v] = (anisotropic && significant) ? 1 : 0;
  }
  return mask;
}

namespace {

std::vector<std::vector<int>> vertex_adjacency(const TriMesh& mesh) {
  std::vector<std::vector<int>> adj(mesh.vertex_count());
  for (const auto& f : mesh.faces)
    for (int e = 0; e < 3; ++e) {
      int a = f[e], b = f[(e + 1) % 3];
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

}  // namespace

int critical_component_count(const Slice& slice, const CriticalMask& mask) {
  auto adj = vertex_adjacency(slice.surface);
  std::vector<char> seen(slice.surface.vertex_count(), 0);
  int components = 0;
  for (std::size_t seed = 0; seed < seen.size(); ++seed) {
    if (seen[seed] || !mask.flags[seed]) continue;
    ++components;
    std::queue<int> queue;
    queue.push(static_cast<int>(seed));
    seen[seed] = 1;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop();
      for (int w : adj[v])
        if (!seen[w] && mask.flags[w]) {
          seen[w] = 1;
          queue.push(w);
        }
    }
  }
  return components;
}

TangentFlow extrapolate_uncritical(const Slice& slice, const TangentFlow& rectified,
                                   const CriticalMask& mask, const SolveOptions& opts) {
  if (rectified.stage != FlowStage::rectified)
    throw ValidationError("extrapolate_uncritical expects a rectified flow");
  const std::size_t n = slice.surface.vertex_count();
  if (rectified.vectors.size() != n || mask.flags.size() != n)
    throw ValidationError("flow/mask size does not match the slice");
  if (mask.count() == 0)
    throw ValidationError("critical mask is empty; nothing to extrapolate from");

  // Unknowns: uncritical vertices plus any vertex the projection flagged
  // invalid. Everything else keeps its rectified vector.
  std::vector<char> unknown(n, 0);
  bool any_unknown = false;
  for (std::size_t v = 0; v < n; ++v) {
    unknown[v] = (!mask.flags[v] || !rectified.valid[v]) ? 1 : 0;
    any_unknown |= unknown[v] != 0;
  }

  TangentFlow out = rectified;
  out.stage = FlowStage::preprocessed;
  if (!any_unknown) return out;

  Vec3 mean_dir = Vec3::Zero();
  for (std::size_t v = 0; v < n; ++v)
    if (!unknown[v]) mean_dir += rectified.vectors[v];
  if (mean_dir.norm() < 1e-12) mean_dir = Vec3::UnitX();

  // Group unknown vertices into connected components and find which touch
  // fixed data; isolated ones get the mean direction instead of a solve.
  auto adj = vertex_adjacency(slice.surface);
  std::vector<int> component(n, -1);
  std::vector<char> component_has_boundary;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!unknown[seed] || component[seed] >= 0) continue;
    int id = static_cast<int>(component_has_boundary.size());
    component_has_boundary.push_back(0);
    std::queue<int> queue;
    queue.push(static_cast<int>(seed));
    component[seed] = id;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop();
      for (int w : adj[v]) {
        if (unknown[w] && component[w] < 0) {
          component[w] = id;
          queue.push(w);
        }
        if (!unknown[w]) component_has_boundary[id] = 1;
      }
    }
  }
  for (std::size_t id = 0; id < component_has_boundary.size(); ++id)
    if (!component_has_boundary[id])
      log_warn("uncritical region " + std::to_string(id) +
               " has no critical boundary; filling with the mean rectified direction");

  std::vector<int> solve_index(n, -1);
  int n_solve = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (unknown[v] && component_has_boundary[component[v]]) solve_index[v] = n_solve++;

  if (n_solve > 0) {
    auto [grad, ops] = build_operators(slice.surface);
    (void)grad;
    const auto& lap = ops.laplacian;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n_solve, 3);
    for (int k = 0; k < lap.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(lap, k); it; ++it) {
        const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
        if (solve_index[r] < 0) continue;
        if (solve_index[c] >= 0) {
          trip.emplace_back(solve_index[r], solve_index[c], it.value());
        } else if (!unknown[c]) {
          rhs.row(solve_index[r]) -= it.value() * rectified.vectors[c].transpose();
        }
        // Unknown-but-unsolved neighbours contribute nothing: they belong to
        // boundary-free components, disconnected from solved ones.
      }
    SparseMatrix system(n_solve, n_solve, trip, true);
    Eigen::MatrixXd solution(n_solve, 3);
    for (int c = 0; c < 3; ++c) solution.col(c) = solve_spd(system, rhs.col(c), opts);
    for (std::size_t v = 0; v < n; ++v)
      if (solve_index[v] >= 0) out.vectors[v] = solution.row(solve_index[v]).transpose();
  }

  // Project to the tangent plane and normalize; Eq-constraint f.n = 0.
  for (std::size_t v = 0; v < n; ++v) {
    if (!unknown[v]) continue;
    Vec3 w = solve_index[v] >= 0 ? out.vectors[v] : mean_dir;
    const Vec3& normal = slice.normals[v];
    Vec3 tangent = w - w.dot(normal) * normal;
    if (tangent.norm() < 1e-12) {
      tangent = mean_dir - mean_dir.dot(normal) * normal;
      if (tangent.norm() < 1e-12) {
        // Pick the Cartesian axis least parallel to the normal.
        int least = 0;
        for (int i = 1; i < 3; ++i)
          if (std::abs(normal[i]) < std::abs(normal[least])) least = i;
        tangent = Vec3::Unit(least) - normal[least] * normal;
      }
    }
    out.vectors[v] = tangent.normalized();
    out.valid[v] = 1;
  }
  return out;
}

}  // namespace stresspath
