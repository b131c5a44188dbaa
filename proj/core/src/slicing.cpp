#include "stresspath/slicing.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "parallel.hpp"

namespace stresspath {

namespace {

void check_reachable(const TetMesh& mesh, const std::vector<int>& source) {
  std::vector<std::vector<int>> vertex_tets(mesh.vertex_count());
  for (std::size_t t = 0; t < mesh.tet_count(); ++t)
    for (int v : mesh.tets[t]) vertex_tets[v].push_back(static_cast<int>(t));

  std::vector<char> visited(mesh.vertex_count(), 0);
  std::queue<int> queue;
  for (int s : source) {
    visited[s] = 1;
    queue.push(s);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (int t : vertex_tets[v])
      for (int w : mesh.tets[t])
        if (!visited[w]) {
          visited[w] = 1;
          queue.push(w);
        }
  }
  std::vector<int> unreachable;
  for (std::size_t v = 0; v < visited.size(); ++v)
    if (!visited[v]) unreachable.push_back(static_cast<int>(v));
  if (!unreachable.empty()) {
    std::ostringstream os;
    os << unreachable.size() << " nodes are unreachable from the source (first:";
    for (std::size_t i = 0; i < unreachable.size() && i < 10; ++i) os << ' ' << unreachable[i];
    os << ")";
    throw ComputeError(os.str());
  }
}

}  // namespace

DistanceField geodesic_heat(const TetMesh& mesh, const TetOperators& ops,
                            const std::vector<int>& source_nodes, const SolveOptions& opts) {
  if (source_nodes.empty()) throw ValidationError("geodesic source set is empty");
  const int nv = static_cast<int>(mesh.vertex_count());
  std::unordered_set<int> on_boundary;
  for (int v : mesh.boundary_vertices()) on_boundary.insert(v);
  for (int s : source_nodes) {
    if (s < 0 || s >= nv)
      throw ValidationError("source node " + std::to_string(s) + " out of range");
    if (!on_boundary.count(s))
      throw ValidationError("source node " + std::to_string(s) + " is not on the boundary");
  }
  check_reachable(mesh, source_nodes);

  const double h = mesh.mean_edge_length();
  const double t = h * h;

  // Step 1: short-time heat flow, (M + t L) u = u0.
  Eigen::SparseMatrix<double> heat = ops.laplacian * t;
  for (int i = 0; i < nv; ++i) heat.coeffRef(i, i) += ops.mass[i];
  Eigen::VectorXd u0 = Eigen::VectorXd::Zero(nv);
  for (int s : source_nodes) u0[s] = 1.0;
  Eigen::VectorXd u = solve_spd(SparseMatrix(std::move(heat), true), u0, opts);

  // Step 2: X = -grad(u)/|grad(u)| per tet; step 3 right-hand side is the
  // weak divergence b_i = sum_t vol_t * grad(psi_i) . X_t.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nv);
  for (int tt = 0; tt < static_cast<int>(mesh.tet_count()); ++tt) {
    Eigen::Matrix<double, 4, 3> g = tet_shape_gradients(mesh, tt);
    const auto& q = mesh.tets[tt];
    Vec3 grad_u = Vec3::Zero();
    for (int i = 0; i < 4; ++i) grad_u += u[q[i]] * Vec3(g.row(i));
    double len = grad_u.norm();
    if (len < 1e-300) continue;
    Vec3 x = -grad_u / len;
    const double vol = ops.tet_volume[tt];
    for (int i = 0; i < 4; ++i) rhs[q[i]] += vol * Vec3(g.row(i)).dot(x);
  }

  // The Poisson system is rank deficient (constants); pin one source node.
  const int pin = source_nodes.front();
  std::vector<int> reduced_index(nv, -1);
  int n_red = 0;
  for (int i = 0; i < nv; ++i)
    if (i != pin) reduced_index[i] = n_red++;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(ops.laplacian.nonZeros());
  for (int k = 0; k < ops.laplacian.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(ops.laplacian, k); it; ++it) {
      int r = reduced_index[static_cast<int>(it.row())];
      int c = reduced_index[static_cast<int>(it.col())];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  Eigen::VectorXd rhs_red(n_red);
  for (int i = 0; i < nv; ++i)
    if (reduced_index[i] >= 0) rhs_red[reduced_index[i]] = rhs[i];

  Eigen::VectorXd phi_red = solve_spd(SparseMatrix(n_red, n_red, trip, true), rhs_red, opts);

  DistanceField out;
  out.phi.resize(nv);
  for (int i = 0; i < nv; ++i) out.phi[i] = reduced_index[i] >= 0 ? phi_red[reduced_index[i]] : 0.0;

  double source_min = out.phi[source_nodes.front()];
  for (int s : source_nodes) source_min = std::min(source_min, out.phi[s]);
  out.phi.array() -= source_min;
  out.phi = out.phi.cwiseMax(0.0);
  return out;
}

DistanceField axis_distance_field(const TetMesh& mesh, int axis) {
  if (axis < 0 || axis > 2) throw ValidationError("axis must be 0, 1 or 2");
  DistanceField out;
  out.phi.resize(mesh.vertex_count());
  double lo = mesh.vertices.empty() ? 0.0 : mesh.vertices[0][axis];
  for (const auto& v : mesh.vertices) lo = std::min(lo, v[axis]);
  for (std::size_t i = 0; i < mesh.vertex_count(); ++i)
    out.phi[static_cast<Eigen::Index>(i)] = mesh.vertices[i][axis] - lo;
  return out;
}

namespace {

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

// Marching tetrahedra for one iso value. Vertices are welded through the
// crossing edge, so triangles from adjacent tets share indices.
Slice extract_one(const TetMesh& mesh, const Eigen::VectorXd& phi,
                  const std::vector<Vec3>& tet_grad_phi, const StressTensorField& stress,
                  double iso_nominal, double iso_clamped, double snap) {
  Slice slice;
  std::map<EdgeKey, int> edge_vertex;

  auto corner_value = [&](int v) {
    double d = phi[v] - iso_clamped;
    return std::abs(d) < snap ? snap : d;
  };

  auto edge_point = [&](int a, int b) {
    EdgeKey key{std::min(a, b), std::max(a, b)};
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    double va = corner_value(key.a), vb = corner_value(key.b);
    double s = va / (va - vb);
    s = std::clamp(s, 0.0, 1.0);
    int idx = static_cast<int>(slice.surface.vertices.size());
    slice.surface.vertices.push_back((1.0 - s) * mesh.vertices[key.a] +
                                     s * mesh.vertices[key.b]);
    slice.sources.push_back({key.a, key.b, s});
    std::array<double, 6> tens;
    for (int c = 0; c < 6; ++c)
      tens[c] = (1.0 - s) * stress.tensors[key.a][c] + s * stress.tensors[key.b][c];
    slice.tensors.push_back(tens);
    edge_vertex.emplace(key, idx);
    return idx;
  };

  auto emit = [&](int i0, int i1, int i2, const Vec3& grad) {
    const Vec3& p0 = slice.surface.vertices[i0];
    const Vec3& p1 = slice.surface.vertices[i1];
    const Vec3& p2 = slice.surface.vertices[i2];
    Vec3 n = (p1 - p0).cross(p2 - p0);
    if (n.squaredNorm() < 1e-30) return;  // snap produced a sliver
    if (n.dot(grad) < 0)
      slice.surface.faces.push_back({i0, i2, i1});
    else
      slice.surface.faces.push_back({i0, i1, i2});
  };

  for (int t = 0; t < static_cast<int>(mesh.tet_count()); ++t) {
    const auto& q = mesh.tets[t];
    std::array<double, 4> val;
    int n_pos = 0;
    for (int i = 0; i < 4; ++i) {
      val[i] = corner_value(q[i]);
      if (val[i] > 0) ++n_pos;
    }
    if (n_pos == 0 || n_pos == 4) continue;
    const Vec3& g = tet_grad_phi[t];

    std::array<int, 4> pos, neg;
    int np = 0, nn = 0;
    for (int i = 0; i < 4; ++i)
      (val[i] > 0 ? pos[np++] : neg[nn++]) = q[i];

    if (np == 1 || nn == 1) {
      int lone = (np == 1) ? pos[0] : neg[0];
      const auto& other = (np == 1) ? neg : pos;
      int e0 = edge_point(lone, other[0]);
      int e1 = edge_point(lone, other[1]);
      int e2 = edge_point(lone, other[2]);
      emit(e0, e1, e2, g);
    } else {
      int q00 = edge_point(pos[0], neg[0]);
      int q01 = edge_point(pos[0], neg[1]);
      int q11 = edge_point(pos[1], neg[1]);
      int q10 = edge_point(pos[1], neg[0]);
      emit(q00, q01, q11, g);
      emit(q00, q11, q10, g);
    }
  }

  slice.iso_value = iso_nominal;
  if (slice.surface.faces.empty()) return slice;

  slice.stress.resize(slice.surface.vertices.size());
  StressTensorField local;
  local.tensors = slice.tensors;
  PrincipalStressField principal = principal_decomposition(local);
  slice.stress = principal.nodes;
  slice.normals = vertex_normals(slice.surface);
  return slice;
}

// Optional cleanup: collapse interior edges shorter than ratio * mean edge
// length. Boundary vertices are left in place so the outline is preserved.
void collapse_short_edges(Slice& slice, double ratio) {
  const double mean = slice.surface.mean_edge_length();
  if (mean <= 0) return;
  const double threshold = ratio * mean;

  std::vector<char> on_boundary(slice.surface.vertices.size(), 0);
  for (const auto& e : slice.surface.boundary_edges()) {
    on_boundary[e[0]] = 1;
    on_boundary[e[1]] = 1;
  }

  std::vector<int> remap(slice.surface.vertices.size());
  for (std::size_t i = 0; i < remap.size(); ++i) remap[i] = static_cast<int>(i);
  auto resolve = [&](int v) {
    while (remap[v] != v) v = remap[v] = remap[remap[v]];
    return v;
  };

  for (const auto& f : slice.surface.faces)
    for (int e = 0; e < 3; ++e) {
      int a = resolve(f[e]), b = resolve(f[(e + 1) % 3]);
      if (a == b || on_boundary[a] || on_boundary[b]) continue;
      if ((slice.surface.vertices[a] - slice.surface.vertices[b]).norm() >= threshold) continue;
      slice.surface.vertices[a] = 0.5 * (slice.surface.vertices[a] + slice.surface.vertices[b]);
      for (int c = 0; c < 6; ++c)
        slice.tensors[a][c] = 0.5 * (slice.tensors[a][c] + slice.tensors[b][c]);
      remap[b] = a;
    }

  std::vector<int> dense(slice.surface.vertices.size(), -1);
  TriMesh packed;
  std::vector<std::array<double, 6>> packed_tensors;
  std::vector<Slice::EdgeSource> packed_sources;
  for (std::size_t v = 0; v < slice.surface.vertices.size(); ++v) {
    if (resolve(static_cast<int>(v)) != static_cast<int>(v)) continue;
    dense[v] = static_cast<int>(packed.vertices.size());
    packed.vertices.push_back(slice.surface.vertices[v]);
    packed_tensors.push_back(slice.tensors[v]);
    packed_sources.push_back(slice.sources[v]);
  }
  for (const auto& f : slice.surface.faces) {
    std::array<int, 3> t = {dense[resolve(f[0])], dense[resolve(f[1])], dense[resolve(f[2])]};
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
    packed.faces.push_back(t);
  }
  slice.surface = std::move(packed);
  slice.tensors = std::move(packed_tensors);
  slice.sources = std::move(packed_sources);

  StressTensorField local;
  local.tensors = slice.tensors;
  slice.stress = principal_decomposition(local).nodes;
  slice.normals = slice.surface.faces.empty() ? std::vector<Vec3>{}
                                              : vertex_normals(slice.surface);
}

}  // namespace

std::vector<Slice> extract_slices(const TetMesh& mesh, const DistanceField& dist,
                                  const StressTensorField& stress, double layer_height,
                                  const SliceOptions& opts) {
  if (!(layer_height > 0)) throw ValidationError("layer_height must be positive");
  if (dist.phi.size() != static_cast<Eigen::Index>(mesh.vertex_count()))
    throw ValidationError("distance field size does not match mesh");
  if (stress.size() != mesh.vertex_count())
    throw ValidationError("stress field size does not match mesh");

  const double phi_min = dist.phi.minCoeff();
  const double phi_max = dist.phi.maxCoeff();
  const double range = phi_max - phi_min;
  if (range <= 0) throw ComputeError("distance field is constant; nothing to slice");

  int k_max = static_cast<int>(std::floor(phi_max / layer_height + 1e-9));
  if (layer_height > phi_max) {
    log_warn("layer_height " + std::to_string(layer_height) +
             " exceeds the maximum distance " + std::to_string(phi_max) +
             "; emitting the base slice only");
    k_max = 0;
  }

  // Per-tet gradient of phi, reused across iso values for orientation.
  std::vector<Vec3> tet_grad(mesh.tet_count());
  for (int t = 0; t < static_cast<int>(mesh.tet_count()); ++t) {
    Eigen::Matrix<double, 4, 3> g = tet_shape_gradients(mesh, t);
    Vec3 gp = Vec3::Zero();
    for (int i = 0; i < 4; ++i) gp += dist.phi[mesh.tets[t][i]] * Vec3(g.row(i));
    tet_grad[t] = gp;
  }

  const double clamp_margin = 1e-7 * range;
  const double snap = 1e-9 * range;

  std::vector<Slice> raw(static_cast<std::size_t>(k_max) + 1);
  detail::parallel_for(k_max + 1, opts.jobs, [&](long k) {
    const double iso_nominal = static_cast<double>(k) * layer_height;
    const double iso = std::clamp(iso_nominal, phi_min + clamp_margin, phi_max - clamp_margin);
    Slice s = extract_one(mesh, dist.phi, tet_grad, stress, iso_nominal, iso, snap);
    s.layer_index = static_cast<int>(k);
    if (!s.surface.faces.empty() && opts.min_edge_collapse_ratio > 0)
      collapse_short_edges(s, opts.min_edge_collapse_ratio);
    raw[k] = std::move(s);
  });

  std::vector<Slice> slices;
  for (auto& s : raw) {
    if (s.surface.faces.empty()) continue;
    if (s.surface.total_area() < layer_height * layer_height) continue;
    slices.push_back(std::move(s));
  }
  return slices;
}

SlicingAlignment slicing_alignment(const std::vector<Slice>& slices) {
  SlicingAlignment out;
  double sum = 0.0;
  for (const auto& slice : slices) {
    if (slice.critical.size() != slice.surface.vertex_count())
      throw ValidationError("slice has no critical mask; run the stress-flow stage first");
    double slice_sum = 0.0;
    long slice_count = 0;
    for (std::size_t v = 0; v < slice.surface.vertex_count(); ++v) {
      if (!slice.critical[v]) continue;
      double gamma = slice.stress[v].d1.cross(slice.normals[v]).norm();
      slice_sum += gamma;
      ++slice_count;
    }
    out.per_slice.push_back(slice_count ? slice_sum / slice_count : 0.0);
    sum += slice_sum;
    out.critical_count += slice_count;
  }
  if (out.critical_count == 0)
    throw ComputeError(
        "no critical vertices on any slice; lower theta_a or theta_s to widen the critical "
        "region");
  out.overall = sum / static_cast<double>(out.critical_count);
  return out;
}

}  // namespace stresspath
