#include "stresspath/trajopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace stresspath {

ScalarFieldOnSlice fit_scalar_field(const Slice& slice, const TangentFlow& flow,
                                    double eps_rel, const SolveOptions& opts) {
  if (flow.stage != FlowStage::preprocessed)
    throw ValidationError("fit_scalar_field expects the preprocessed flow");
  if (flow.vectors.size() != slice.surface.vertex_count())
    throw ValidationError("flow size does not match the slice");
  for (char v : flow.valid)
    if (!v) throw ValidationError("preprocessed flow has invalid vertices");
  if (!(eps_rel > 0)) throw ValidationError("eps_rel must be positive");

  auto [grad, ops] = build_operators(slice.surface);
  (void)ops;
  const int nf = static_cast<int>(slice.surface.face_count());

  // Per-face target: mean of the corner vectors, projected to the face
  // plane and renormalized.
  Eigen::VectorXd target(3 * nf);
  for (int f = 0; f < nf; ++f) {
    const auto& tri = slice.surface.faces[f];
    Vec3 mean = (flow.vectors[tri[0]] + flow.vectors[tri[1]] + flow.vectors[tri[2]]) / 3.0;
    Vec3 fn = slice.surface.face_normal(f);
    Vec3 in_plane = mean - mean.dot(fn) * fn;
    double len = in_plane.norm();
    if (len > 1e-12) in_plane /= len;
    target.segment<3>(3 * f) = in_plane;
  }

  // eps is relative to the largest diagonal of G^T G, which keeps the
  // regularization strength mesh-size independent.
  double max_diag = 0.0;
  const auto& g = grad.matrix;
  for (int c = 0; c < g.outerSize(); ++c) {
    double acc = 0.0;
    for (Eigen::SparseMatrix<double>::InnerIterator it(g, c); it; ++it)
      acc += it.value() * it.value();
    max_diag = std::max(max_diag, acc);
  }
  const double eps = eps_rel * std::max(max_diag, 1e-300);

  SparseMatrix gmat(g);
  ScalarFieldOnSlice out;
  out.phi = solve_regularized_ls(gmat, target, eps, opts);
  out.residual = (g * out.phi - target).squaredNorm();

  // Calibrate: median |grad phi| over faces = 1, so the iso increment equals
  // geometric spacing. The regularizer shrinks phi slightly; this undoes it.
  Eigen::VectorXd grads = g * out.phi;
  std::vector<double> norms(nf);
  for (int f = 0; f < nf; ++f) norms[f] = grads.segment<3>(3 * f).norm();
  std::nth_element(norms.begin(), norms.begin() + nf / 2, norms.end());
  const double median = norms[nf / 2];
  if (median > 1e-12) out.phi /= median;
  return out;
}

namespace {

struct EdgeKey {
  int a, b;
  bool operator<(const EdgeKey& o) const { return a < o.a || (a == o.a && b < o.b); }
};

}  // namespace

std::vector<Polyline> extract_isolines(const Slice& slice, const ScalarFieldOnSlice& field,
                                       double spacing) {
  if (!(spacing > 0)) throw ValidationError("isoline spacing must be positive");
  if (field.phi.size() != static_cast<Eigen::Index>(slice.surface.vertex_count()))
    throw ValidationError("scalar field size does not match the slice");

  const double lo = field.phi.minCoeff();
  const double hi = field.phi.maxCoeff();
  const double range = hi - lo;
  if (range <= std::max(1e-12, 1e-9 * std::abs(hi)))
    throw ComputeError("degenerate scalar field: the fitted field is constant on this slice");

  const double snap = 1e-9 * range;
  std::vector<Polyline> lines;

  for (int k = 0;; ++k) {
    const double iso = lo + spacing / 2.0 + k * spacing;
    if (iso >= hi) break;

    auto corner = [&](int v) {
      double d = field.phi[v] - iso;
      return std::abs(d) < snap ? snap : d;
    };

    // Crossing points, welded per mesh edge.
    std::map<EdgeKey, int> edge_point;
    std::vector<Vec3> points, normals;
    std::vector<std::array<int, 2>> segments;
    auto point_on = [&](int a, int b) {
      EdgeKey key{std::min(a, b), std::max(a, b)};
      auto it = edge_point.find(key);
      if (it != edge_point.end()) return it->second;
      double va = corner(key.a), vb = corner(key.b);
      double s = std::clamp(va / (va - vb), 0.0, 1.0);
      int id = static_cast<int>(points.size());
      points.push_back((1 - s) * slice.surface.vertices[key.a] +
                       s * slice.surface.vertices[key.b]);
      Vec3 nrm = (1 - s) * slice.normals[key.a] + s * slice.normals[key.b];
      normals.push_back(nrm.norm() > 1e-12 ? Vec3(nrm.normalized()) : slice.normals[key.a]);
      edge_point.emplace(key, id);
      return id;
    };

    for (const auto& tri : slice.surface.faces) {
      int cross[3], nc = 0;
      for (int e = 0; e < 3; ++e) {
        int a = tri[e], b = tri[(e + 1) % 3];
        if ((corner(a) > 0) != (corner(b) > 0)) cross[nc++] = point_on(a, b);
      }
      if (nc == 2 && cross[0] != cross[1]) segments.push_back({cross[0], cross[1]});
    }
    if (segments.empty()) continue;

    // Chain segments into polylines; every point touches at most two
    // segments on a manifold slice.
    std::vector<std::vector<std::pair<int, int>>> adj(points.size());  // (neighbor, segment)
    for (std::size_t s = 0; s < segments.size(); ++s) {
      adj[segments[s][0]].emplace_back(segments[s][1], static_cast<int>(s));
      adj[segments[s][1]].emplace_back(segments[s][0], static_cast<int>(s));
    }
    std::vector<char> used(segments.size(), 0);

    auto walk = [&](int start, bool closed) {
      Polyline line;
      line.kind = MoveKind::infill;
      line.iso_index = k;
      int cur = start;
      line.points.push_back(points[cur]);
      line.normals.push_back(normals[cur]);
      for (;;) {
        int next = -1;
        for (const auto& [nb, seg] : adj[cur])
          if (!used[seg]) {
            used[seg] = 1;
            next = nb;
            break;
          }
        if (next < 0) break;
        if (closed && next == start) {
          line.closed = true;
          break;
        }
        line.points.push_back(points[next]);
        line.normals.push_back(normals[next]);
        cur = next;
      }
      return line;
    };

    for (std::size_t p = 0; p < points.size(); ++p) {
      if (adj[p].size() != 1) continue;
      bool has_unused = false;
      for (const auto& [nb, seg] : adj[p]) has_unused |= !used[seg];
      if (!has_unused) continue;
      Polyline line = walk(static_cast<int>(p), false);
      if (line.points.size() >= 2) lines.push_back(std::move(line));
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
      if (used[s]) continue;
      Polyline line = walk(segments[s][0], true);
      if (line.points.size() >= 3) lines.push_back(std::move(line));
    }
  }
  return lines;
}

namespace {

std::vector<std::vector<int>> boundary_loops(const TriMesh& mesh) {
  auto edges = mesh.boundary_edges();
  std::map<int, std::vector<std::size_t>> outgoing;
  for (std::size_t e = 0; e < edges.size(); ++e) outgoing[edges[e][0]].push_back(e);

  std::vector<char> used(edges.size(), 0);
  std::vector<std::vector<int>> loops;
  for (std::size_t seed = 0; seed < edges.size(); ++seed) {
    if (used[seed]) continue;
    std::vector<int> loop;
    std::size_t cur = seed;
    while (!used[cur]) {
      used[cur] = 1;
      loop.push_back(edges[cur][0]);
      int next_vertex = edges[cur][1];
      auto it = outgoing.find(next_vertex);
      if (it == outgoing.end()) break;
      std::size_t next_edge = edges.size();
      for (std::size_t cand : it->second)
        if (!used[cand]) {
          next_edge = cand;
          break;
        }
      if (next_edge == edges.size()) break;
      cur = next_edge;
    }
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

Polyline loop_to_polyline(const std::vector<int>& loop, const Slice& slice) {
  Polyline line;
  line.closed = true;
  line.kind = MoveKind::contour;
  for (int v : loop) {
    line.points.push_back(slice.surface.vertices[v]);
    line.normals.push_back(slice.normals[v]);
  }
  return line;
}

double min_distance_to_loops(const Vec3& p, const std::vector<Polyline>& loops) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& loop : loops) best = std::min(best, distance_to_polyline(p, loop));
  return best;
}

// Inset a boundary loop along the in-surface inward direction n x t. Points
// that land closer to the boundary than 80% of the inset cut a corner and
// are culled.
Polyline offset_loop(const std::vector<int>& loop, const Slice& slice, double inset,
                     const std::vector<Polyline>& boundary) {
  Polyline ring;
  ring.closed = true;
  ring.kind = MoveKind::contour;
  const int n = static_cast<int>(loop.size());
  for (int i = 0; i < n; ++i) {
    const Vec3& prev = slice.surface.vertices[loop[(i - 1 + n) % n]];
    const Vec3& next = slice.surface.vertices[loop[(i + 1) % n]];
    const Vec3& here = slice.surface.vertices[loop[i]];
    Vec3 tangent = next - prev;
    if (tangent.norm() < 1e-12) continue;
    tangent.normalize();
    const Vec3& normal = slice.normals[loop[i]];
    Vec3 inward = normal.cross(tangent);
    if (inward.norm() < 1e-12) continue;
    Vec3 candidate = here + inset * inward.normalized();
    if (min_distance_to_loops(candidate, boundary) < 0.8 * inset) continue;
    if (!ring.points.empty() && (candidate - ring.points.back()).norm() < 1e-6) continue;
    ring.points.push_back(candidate);
    ring.normals.push_back(normal);
  }
  if (ring.points.size() >= 2 &&
      (ring.points.front() - ring.points.back()).norm() < 1e-6) {
    ring.points.pop_back();
    ring.normals.pop_back();
  }
  return ring;
}

// Cut away infill points within `margin` of the boundary, splitting the
// polyline into surviving runs. Closed lines merge the run across the seam.
std::vector<Polyline> trim_polyline(const Polyline& line, const std::vector<Polyline>& boundary,
                                    double margin) {
  const std::size_t n = line.points.size();
  std::vector<char> keep(n);
  bool all = true, none = true;
  for (std::size_t i = 0; i < n; ++i) {
    keep[i] = min_distance_to_loops(line.points[i], boundary) >= margin ? 1 : 0;
    all = all && keep[i];
    none = none && !keep[i];
  }
  if (all) return {line};
  if (none) return {};

  std::vector<Polyline> runs;
  Polyline cur;
  cur.kind = line.kind;
  cur.iso_index = line.iso_index;
  auto flush = [&]() {
    if (cur.points.size() >= 2) runs.push_back(cur);
    cur.points.clear();
    cur.normals.clear();
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) {
      cur.points.push_back(line.points[i]);
      cur.normals.push_back(line.normals[i]);
    } else {
      flush();
    }
  }
  flush();

  // A closed line whose first and last points both survive wraps around.
  if (line.closed && runs.size() >= 2 && keep[0] && keep[n - 1]) {
    Polyline& first = runs.front();
    Polyline& last = runs.back();
    last.points.insert(last.points.end(), first.points.begin(), first.points.end());
    last.normals.insert(last.normals.end(), first.normals.begin(), first.normals.end());
    runs.front() = std::move(runs.back());
    runs.pop_back();
  }
  return runs;
}

struct ChainStep {
  int line = -1;
  bool reversed = false;
  int rotation = 0;  // closed lines start at this point index
};

Vec3 start_point(const Polyline& p, const ChainStep& s) {
  if (p.closed) return p.points[s.rotation];
  return s.reversed ? p.points.back() : p.points.front();
}

Vec3 end_point(const Polyline& p, const ChainStep& s) {
  if (p.closed) return p.points[s.rotation];  // a loop ends where it starts
  return s.reversed ? p.points.front() : p.points.back();
}

double plan_travel(const std::vector<Polyline>& lines, const std::vector<ChainStep>& plan,
                   const Vec3& origin, bool have_origin) {
  double total = 0.0;
  Vec3 cur = origin;
  bool have = have_origin;
  for (const auto& step : plan) {
    if (have) total += (start_point(lines[step.line], step) - cur).norm();
    cur = end_point(lines[step.line], step);
    have = true;
  }
  return total;
}

Polyline apply_step(const Polyline& line, const ChainStep& step) {
  Polyline out = line;
  if (line.closed && step.rotation > 0) {
    std::rotate(out.points.begin(), out.points.begin() + step.rotation, out.points.end());
    std::rotate(out.normals.begin(), out.normals.begin() + step.rotation, out.normals.end());
  }
  if (!line.closed && step.reversed) {
    std::reverse(out.points.begin(), out.points.end());
    std::reverse(out.normals.begin(), out.normals.end());
  }
  return out;
}

}  // namespace

LayerToolpath build_layer_path(const std::vector<Polyline>& infill, const Slice& slice,
                               const LayerPathOptions& opts) {
  if (opts.contour_count < 0) throw ValidationError("contour_count must be >= 0");
  if (!(opts.spacing > 0)) throw ValidationError("spacing must be positive");

  LayerToolpath layer;
  layer.layer_index = slice.layer_index;
  layer.iso_value = slice.iso_value;

  auto loops = boundary_loops(slice.surface);
  std::vector<Polyline> boundary;
  for (const auto& loop : loops) boundary.push_back(loop_to_polyline(loop, slice));

  // Contours outside-in: inset (k + 0.5) * spacing for k < contour_count.
  std::vector<Polyline> contours;
  for (int k = 0; k < opts.contour_count; ++k) {
    const double inset = (k + 0.5) * opts.spacing;
    for (std::size_t l = 0; l < loops.size(); ++l) {
      Polyline ring = offset_loop(loops[l], slice, inset, boundary);
      if (ring.points.size() < 3) {
        log_warn("contour ring " + std::to_string(k) + " of loop " + std::to_string(l) +
                 " on layer " + std::to_string(slice.layer_index) +
                 " collapsed during offsetting; skipped");
        continue;
      }
      contours.push_back(std::move(ring));
    }
  }

  // Trim infill clear of the contour band.
  const double margin = opts.contour_count * opts.spacing;
  std::vector<Polyline> lines;
  for (const auto& line : infill) {
    if (line.points.size() < 2) continue;
    if (margin > 0) {
      for (auto& piece : trim_polyline(line, boundary, margin))
        lines.push_back(std::move(piece));
    } else {
      lines.push_back(line);
    }
  }

  // Greedy nearest-endpoint chaining, with the input order as a fallback
  // bound so chaining never loses to doing nothing.
  Vec3 cursor = Vec3::Zero();
  bool have_cursor = false;
  if (!contours.empty()) {
    cursor = contours.back().points.front();
    have_cursor = true;
  }

  std::vector<ChainStep> greedy;
  {
    std::vector<char> used(lines.size(), 0);
    Vec3 cur = cursor;
    bool have = have_cursor;
    for (std::size_t step = 0; step < lines.size(); ++step) {
      int best = -1;
      ChainStep choice;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (used[i]) continue;
        const auto& line = lines[i];
        if (!have) {
          best = static_cast<int>(i);
          choice = {best, false, 0};
          break;
        }
        if (line.closed) {
          for (std::size_t r = 0; r < line.points.size(); ++r) {
            double d = (line.points[r] - cur).norm();
            if (d < best_d) {
              best_d = d;
              best = static_cast<int>(i);
              choice = {best, false, static_cast<int>(r)};
            }
          }
        } else {
          double df = (line.points.front() - cur).norm();
          double db = (line.points.back() - cur).norm();
          if (df < best_d) {
            best_d = df;
            best = static_cast<int>(i);
            choice = {best, false, 0};
          }
          if (db < best_d) {
            best_d = db;
            best = static_cast<int>(i);
            choice = {best, true, 0};
          }
        }
      }
      if (best < 0) break;
      used[best] = 1;
      greedy.push_back(choice);
      cur = end_point(lines[best], choice);
      have = true;
    }
  }
  std::vector<ChainStep> identity(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) identity[i] = {static_cast<int>(i), false, 0};

  const double greedy_travel = plan_travel(lines, greedy, cursor, have_cursor);
  const double identity_travel = plan_travel(lines, identity, cursor, have_cursor);
  const std::vector<ChainStep>& plan = greedy_travel <= identity_travel ? greedy : identity;

  // Emit: contours, then planned infill, with travel moves in between.
  auto add_travel = [&](const Vec3& from, const Vec3& from_n, const Vec3& to, const Vec3& to_n) {
    Polyline travel;
    travel.kind = MoveKind::travel;
    if (opts.travel_lift > 0) {
      travel.points = {from, from + opts.travel_lift * from_n, to + opts.travel_lift * to_n, to};
      travel.normals = {from_n, from_n, to_n, to_n};
    } else {
      travel.points = {from, to};
      travel.normals = {from_n, to_n};
    }
    layer.paths.push_back(std::move(travel));
  };

  Vec3 pen;
  Vec3 pen_normal = Vec3::UnitZ();
  bool pen_down = false;
  auto emit_print = [&](Polyline&& line) {
    const Vec3 start = line.points.front();
    const Vec3 start_n = line.normals.front();
    if (pen_down) add_travel(pen, pen_normal, start, start_n);
    pen = line.closed ? line.points.front() : line.points.back();
    pen_normal = line.closed ? line.normals.front() : line.normals.back();
    layer.print_length += line.length();
    layer.paths.push_back(std::move(line));
    pen_down = true;
  };

  for (auto& ring : contours) emit_print(std::move(ring));
  for (const auto& step : plan) emit_print(apply_step(lines[step.line], step));
  return layer;
}

}  // namespace stresspath
