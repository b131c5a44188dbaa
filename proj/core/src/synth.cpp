#include "stresspath/synth.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace stresspath {

namespace {

constexpr double kPi = std::numbers::pi;

// Grid of (nx+1)(ny+1)(nz+1) vertices split into 6 tets per cell. The same
// vertex ordering in every cell keeps shared faces conforming.
TetMesh tet_grid(int nx, int ny, int nz,
                 const std::function<Vec3(double, double, double)>& map,
                 const std::function<bool(int, int, int)>& keep_cell = nullptr) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto vid = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };

  TetMesh mesh;
  mesh.vertices.resize(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        mesh.vertices[vid(i, j, k)] =
            map(static_cast<double>(i) / nx, static_cast<double>(j) / ny,
                static_cast<double>(k) / nz);

  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (keep_cell && !keep_cell(i, j, k)) continue;
        for (const auto& p : perms) {
          std::array<int, 3> at = {i, j, k};
          std::array<int, 4> tet;
          tet[0] = vid(at[0], at[1], at[2]);
          for (int s = 0; s < 3; ++s) {
            at[p[s]] += 1;
            tet[s + 1] = vid(at[0], at[1], at[2]);
          }
          mesh.tets.push_back(tet);
        }
      }

  // Drop unreferenced vertices (carved grids), then orient and skin.
  std::vector<int> remap(mesh.vertices.size(), -1);
  std::vector<Vec3> used;
  for (auto& tet : mesh.tets)
    for (int& v : tet) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(mesh.vertices[v]);
      }
      v = remap[v];
    }
  mesh.vertices = std::move(used);

  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    double vol = mesh.tet_volume(static_cast<int>(t));
    if (vol < 0) {
      std::swap(mesh.tets[t][2], mesh.tets[t][3]);
      vol = -vol;
    }
    if (!(vol > 0))
      throw ComputeError("synthetic mesh produced a degenerate tet " + std::to_string(t));
  }
  mesh.boundary_faces = extract_boundary_faces(mesh.tets);
  return mesh;
}

}  // namespace

TetMesh make_box(int nx, int ny, int nz, double lx, double ly, double lz) {
  return tet_grid(nx, ny, nz,
                  [&](double u, double v, double w) { return Vec3(u * lx, v * ly, w * lz); });
}

TetMesh make_bar(double length, double width, double thickness, int nx, int ny, int nz) {
  return make_box(nx, ny, nz, length, width, thickness);
}

TetMesh make_curved_bracket(double leg, double width, double thickness, double bend_radius,
                            int n_len, int n_wid, int n_thk) {
  const double arc = bend_radius * kPi / 2.0;
  const double total = 2.0 * leg + arc;
  auto map = [&](double u, double v, double w) {
    const double s = u * total;          // arc length along the centerline
    const double off = (w - 0.5) * thickness;
    const double y = v * width;
    if (s <= leg) return Vec3(s, y, off);
    if (s <= leg + arc) {
      const double theta = (s - leg) / bend_radius;
      // Centerline bends up; `off` follows the rotating section normal.
      const Vec3 center(leg, y, bend_radius);
      return Vec3(leg + (bend_radius - off) * std::sin(theta), y,
                  bend_radius - (bend_radius - off) * std::cos(theta));
    }
    const double rest = s - leg - arc;
    return Vec3(leg + bend_radius - off, y, bend_radius + rest);
  };
  return tet_grid(n_len, n_wid, n_thk, map);
}

TetMesh make_quarter_shell(double radius, double thickness, double axial, int n_arc, int n_thk,
                           int n_axial) {
  auto map = [&](double u, double v, double w) {
    const double theta = u * kPi / 2.0;
    const double r = radius + w * thickness;
    return Vec3(r * std::cos(theta), v * axial, r * std::sin(theta));
  };
  return tet_grid(n_arc, n_axial, n_thk, map);
}

TetMesh make_ball(double radius, int n) {
  auto map = [&](double u, double v, double w) {
    Vec3 p(2.0 * u - 1.0, 2.0 * v - 1.0, 2.0 * w - 1.0);
    const double maxnorm = p.cwiseAbs().maxCoeff();
    const double len = p.norm();
    if (len < 1e-12) return Vec3(0, 0, 0);
    return Vec3(p * (radius * maxnorm / len));
  };
  return tet_grid(n, n, n, map);
}

TetMesh make_lshape(double lx, double ly, double lz, double split_x, double split_z, int nx,
                    int ny, int nz) {
  auto keep = [&](int i, int j, int k) {
    (void)j;
    const double cx = (i + 0.5) * lx / nx;
    const double cz = (k + 0.5) * lz / nz;
    return !(cx > split_x && cz > split_z);
  };
  return tet_grid(nx, ny, nz,
                  [&](double u, double v, double w) { return Vec3(u * lx, v * ly, w * lz); },
                  keep);
}

TriMesh make_square_grid(double size, int n) {
  TriMesh mesh;
  auto vid = [&](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      mesh.vertices.emplace_back(size * i / n, size * j / n, 0.0);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      mesh.faces.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.faces.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
    }
  return mesh;
}

TriMesh make_disk(double radius, int n_rings, int n_sectors) {
  TriMesh mesh;
  mesh.vertices.emplace_back(0, 0, 0);
  for (int r = 1; r <= n_rings; ++r)
    for (int s = 0; s < n_sectors; ++s) {
      const double rr = radius * r / n_rings;
      const double a = 2.0 * kPi * s / n_sectors;
      mesh.vertices.emplace_back(rr * std::cos(a), rr * std::sin(a), 0.0);
    }
  auto rid = [&](int r, int s) { return 1 + (r - 1) * n_sectors + (s % n_sectors); };
  for (int s = 0; s < n_sectors; ++s)
    mesh.faces.push_back({0, rid(1, s), rid(1, s + 1)});
  for (int r = 1; r < n_rings; ++r)
    for (int s = 0; s < n_sectors; ++s) {
      mesh.faces.push_back({rid(r, s), rid(r + 1, s), rid(r + 1, s + 1)});
      mesh.faces.push_back({rid(r, s), rid(r + 1, s + 1), rid(r, s + 1)});
    }
  return mesh;
}

TriMesh make_annulus(double r_inner, double r_outer, int n_rings, int n_sectors) {
  TriMesh mesh;
  for (int r = 0; r <= n_rings; ++r)
    for (int s = 0; s < n_sectors; ++s) {
      const double rr = r_inner + (r_outer - r_inner) * r / n_rings;
      const double a = 2.0 * kPi * s / n_sectors;
      mesh.vertices.emplace_back(rr * std::cos(a), rr * std::sin(a), 0.0);
    }
  auto rid = [&](int r, int s) { return r * n_sectors + (s % n_sectors); };
  for (int r = 0; r < n_rings; ++r)
    for (int s = 0; s < n_sectors; ++s) {
      mesh.faces.push_back({rid(r, s), rid(r + 1, s), rid(r + 1, s + 1)});
      mesh.faces.push_back({rid(r, s), rid(r + 1, s + 1), rid(r, s + 1)});
    }
  return mesh;
}

}  // namespace stresspath
