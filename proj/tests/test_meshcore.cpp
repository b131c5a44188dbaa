#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stresspath/mesh.hpp"
#include "stresspath/operators.hpp"
#include "stresspath/synth.hpp"
#include "test_support.hpp"

using namespace stresspath;
using testsupport::TempDir;
using testsupport::write_file;

TEST_CASE("load_tet_mesh reads a single regular tetrahedron") {
  TempDir dir("tet");
  write_file(dir / "one.node",
             "4 3 0 0\n"
             "0 0 0 0\n"
             "1 1 0 0\n"
             "2 0 1 0\n"
             "3 0 0 1\n");
  write_file(dir / "one.ele", "1 4 0\n0 0 1 2 3\n");
  TetMesh mesh = load_tet_mesh(dir / "one.node", dir / "one.ele");
  CHECK(mesh.vertex_count() == 4);
  CHECK(mesh.tet_count() == 1);
  CHECK(mesh.boundary_faces.size() == 4);
  CHECK(mesh.tet_volume(0) > 0);
}

TEST_CASE("load_tet_mesh handles 1-based files and fixes inverted tets") {
  TempDir dir("tet1");
  write_file(dir / "m.node",
             "4 3 0 0\n"
             "1 0 0 0\n"
             "2 1 0 0\n"
             "3 0 1 0\n"
             "4 0 0 1\n");
  // Vertex order (1,3,2,4) has negative volume; the loader must reorder it.
  write_file(dir / "m.ele", "1 4 0\n1 1 3 2 4\n");
  TetMesh mesh = load_tet_mesh(dir / "m.node", dir / "m.ele");
  CHECK(mesh.tet_count() == 1);
  CHECK(mesh.tet_volume(0) > 0);
}

TEST_CASE("unit cube splits into 6 tets with 12 boundary faces") {
  TetMesh cube = make_box(1, 1, 1, 1.0, 1.0, 1.0);
  CHECK(cube.vertex_count() == 8);
  CHECK(cube.tet_count() == 6);
  CHECK(cube.boundary_faces.size() == 12);
  CHECK(cube.total_volume() == doctest::Approx(1.0).epsilon(1e-12));

  // Round trip through the .node/.ele writer.
  TempDir dir("cube");
  save_tet_mesh(cube, dir / "c.node", dir / "c.ele");
  TetMesh back = load_tet_mesh(dir / "c.node", dir / "c.ele");
  CHECK(back.vertex_count() == cube.vertex_count());
  CHECK(back.tet_count() == cube.tet_count());
}

TEST_CASE("load_tet_mesh rejects out-of-range and degenerate input") {
  TempDir dir("bad");
  write_file(dir / "m.node",
             "8 3 0 0\n0 0 0 0\n1 1 0 0\n2 0 1 0\n3 0 0 1\n4 1 1 0\n5 1 0 1\n6 0 1 1\n7 1 1 1\n");
  write_file(dir / "m.ele", "1 4 0\n0 0 1 2 99\n");
  CHECK_THROWS_AS(load_tet_mesh(dir / "m.node", dir / "m.ele"), ValidationError);

  write_file(dir / "flat.ele", "1 4 0\n0 0 1 2 4\n");  // all four in z = 0 plane
  CHECK_THROWS_AS(load_tet_mesh(dir / "m.node", dir / "flat.ele"), ValidationError);

  write_file(dir / "empty.node", "");
  CHECK_THROWS_AS(load_tet_mesh(dir / "empty.node", dir / "m.ele"), ValidationError);
}

TEST_CASE("load_tri_mesh reads OBJ and rejects missing vertices") {
  TempDir dir("obj");
  write_file(dir / "tri.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n");
  TriMesh tri = load_tri_mesh(dir / "tri.obj");
  CHECK(tri.vertex_count() == 3);
  CHECK(tri.face_count() == 1);

  write_file(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nf 1 2 5\n");
  CHECK_THROWS_AS(load_tri_mesh(dir / "bad.obj"), ValidationError);
}

TEST_CASE("binary STL cube welds to 8 vertices") {
  TetMesh cube = make_box(1, 1, 1, 1.0, 1.0, 1.0);
  TriMesh skin = boundary_trimesh(cube);

  TempDir dir("stl");
  std::ofstream out(dir / "cube.stl", std::ios::binary);
  char header[80] = {0};
  out.write(header, 80);
  std::uint32_t n = static_cast<std::uint32_t>(skin.face_count());
  out.write(reinterpret_cast<char*>(&n), 4);
  for (std::size_t f = 0; f < skin.face_count(); ++f) {
    float rec[12] = {0};
    Vec3 fn = skin.face_normal(static_cast<int>(f));
    for (int c = 0; c < 3; ++c) rec[c] = static_cast<float>(fn[c]);
    for (int v = 0; v < 3; ++v)
      for (int c = 0; c < 3; ++c)
        rec[3 + 3 * v + c] = static_cast<float>(skin.vertices[skin.faces[f][v]][c]);
    out.write(reinterpret_cast<char*>(rec), 48);
    std::uint16_t attr = 0;
    out.write(reinterpret_cast<char*>(&attr), 2);
  }
  out.close();

  TriMesh welded = load_tri_mesh(dir / "cube.stl");
  CHECK(welded.vertex_count() == 8);
  CHECK(welded.face_count() == 12);
}

TEST_CASE("non-manifold edge is rejected") {
  TempDir dir("nm");
  write_file(dir / "nm.obj",
             "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 0 -1 0\n"
             "f 1 2 3\nf 1 2 4\nf 1 2 5\n");
  CHECK_THROWS_AS(load_tri_mesh(dir / "nm.obj"), ValidationError);
}

TEST_CASE("OBJ save/load round trip is byte-idempotent") {
  TriMesh grid = make_square_grid(2.0, 3);
  TempDir dir("rt");
  save_obj(grid, dir / "a.obj");
  TriMesh once = load_tri_mesh(dir / "a.obj");
  save_obj(once, dir / "b.obj");
  TriMesh twice = load_tri_mesh(dir / "b.obj");
  save_obj(twice, dir / "c.obj");
  CHECK(testsupport::read_file(dir / "b.obj") == testsupport::read_file(dir / "c.obj"));
}

TEST_CASE("face gradient is exact on linear fields over planar meshes") {
  TriMesh grid = make_square_grid(1.0, 5);
  auto [grad, ops] = build_operators(grid);

  Eigen::VectorXd fx(grid.vertex_count());
  for (std::size_t v = 0; v < grid.vertex_count(); ++v) fx[v] = grid.vertices[v].x();
  for (int f = 0; f < static_cast<int>(grid.face_count()); ++f) {
    Vec3 g = grad.face_gradient(f, fx);
    CHECK((g - Vec3(1, 0, 0)).norm() < 1e-10);
  }

  Eigen::VectorXd constant = Eigen::VectorXd::Constant(grid.vertex_count(), 3.25);
  Eigen::VectorXd zeros = grad.apply(constant);
  CHECK(zeros.cwiseAbs().maxCoeff() < 1e-10);

  // Laplacian invariants: zero row sums, symmetry, PSD on random vectors.
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.vertex_count());
  CHECK((ops.laplacian * ones).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::SparseMatrix<double> diff =
      ops.laplacian - Eigen::SparseMatrix<double>(ops.laplacian.transpose());
  CHECK(Eigen::VectorXd(diff * ones).cwiseAbs().maxCoeff() < 1e-12);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(grid.vertex_count());
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = unit(testsupport::rng());
    CHECK(x.dot(ops.laplacian * x) >= -1e-10);
  }
  CHECK(ops.mass.minCoeff() > 0);
}

TEST_CASE("face gradient reproduces a random linear field on a tilted jittered patch") {
  // Plane spanned so that the analytic gradient (2,-3,1) is tangent to it.
  const Vec3 full_grad(2, -3, 1);
  const Vec3 plane_n = Vec3(3, 2, 0).normalized();
  REQUIRE(std::abs(plane_n.dot(full_grad)) < 1e-14);
  const Vec3 u = full_grad.normalized();
  const Vec3 v = plane_n.cross(u);

  TriMesh flat = make_square_grid(1.0, 6);
  std::uniform_real_distribution<double> jitter(-0.04, 0.04);
  TriMesh patch = flat;
  for (std::size_t i = 0; i < patch.vertices.size(); ++i) {
    Vec3 p = flat.vertices[i];
    bool interior = p.x() > 1e-9 && p.x() < 1 - 1e-9 && p.y() > 1e-9 && p.y() < 1 - 1e-9;
    double a = p.x() + (interior ? jitter(testsupport::rng()) : 0.0);
    double b = p.y() + (interior ? jitter(testsupport::rng()) : 0.0);
    patch.vertices[i] = a * u + b * v;
  }

  auto [grad, ops] = build_operators(patch);
  (void)ops;
  Eigen::VectorXd f(patch.vertex_count());
  for (std::size_t i = 0; i < patch.vertex_count(); ++i)
    f[i] = full_grad.dot(patch.vertices[i]);
  for (int face = 0; face < static_cast<int>(patch.face_count()); ++face)
    CHECK((grad.face_gradient(face, f) - full_grad).norm() < 1e-10 * full_grad.norm());
}

TEST_CASE("build_operators rejects degenerate faces") {
  TriMesh bad;
  bad.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  bad.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(build_operators(bad), ValidationError);
}

TEST_CASE("vertex normals: plane, sphere, cylinder") {
  TriMesh grid = make_square_grid(1.0, 4);
  for (const auto& n : vertex_normals(grid)) CHECK((n - Vec3(0, 0, 1)).norm() < 1e-12);

  const double max_angle = 2.0 * std::numbers::pi / 180.0;

  TriMesh sphere = boundary_trimesh(make_ball(1.0, 8));
  auto sphere_normals = vertex_normals(sphere);
  for (std::size_t v = 0; v < sphere.vertex_count(); ++v) {
    Vec3 analytic = sphere.vertices[v].normalized();
    double angle = std::acos(std::clamp(sphere_normals[v].dot(analytic), -1.0, 1.0));
    CHECK(angle < max_angle);
  }

  // Open cylinder side wall, radial normals.
  TriMesh tube;
  const int n_theta = 48, n_z = 8;
  for (int k = 0; k <= n_z; ++k)
    for (int s = 0; s < n_theta; ++s) {
      double a = 2.0 * std::numbers::pi * s / n_theta;
      tube.vertices.emplace_back(std::cos(a), std::sin(a), 0.25 * k);
    }
  auto vid = [&](int k, int s) { return k * n_theta + (s % n_theta); };
  for (int k = 0; k < n_z; ++k)
    for (int s = 0; s < n_theta; ++s) {
      tube.faces.push_back({vid(k, s), vid(k, s + 1), vid(k + 1, s + 1)});
      tube.faces.push_back({vid(k, s), vid(k + 1, s + 1), vid(k + 1, s)});
    }
  auto tube_normals = vertex_normals(tube);
  for (std::size_t v = 0; v < tube.vertex_count(); ++v) {
    Vec3 radial = Vec3(tube.vertices[v].x(), tube.vertices[v].y(), 0).normalized();
    double angle = std::acos(std::clamp(std::abs(tube_normals[v].dot(radial)), -1.0, 1.0));
    CHECK(angle < max_angle);
  }
}

TEST_CASE("vertex normals reject isolated vertices") {
  TriMesh mesh;
  mesh.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(5, 5, 5)};
  mesh.faces = {{0, 1, 2}};
  CHECK_THROWS_AS(vertex_normals(mesh), ValidationError);
}
