#include <doctest.h>

#include <Eigen/Dense>

#include "stresspath/fea.hpp"
#include "stresspath/pipeline.hpp"
#include "stresspath/synth.hpp"
#include "test_support.hpp"

using namespace stresspath;

namespace {

// Cantilever bar with the x=0 face fully fixed and a total +x load spread
// over the x=length face.
BoundaryConditions bar_bc(const TetMesh& mesh, double length, double total_force) {
  BoundaryConditions bc;
  std::vector<int> tip;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    if (std::abs(mesh.vertices[v].x()) < 1e-9)
      bc.fixed.push_back({static_cast<int>(v), {true, true, true}, Vec3::Zero()});
    if (std::abs(mesh.vertices[v].x() - length) < 1e-9) tip.push_back(static_cast<int>(v));
  }
  for (int v : tip)
    bc.loads.push_back({v, Vec3(total_force / tip.size(), 0, 0)});
  return bc;
}

Eigen::Matrix3d reconstruct(const PrincipalStressField::Entry& e) {
  return e.s1 * e.d1 * e.d1.transpose() + e.s2 * e.d2 * e.d2.transpose() +
         e.s3 * e.d3 * e.d3.transpose();
}

}  // namespace

TEST_CASE("uniaxial patch test: sigma_xx = F/A at interior nodes") {
  const double length = 10.0, width = 1.0, thickness = 1.0, force = 100.0;
  TetMesh mesh = make_bar(length, width, thickness, 10, 3, 3);
  Material mat;  // E arbitrary, nu = 0.3
  BoundaryConditions bc = bar_bc(mesh, length, force);
  ElasticitySolution sol = solve_elasticity(mesh, mat, bc);

  const double expected = force / (width * thickness);  // 100 MPa in N/mm^2
  long interior = 0;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3& p = mesh.vertices[v];
    if (p.x() < 1e-9 || p.x() > length - 1e-9) continue;  // clamped/loaded faces
    ++interior;
    CHECK(sol.stress.tensors[v][0] == doctest::Approx(expected).epsilon(1e-6));
    CHECK(std::abs(sol.stress.tensors[v][1]) < 1e-6 * expected);
    CHECK(std::abs(sol.stress.tensors[v][3]) < 1e-6 * expected);
  }
  CHECK(interior > 0);

  PrincipalStressField principal = principal_decomposition(sol.stress);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    const Vec3& p = mesh.vertices[v];
    if (p.x() < 1e-9 || p.x() > length - 1e-9) continue;
    CHECK(std::abs(principal.nodes[v].d1.dot(Vec3::UnitX())) >= 0.999);
  }
}

TEST_CASE("zero load gives zero displacement and stress") {
  TetMesh mesh = make_bar(4.0, 1.0, 1.0, 4, 2, 2);
  BoundaryConditions bc = bar_bc(mesh, 4.0, 0.0);
  ElasticitySolution sol = solve_elasticity(mesh, Material{}, bc);
  for (const auto& u : sol.displacements) CHECK(u.norm() < 1e-12);
  for (const auto& t : sol.stress.tensors)
    for (double c : t) CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("doubling E halves displacements and leaves stress bit-identical") {
  TetMesh mesh = make_bar(6.0, 1.0, 1.0, 6, 2, 2);
  BoundaryConditions bc = bar_bc(mesh, 6.0, 50.0);
  Material soft{1.0e9, 0.3}, stiff{2.0e9, 0.3};
  ElasticitySolution a = solve_elasticity(mesh, soft, bc);
  ElasticitySolution b = solve_elasticity(mesh, stiff, bc);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    CHECK((a.displacements[v] - 2.0 * b.displacements[v]).norm() <=
          1e-9 * a.displacements[v].norm() + 1e-15);
    for (int c = 0; c < 6; ++c)
      CHECK(a.stress.tensors[v][c] == b.stress.tensors[v][c]);  // exactly equal
  }
}

TEST_CASE("global equilibrium: reactions balance applied loads") {
  const double force = 37.5;
  TetMesh mesh = make_bar(8.0, 1.0, 1.0, 8, 2, 2);
  BoundaryConditions bc = bar_bc(mesh, 8.0, force);
  Material mat;
  ElasticitySolution sol = solve_elasticity(mesh, mat, bc);

  // Assemble K u and read the reaction at constrained dofs.
  // The fea module does not expose K, so rebuild the nodal force balance via
  // the stress divergence instead: total reaction = -total load.
  Vec3 applied = Vec3::Zero();
  for (const auto& l : bc.loads) applied += l.force;

  // Compute reactions from element contributions at fixed nodes.
  Vec3 reaction = Vec3::Zero();
  std::vector<char> fixed(mesh.vertex_count(), 0);
  for (const auto& f : bc.fixed) fixed[f.node] = 1;

  // Internal force at node i: sum_e V_e B_e^T sigma_e restricted to i.
  // Equivalent: for each tet, f_i = V * sigma * grad(psi_i).
  for (int t = 0; t < static_cast<int>(mesh.tet_count()); ++t) {
    const double vol = mesh.tet_volume(t);
    Eigen::Matrix<double, 4, 3> g = tet_shape_gradients(mesh, t);
    // Element stress from nodal average is close enough for equilibrium of
    // the patch-test field (constant stress).
    Eigen::Matrix3d sigma = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 4; ++i) sigma += sol.stress.tensor(mesh.tets[t][i]);
    sigma /= 4.0;
    for (int i = 0; i < 4; ++i) {
      if (!fixed[mesh.tets[t][i]]) continue;
      reaction += vol * (sigma * Vec3(g.row(i)));
    }
  }
  CHECK((reaction + applied).norm() <= 1e-6 * applied.norm());
}

TEST_CASE("constant-strain patch test with Dirichlet data is exact") {
  TetMesh mesh = make_box(3, 3, 3, 1.0, 1.0, 1.0);
  // Impose u = A x on every boundary node; interior must reproduce it.
  Eigen::Matrix3d a;
  a << 1e-3, 2e-4, -1e-4,
       5e-5, -8e-4, 3e-4,
       2e-4, 1e-4, 6e-4;
  Material mat{1.0, 0.3};  // E = 1 so prescribed displacements pass through
  BoundaryConditions bc;
  std::vector<char> on_boundary(mesh.vertex_count(), 0);
  for (int v : mesh.boundary_vertices()) on_boundary[v] = 1;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    if (on_boundary[v])
      bc.fixed.push_back({static_cast<int>(v), {true, true, true}, a * mesh.vertices[v]});
  ElasticitySolution sol = solve_elasticity(mesh, mat, bc);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    CHECK((sol.displacements[v] - a * mesh.vertices[v]).norm() < 1e-9);
}

TEST_CASE("stress field is invariant under rigid translation") {
  TetMesh mesh = make_bar(5.0, 1.0, 1.0, 5, 2, 2);
  BoundaryConditions bc = bar_bc(mesh, 5.0, 20.0);
  ElasticitySolution base = solve_elasticity(mesh, Material{}, bc);

  TetMesh moved = mesh;
  for (auto& v : moved.vertices) v += Vec3(3.5, -2.0, 7.25);
  ElasticitySolution shifted = solve_elasticity(moved, Material{}, bc);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    for (int c = 0; c < 6; ++c)
      CHECK(base.stress.tensors[v][c] ==
            doctest::Approx(shifted.stress.tensors[v][c]).epsilon(1e-9).scale(1.0));
}

TEST_CASE("boundary condition validation") {
  TetMesh mesh = make_bar(4.0, 1.0, 1.0, 4, 1, 1);
  Material mat;

  BoundaryConditions none;
  CHECK_THROWS_AS(solve_elasticity(mesh, mat, none), ValidationError);

  BoundaryConditions collinear;
  int count = 0;
  for (std::size_t v = 0; v < mesh.vertex_count() && count < 3; ++v)
    if (std::abs(mesh.vertices[v].y()) < 1e-9 && std::abs(mesh.vertices[v].z()) < 1e-9) {
      collinear.fixed.push_back({static_cast<int>(v), {true, true, true}, Vec3::Zero()});
      ++count;
    }
  CHECK_THROWS_AS(solve_elasticity(mesh, mat, collinear), ValidationError);

  BoundaryConditions bad_node = bar_bc(mesh, 4.0, 1.0);
  bad_node.loads.push_back({99999, Vec3(1, 0, 0)});
  CHECK_THROWS_AS(solve_elasticity(mesh, mat, bad_node), ValidationError);

  Material bad_nu{1e9, 0.7};
  CHECK_THROWS_AS(solve_elasticity(mesh, bad_nu, bar_bc(mesh, 4.0, 1.0)), ValidationError);
}

TEST_CASE("principal decomposition: diagonal, hydrostatic, random reconstruction") {
  StressTensorField diag;
  diag.tensors = {{5, -2, 1, 0, 0, 0}};
  PrincipalStressField p = principal_decomposition(diag);
  CHECK(p.nodes[0].s1 == doctest::Approx(5.0));
  CHECK(p.nodes[0].s2 == doctest::Approx(-2.0));
  CHECK(p.nodes[0].s3 == doctest::Approx(1.0));
  CHECK(std::abs(p.nodes[0].d1.dot(Vec3::UnitX())) == doctest::Approx(1.0));
  CHECK(std::abs(p.nodes[0].d2.dot(Vec3::UnitY())) == doctest::Approx(1.0));
  CHECK(std::abs(p.nodes[0].d3.dot(Vec3::UnitZ())) == doctest::Approx(1.0));

  StressTensorField hydro;
  hydro.tensors = {{3.7, 3.7, 3.7, 0, 0, 0}};
  PrincipalStressField h = principal_decomposition(hydro);
  CHECK(std::abs(h.nodes[0].s1) == doctest::Approx(std::abs(h.nodes[0].s3)));

  std::uniform_real_distribution<double> unit(-10.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::array<double, 6> t;
    for (double& c : t) c = unit(testsupport::rng());
    StressTensorField field;
    field.tensors = {t};
    PrincipalStressField out = principal_decomposition(field);
    const auto& e = out.nodes[0];
    CHECK(std::abs(e.s1) >= std::abs(e.s2));
    CHECK(std::abs(e.s2) >= std::abs(e.s3));
    CHECK(std::abs(e.d1.dot(e.d2)) < 1e-8);
    CHECK(std::abs(e.d1.dot(e.d3)) < 1e-8);
    CHECK(std::abs(e.d2.dot(e.d3)) < 1e-8);
    CHECK(std::abs(e.d1.norm() - 1.0) < 1e-10);
    CHECK((reconstruct(e) - field.tensor(0)).norm() < 1e-9 * (1.0 + field.tensor(0).norm()));

    // Idempotence: decomposing the reconstruction reproduces the values.
    StressTensorField again;
    again.tensors = {StressTensorField::to_voigt(reconstruct(e))};
    const auto& e2 = principal_decomposition(again).nodes[0];
    CHECK(e2.s1 == doctest::Approx(e.s1).epsilon(1e-9));
    CHECK(e2.s3 == doctest::Approx(e.s3).epsilon(1e-9));
  }
}

TEST_CASE("stress CSV round trip and validation") {
  testsupport::TempDir dir("stress");
  StressTensorField field;
  field.tensors = {{1.5, -2, 3, 0.25, -0.5, 0.125}, {0, 0, 0, 0, 0, 0}};
  save_stress_csv(field, dir / "s.csv");
  StressTensorField back = load_stress_csv(dir / "s.csv", 2);
  for (std::size_t n = 0; n < 2; ++n)
    for (int c = 0; c < 6; ++c) CHECK(back.tensors[n][c] == field.tensors[n][c]);

  testsupport::write_file(dir / "bad_header.csv", "node,sxx\n0,1\n");
  CHECK_THROWS_AS(load_stress_csv(dir / "bad_header.csv", 2), ValidationError);
  testsupport::write_file(dir / "missing.csv", "node,sxx,syy,szz,sxy,sxz,syz\n0,1,1,1,0,0,0\n");
  CHECK_THROWS_AS(load_stress_csv(dir / "missing.csv", 2), ValidationError);
}
