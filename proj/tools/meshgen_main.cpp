#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "stresspath/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic tet-mesh generator (.node/.ele)"};
  app.require_subcommand(1);

  std::string out_prefix = "mesh";
  app.add_option("--out", out_prefix, "output prefix (writes <out>.node and <out>.ele)")
      ->capture_default_str();

  double length = 10, width = 1, thickness = 1;
  int nx = 20, ny = 3, nz = 3;
  auto* bar = app.add_subcommand("bar", "axis-aligned bar along +x");
  bar->add_option("--length", length)->capture_default_str();
  bar->add_option("--width", width)->capture_default_str();
  bar->add_option("--thickness", thickness)->capture_default_str();
  bar->add_option("--nx", nx)->capture_default_str();
  bar->add_option("--ny", ny)->capture_default_str();
  bar->add_option("--nz", nz)->capture_default_str();

  double leg = 20, bwidth = 10, bthick = 4, radius = 12;
  int n_len = 36, n_wid = 8, n_thk = 4;
  auto* bracket = app.add_subcommand("bracket", "bar bent through 90 degrees in xz");
  bracket->add_option("--leg", leg)->capture_default_str();
  bracket->add_option("--width", bwidth)->capture_default_str();
  bracket->add_option("--thickness", bthick)->capture_default_str();
  bracket->add_option("--radius", radius)->capture_default_str();
  bracket->add_option("--n-len", n_len)->capture_default_str();
  bracket->add_option("--n-wid", n_wid)->capture_default_str();
  bracket->add_option("--n-thk", n_thk)->capture_default_str();

  double sradius = 20, sthick = 2, axial = 40;
  int n_arc = 30, n_sthk = 2, n_axial = 30;
  auto* shell = app.add_subcommand("shell", "quarter-cylinder shell around +y");
  shell->add_option("--radius", sradius)->capture_default_str();
  shell->add_option("--thickness", sthick)->capture_default_str();
  shell->add_option("--axial", axial)->capture_default_str();
  shell->add_option("--n-arc", n_arc)->capture_default_str();
  shell->add_option("--n-thk", n_sthk)->capture_default_str();
  shell->add_option("--n-axial", n_axial)->capture_default_str();

  double clx = 1, cly = 1, clz = 1;
  int cn = 10;
  auto* cube = app.add_subcommand("cube", "axis-aligned box");
  cube->add_option("--lx", clx)->capture_default_str();
  cube->add_option("--ly", cly)->capture_default_str();
  cube->add_option("--lz", clz)->capture_default_str();
  cube->add_option("--n", cn)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    stresspath::TetMesh mesh;
    if (bar->parsed())
      mesh = stresspath::make_bar(length, width, thickness, nx, ny, nz);
    else if (bracket->parsed())
      mesh = stresspath::make_curved_bracket(leg, bwidth, bthick, radius, n_len, n_wid, n_thk);
    else if (shell->parsed())
      mesh = stresspath::make_quarter_shell(sradius, sthick, axial, n_arc, n_sthk, n_axial);
    else if (cube->parsed())
      mesh = stresspath::make_box(cn, cn, cn, clx, cly, clz);

    stresspath::save_tet_mesh(mesh, out_prefix + ".node", out_prefix + ".ele");
    std::cout << out_prefix << ".node / .ele: " << mesh.vertex_count() << " nodes, "
              << mesh.tet_count() << " tets, " << mesh.boundary_faces.size()
              << " boundary faces\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
