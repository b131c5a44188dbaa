#pragma once

#include "stresspath/mesh.hpp"

namespace stresspath {

// Parametric test geometries. All are structured grids subdivided into
// tets (Freudenthal 6-tet scheme, conforming across cells), sized in mm.

// Axis-aligned box [0,lx]x[0,ly]x[0,lz] with nx*ny*nz cells.
TetMesh make_box(int nx, int ny, int nz, double lx, double ly, double lz);

// 10x1x1-style cantilever bar along +x.
TetMesh make_bar(double length = 10.0, double width = 1.0, double thickness = 1.0,
                 int nx = 20, int ny = 3, int nz = 3);

// Bar bent through a 90 degree arc in the xz-plane: straight leg along +x,
// quarter arc of radius `bend_radius`, straight leg along +z. `length` is
// the developed centerline length of each straight leg.
TetMesh make_curved_bracket(double leg = 20.0, double width = 10.0, double thickness = 4.0,
                            double bend_radius = 12.0, int n_len = 36, int n_wid = 8,
                            int n_thk = 4);

// Quarter-cylinder shell around the y-axis: theta in [0, pi/2], radius in
// [radius, radius+thickness], y in [0, axial].
TetMesh make_quarter_shell(double radius = 20.0, double thickness = 2.0, double axial = 40.0,
                           int n_arc = 30, int n_thk = 2, int n_axial = 30);

// Ball of radius r, cube lattice mapped radially.
TetMesh make_ball(double radius = 1.0, int n = 8);

// L-shaped solid: box with one quadrant (x > split_x, z > split_z) removed.
TetMesh make_lshape(double lx, double ly, double lz, double split_x, double split_z,
                    int nx, int ny, int nz);

// Planar and curved triangle meshes for per-slice tests.
TriMesh make_square_grid(double size, int n);                      // xy-plane
TriMesh make_disk(double radius, int n_rings, int n_sectors);      // xy-plane
TriMesh make_annulus(double r_inner, double r_outer, int n_rings, int n_sectors);

}  // namespace stresspath
