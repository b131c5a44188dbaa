#pragma once

#include "stresspath/fea.hpp"
#include "stresspath/operators.hpp"

namespace stresspath {

// Geodesic distance from the base face over the solid, per node (mm).
struct DistanceField {
  Eigen::VectorXd phi;
};

// Heat-method geodesic distance: diffuse heat from the source for a short
// time t = h^2 (h = mean edge length), normalize and negate the temperature
// gradient per tet, then recover the distance whose gradient follows it by a
// Poisson solve. The pure-Neumann Poisson system is pinned at the first
// source node and the result shifted so the source sits at zero.
DistanceField geodesic_heat(const TetMesh& mesh, const TetOperators& ops,
                            const std::vector<int>& source_nodes,
                            const SolveOptions& opts = {});

// Distance field of planar slicing along a coordinate axis (0=x, 1=y, 2=z).
DistanceField axis_distance_field(const TetMesh& mesh, int axis);

// One curved layer: a triangulated level set of the distance field carrying
// interpolated stress and surface normals oriented along +grad(phi).
struct Slice {
  TriMesh surface;
  std::vector<std::array<double, 6>> tensors;        // interpolated Cauchy, Voigt
  std::vector<PrincipalStressField::Entry> stress;   // re-decomposed per vertex
  std::vector<Vec3> normals;                         // unit, along +grad(phi)
  int layer_index = 0;
  double iso_value = 0.0;                            // layer_index * layer_height

  // Provenance of each slice vertex: interpolation point on mesh edge (a, b).
  struct EdgeSource {
    int a = -1, b = -1;
    double s = 0.0;  // position = (1-s) * a + s * b
  };
  std::vector<EdgeSource> sources;

  // Per-vertex critical flag, filled by the stress-flow stage.
  std::vector<char> critical;
};

struct SliceOptions {
  double min_edge_collapse_ratio = 0.0;  // 0 disables the cleanup pass
  int jobs = 1;
};

// Marching-tetrahedra level sets at iso = k * layer_height, k = 0, 1, ...
// Stress tensors are interpolated barycentrically along the cut edges and
// re-decomposed to principal form. Slices with total area below
// layer_height^2 are dropped.
std::vector<Slice> extract_slices(const TetMesh& mesh, const DistanceField& dist,
                                  const StressTensorField& stress, double layer_height,
                                  const SliceOptions& opts = {});

// Mean of gamma = |f x n| over critical slice vertices, where f is the unit
// maximum principal direction: 1 = stress tangent to the layer, 0 = normal.
struct SlicingAlignment {
  double overall = 0.0;
  std::vector<double> per_slice;
  long critical_count = 0;
};

SlicingAlignment slicing_alignment(const std::vector<Slice>& slices);

}  // namespace stresspath
