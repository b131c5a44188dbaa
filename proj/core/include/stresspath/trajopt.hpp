#pragma once

#include "stresspath/spline.hpp"
#include "stresspath/stressflow.hpp"
#include "stresspath/toolpath.hpp"

namespace stresspath {

// Trajectory-generating scalar field on a slice, calibrated so that the
// median face gradient magnitude is 1 and iso increments map to millimetres.
struct ScalarFieldOnSlice {
  Eigen::VectorXd phi;
  double residual = 0.0;  // |G phi - targets|^2 before calibration
};

// Fit phi so its mesh gradient matches the preprocessed flow:
// phi = argmin |G phi - F|^2 + eps |phi|^2, solved through the regularized
// normal equations. `eps_rel` scales the largest diagonal of G^T G. Per-face
// targets average the corner vectors, projected to the face plane and
// renormalized.
ScalarFieldOnSlice fit_scalar_field(const Slice& slice, const TangentFlow& flow,
                                    double eps_rel = 1e-8, const SolveOptions& opts = {});

// Marching-triangle level sets at min + spacing/2 + k * spacing, chained
// into polylines through shared mesh edges. Point normals interpolate the
// slice normals. Throws on a (near-)constant field.
std::vector<Polyline> extract_isolines(const Slice& slice, const ScalarFieldOnSlice& field,
                                       double spacing);

struct LayerPathOptions {
  int contour_count = 2;
  double spacing = 0.4;     // mm, line spacing = contour inset unit
  double travel_lift = 0.1; // mm along the local normal, one layer height
};

// Assemble one layer: boundary contours inset by (k+0.5)*spacing, infill
// trimmed to contour_count*spacing from the boundary, print order contours
// outside-in then infill chained greedily by nearest endpoint (falling back
// to input order if greedy travels farther), travel moves in between.
LayerToolpath build_layer_path(const std::vector<Polyline>& infill, const Slice& slice,
                               const LayerPathOptions& opts);

}  // namespace stresspath
