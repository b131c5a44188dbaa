#pragma once

#include "stresspath/slicing.hpp"

namespace stresspath {

// Per-slice tangent vector field, one unit vector per slice vertex. The
// stage advances projected_orthogonal -> rectified -> preprocessed; valid
// vectors are unit length and tangent to the slice (|f.n| <= 1e-6).
enum class FlowStage { projected_orthogonal, rectified, preprocessed };

struct TangentFlow {
  FlowStage stage = FlowStage::projected_orthogonal;
  std::vector<Vec3> vectors;
  std::vector<char> valid;

  long valid_count() const;
};

// Project the maximum principal direction onto the tangent plane and rotate
// it 90 degrees about the normal: u = f - (f.n)n, out = (u x n)/|u x n|.
// Vertices whose stress is (numerically) normal to the slice are marked
// invalid and resolved later by extrapolation.
TangentFlow project_orthogonal(const Slice& slice);

enum class RectifyAxisMode { cartesian, pca };

struct RectifyInfo {
  int axis = -1;                         // dominant Cartesian axis index
  Vec3 axis_direction = Vec3::Zero();    // equals e_axis in cartesian mode
  std::array<double, 3> scores = {0, 0, 0};
  bool ambiguous = false;                // top two scores within 10%
};

// Flip vectors so the field is consistently oriented along its dominant
// axis: axis = argmax_i sum_v |f_v . e_i| (ties -> smaller index), then
// negate every vector with f . e_axis < 0. Idempotent and invariant to
// vertex-wise negation of the input. The PCA mode rectifies against the
// principal direction of sum f f^T instead, for fields whose dominant flow
// is diagonal.
TangentFlow rectify(const TangentFlow& flow, RectifyInfo* info = nullptr,
                    RectifyAxisMode mode = RectifyAxisMode::cartesian);

// Critical = sufficiently anisotropic and significant:
// |s1|/|s3| > theta_a (ratio is +inf when s3 = 0) and
// |s1| / global_max_s1 > theta_s, with the max taken over the whole part.
struct CriticalMask {
  std::vector<char> flags;
  double theta_a = 3.0;
  double theta_s = 0.1;

  long count() const;
};

CriticalMask classify_critical(const Slice& slice, double theta_a, double theta_s,
                               double global_max_s1);

// Number of connected components of the critical vertex set; trajectory
// quality is best when this is 1.
int critical_component_count(const Slice& slice, const CriticalMask& mask);

// Replace the flow on uncritical (and invalid) vertices with the harmonic
// extension of the critical boundary values, solved per Cartesian component
// with the slice's stiffness Laplacian, then projected back to the tangent
// plane and normalized. Uncritical regions with no critical boundary fall
// back to the mean rectified direction, with a warning.
TangentFlow extrapolate_uncritical(const Slice& slice, const TangentFlow& rectified,
                                   const CriticalMask& mask, const SolveOptions& opts = {});

}  // namespace stresspath
