#pragma once

#include <optional>
#include <string>
#include <utility>

#include "stresspath/slicing.hpp"
#include "stresspath/toolpath.hpp"

namespace stresspath {

// Point location in the tet mesh via a uniform grid over tet boxes.
class TetLocator {
 public:
  explicit TetLocator(const TetMesh& mesh);

  struct Hit {
    int tet = -1;
    Eigen::Vector4d barycentric = Eigen::Vector4d::Zero();
  };
  // Containing tet with barycentric weights, or nullopt when the point lies
  // outside the mesh beyond `tol` (relative to the mesh scale).
  std::optional<Hit> locate(const Vec3& point, double tol = 1e-6) const;

 private:
  const TetMesh& mesh_;
  double cell_ = 1.0;
  Vec3 origin_ = Vec3::Zero();
  std::array<int, 3> dims_ = {0, 0, 0};
  std::vector<std::vector<int>> cells_;
};

// Per-node critical flags over the volume, same thresholds as the slice
// classification: |s1|/|s3| > theta_a and |s1| > theta_s * max|s1|.
std::vector<char> volumetric_critical_mask(const PrincipalStressField& principal,
                                           double theta_a, double theta_s);

struct TrajectoryAlignment {
  double beta_bar = 0.0;       // mean |f . d| over critical infill points
  long critical_points = 0;    // K
  long total_points = 0;
  std::vector<std::pair<int, double>> per_layer;  // (layer index, beta)
};

// beta_k = |f . d| with d the unit tangent (central difference) and f the
// maximum principal direction of the stress interpolated at the point.
// Contours and travel moves are excluded; a point counts as critical when
// its containing tet touches a critical node.
TrajectoryAlignment trajectory_alignment(const ToolpathProgram& program, const TetMesh& mesh,
                                         const StressTensorField& stress,
                                         const std::vector<char>& node_mask);

struct SpacingReport {
  std::vector<double> histogram;  // mass per bin, sums to 1
  double bin_width = 0.02;
  double mean = 0.0;
  double variance = 0.0;
  double nominal = 0.0;  // mm
  long samples = 0;
};

struct SpacingOptions {
  // Distances beyond this multiple of nominal come from non-adjacent
  // geometry (e.g. another arm of the slice) and are excluded.
  double max_normalized = 3.0;
  double bin_width = 0.02;
};

// Distance from every infill point to the polylines of the two adjacent
// iso indices, normalized by the nominal spacing.
SpacingReport spacing_distribution(const LayerToolpath& layer, double nominal,
                                   const SpacingOptions& opts = {});
SpacingReport spacing_distribution(const ToolpathProgram& program, double nominal,
                                   const SpacingOptions& opts = {});

struct AlignmentReport {
  std::vector<std::pair<std::string, double>> gamma_by_variant;
  std::vector<double> gamma_per_slice;  // offset variant
  long critical_slice_vertices = 0;     // J
  double beta_bar = 0.0;
  long critical_trajectory_points = 0;  // K
  std::vector<std::pair<int, double>> beta_per_layer;
};

// Slicing-alignment comparison across distance-field variants (offset and
// planar axes), gamma averaged over critical slice vertices only.
AlignmentReport compare_slicings(const TetMesh& mesh, const StressTensorField& stress,
                                 const PrincipalStressField& principal,
                                 const std::vector<std::pair<std::string, DistanceField>>& variants,
                                 double layer_height, double theta_a, double theta_s,
                                 const SliceOptions& slice_opts = {});

void write_report_json(const AlignmentReport& alignment, const SpacingReport& spacing,
                       const std::filesystem::path& path);
void write_histogram_csv(const SpacingReport& spacing, const std::filesystem::path& path);

}  // namespace stresspath
