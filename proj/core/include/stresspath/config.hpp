#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "stresspath/fea.hpp"

namespace stresspath {

// Pipeline configuration, parsed from a "key = value" text file. Region
// selectors name a boundary-box face: xmin, xmax, ymin, ymax, zmin, zmax.
struct Config {
  std::string node_path;
  std::string ele_path;
  std::string stress_csv;  // optional: skip FEA and read external stress

  std::string base_face = "zmin";
  double base_face_tol = 1e-6;  // mm

  Material material;  // E = 2e9 Pa (arbitrary), nu = 0.3

  std::vector<BoundaryConditions::Fix> fixes;
  std::vector<BoundaryConditions::Load> loads;
  struct FixRegion {
    std::string selector;
  };
  struct LoadRegion {
    std::string selector;
    Vec3 total_force = Vec3::Zero();  // N, spread evenly over the region
  };
  std::vector<FixRegion> fix_regions;
  std::vector<LoadRegion> load_regions;

  double theta_a = 3.0;
  double theta_s = 0.1;
  double layer_height = 0.1;   // mm
  double line_spacing = 0.4;   // mm
  int contour_count = 2;
  double spline_p = 0.95;
  double epsilon_rel = 1e-8;
  double solver_tol = 1e-10;
  int solver_max_iter = 0;     // 0 = automatic
  double resample_step = 0.5;  // mm
  double deviation_bound = 0.1;  // mm
  bool rectify_pca = false;
  double slice_min_edge_ratio = 0.0;
  double spacing_max_normalized = 3.0;
  double histogram_bin = 0.02;
  bool svg_export = true;

  std::string out_dir = "out";
  int jobs = 1;

  void validate() const;
};

Config parse_config(const std::filesystem::path& path);

}  // namespace stresspath
