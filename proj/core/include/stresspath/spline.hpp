#pragma once

#include <Eigen/Core>
#include <vector>

#include "stresspath/toolpath.hpp"

namespace stresspath {

// Cubic smoothing spline over strictly increasing knots, one channel per
// column of Y. Minimizes p * sum |y_i - s(t_i)|^2 + (1-p) * integral s''^2:
// p = 1 interpolates, p -> 0 flattens to the least-squares line. Periodic
// boundary closes the curve over one extra interval after the last knot.
class SmoothingSpline {
 public:
  static SmoothingSpline fit(const std::vector<double>& knots, const Eigen::MatrixX3d& values,
                             double p, bool periodic, double period_gap = 0.0);

  Vec3 eval(double t) const;
  double domain_start() const { return knots_.front(); }
  double domain_end() const;

 private:
  std::vector<double> knots_;
  Eigen::MatrixX3d values_;       // spline values a at the knots
  Eigen::MatrixX3d second_deriv_; // gamma at the knots
  bool periodic_ = false;
  double period_gap_ = 0.0;       // closing interval length (periodic only)
};

// Smoothing-spline resample of a polyline at a uniform arc-length step,
// parametrized by cumulative chord length. Open endpoints are preserved
// exactly; closed polylines use the periodic boundary. If the smoothed
// curve strays more than `deviation_bound` (mm) from the input, the
// smoothing parameter is walked toward 1 until it fits. Inputs with fewer
// than 4 points are returned unchanged with a warning.
Polyline smooth_resample(const Polyline& line, double p, double step,
                         double deviation_bound = 0.1);

// Minimum distance from a point to a polyline (segments, honoring closure).
double distance_to_polyline(const Vec3& point, const Polyline& line);

}  // namespace stresspath
