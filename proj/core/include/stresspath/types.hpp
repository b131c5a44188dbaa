#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace stresspath {

using Vec3 = Eigen::Vector3d;

// Bad input or configuration. The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical failure inside a pipeline stage. The CLI maps this to exit code 1.
class ComputeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-fatal diagnostics go to stderr with a "[stresspath] " prefix.
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace stresspath
