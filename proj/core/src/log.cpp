#include "stresspath/types.hpp"

#include <iostream>

namespace stresspath {

void log_warn(const std::string& msg) {
  std::cerr << "[stresspath] warning: " << msg << "\n";
}

void log_info(const std::string& msg) {
  std::cerr << "[stresspath] " << msg << "\n";
}

}  // namespace stresspath
