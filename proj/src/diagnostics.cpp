#include "ggd/diagnostics.hpp"

#include <iostream>

namespace ggd {

void Diagnostics::warn(std::string message) { warnings.push_back(std::move(message)); }

void report_warning(Diagnostics* diag, std::string message) {
  if (diag) {
    diag->warn(std::move(message));
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace ggd
