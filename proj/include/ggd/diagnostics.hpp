#pragma once

#include <string>
#include <vector>

namespace ggd {

/// Collects non-fatal warnings raised while a computation runs. Functions that
/// accept a `Diagnostics*` write here when given one and to stderr otherwise,
/// so nothing reportable is ever dropped.
struct Diagnostics {
  std::vector<std::string> warnings;

  void warn(std::string message);
};

/// Routes a warning to `diag` if present, else to stderr.
void report_warning(Diagnostics* diag, std::string message);

}  // namespace ggd
