#pragma once

#include <utility>
#include <vector>

namespace apernet {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  int used = 0;
  bool degenerate = false;  // fewer than 2 usable points
};

// Ordinary least squares y = a + b x.
LineFit fit_line(const std::vector<std::pair<double, double>>& xy);

}  // namespace apernet
