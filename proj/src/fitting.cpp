#include "apernet/fitting.hpp"

#include <cmath>

namespace apernet {

LineFit fit_line(const std::vector<std::pair<double, double>>& xy) {
  LineFit f;
  f.used = static_cast<int>(xy.size());
  if (xy.size() < 2) {
    f.degenerate = true;
    return f;
  }
  double n = static_cast<double>(xy.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : xy) {
    sx += x;
    sy += y;
  }
  double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0.0) {
    f.degenerate = true;
    return f;
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (xy.size() > 2) {
    double ss = 0;
    for (const auto& [x, y] : xy) {
      double r = y - (f.intercept + f.slope * x);
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / ((n - 2.0) * sxx));
  }
  return f;
}

}  // namespace apernet
