#pragma once

#include <cmath>
#include <utility>

namespace ddae::detail {

/// Golden-section search for a maximum of f on [a, b]. Returns the best
/// point seen (not merely the final bracket midpoint), so a non-unimodal f
/// never yields a value below f at the evaluated points.
template <class F>
std::pair<double, double> golden_maximize(F&& f, double a, double b, double tol, int max_iter = 200) {
  constexpr double kInvPhi = 0.6180339887498948482;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  double best_x = fc >= fd ? c : d;
  double best_f = std::max(fc, fd);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
      if (fc > best_f) best_f = fc, best_x = c;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
      if (fd > best_f) best_f = fd, best_x = d;
    }
  }
  return {best_x, best_f};
}

}  // namespace ddae::detail
