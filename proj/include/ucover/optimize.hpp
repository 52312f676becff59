#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace ucover {

struct ScalarOptimum {
  double x = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

/// Golden-section search for a minimum of f on [a, b], stopping once the
/// bracket is narrower than `tol`.
inline ScalarOptimum golden_section_minimize(const std::function<double(double)>& f, double a, double b,
                                             double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::fabs(b - a) > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  ScalarOptimum best{x, f(x)};
  if (fc < best.value) best = {c, fc};
  if (fd < best.value) best = {d, fd};
  return best;
}

/// Minimizes f over [lo, hi] (lo > 0): evaluate a log-spaced grid, then refine
/// the best grid cell by golden-section search in log x until the relative
/// bracket width drops below rel_tol. Never returns worse than the best grid
/// point.
inline ScalarOptimum log_grid_golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                                              int grid_points, double rel_tol) {
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  const double step = (lhi - llo) / (grid_points - 1);
  int best_i = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_points; ++i) {
    const double v = f(std::exp(llo + step * i));
    if (v < best_v) {
      best_v = v;
      best_i = i;
    }
  }
  ScalarOptimum best{std::exp(llo + step * best_i), best_v};
  if (!std::isfinite(best_v)) return best;
  const double a = llo + step * std::max(best_i - 1, 0);
  const double b = llo + step * std::min(best_i + 1, grid_points - 1);
  const ScalarOptimum refined =
      golden_section_minimize([&](double t) { return f(std::exp(t)); }, a, b, rel_tol);
  if (refined.value < best.value) best = {std::exp(refined.x), refined.value};
  return best;
}

}  // namespace ucover
