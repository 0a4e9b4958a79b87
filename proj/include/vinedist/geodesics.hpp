#pragma once

#include <cmath>
#include <functional>

#include "vinedist/errors.hpp"
#include "vinedist/wasserstein.hpp"
#include "vinedist/weighting.hpp"

namespace vinedist {

namespace detail {

// Adaptive Simpson on [a, b] with a relative tolerance.
inline double adaptive_simpson(const std::function<double(double)>& g, double a, double b, double fa, double fm,
                               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = g(lm), frm = g(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Line integral of w along the straight segment p0 -> p1 with sup-norm arc
/// length. Exact for the linear built-ins (mean of the endpoint weights times the
/// length); adaptive quadrature otherwise.
inline double segment_integral(PlanePoint p0, PlanePoint p1, const Weighting& w) {
  const double len = sup_distance(p0, p1);
  if (len == 0.0) return 0.0;
  if (w.is_linear()) return len * 0.5 * (w(p0) + w(p1));
  auto g = [&](double s) { return w({p0.x + s * (p1.x - p0.x), p0.y + s * (p1.y - p0.y)}); };
  const double fa = g(0.0), fm = g(0.5), fb = g(1.0);
  const double whole = (fa + 4.0 * fm + fb) / 6.0;
  const double tol = 1e-8 * std::max(std::abs(whole), 1e-300);
  return len * detail::adaptive_simpson(g, 0.0, 1.0, fa, fm, fb, whole, tol, 40);
}

inline double standard_weight(PlanePoint p) { return (p.y - p.x) / std::sqrt(2.0); }

/// Cheapest standard-weighted path from p to the diagonal: w(p)^2 / (2 sqrt 2).
inline double standard_path_to_diagonal(PlanePoint p) {
  const double w = standard_weight(p);
  return w * w / (2.0 * std::sqrt(2.0));
}

/// Standard-weighted path distance between two half-plane points: the cheaper
/// of travelling parallel to the diagonal at the lower point's height and then
/// straight up, or dropping to the diagonal and climbing back.
inline double standard_path_distance(PlanePoint p0, PlanePoint p1) {
  double w0 = standard_weight(p0), w1 = standard_weight(p1);
  if (w0 > w1) std::swap(w0, w1);
  const double root8 = 2.0 * std::sqrt(2.0);
  const double along = w0 * std::abs(p1.y + p1.x - p0.y - p0.x) / 2.0 + (w1 * w1 - w0 * w0) / root8;
  const double through = (w0 * w0 + w1 * w1) / root8;
  return std::min(along, through);
}

/// Minimum vine cost: optimal partial matching under standard path distances.
/// Only defined for the standard weighting.
inline DistanceResult mvc(const PersistenceDiagram& a, const PersistenceDiagram& b,
                          const Weighting& w = Weighting::standard(), bool include_essential = true) {
  if (w.kind() != WeightingKind::Standard)
    throw Error(ErrorKind::UnsupportedWeighting, "minimum vine cost needs the standard weighting, got " + w.name());
  return optimal_partial_matching(
      a, b, [](PlanePoint x, PlanePoint y) { return standard_path_distance(x, y); },
      [](PlanePoint x) { return standard_path_to_diagonal(x); }, 1.0, include_essential);
}

}  // namespace vinedist
