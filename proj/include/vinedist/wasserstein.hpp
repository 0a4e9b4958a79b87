#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "vinedist/assignment.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/persistence.hpp"
#include "vinedist/weighting.hpp"

namespace vinedist {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Partial bijection between two diagrams. Indices refer to the diagrams'
/// `points` vectors; points that did not take part (diagonal points, or
/// essential points when excluded) appear nowhere.
struct Matching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> p_to_diagonal;
  std::vector<std::size_t> q_to_diagonal;
  double cost = 0.0;
  bool ambiguous = false;
};

struct DistanceResult {
  double distance = 0.0;
  Matching matching;
};

inline PlanePoint as_point(const DiagramPoint& d) { return {d.birth, d.death}; }

/// L^p distance in the plane, p in [1, inf].
inline double lp_distance(PlanePoint a, PlanePoint b, double p) {
  const double dx = std::abs(a.x - b.x), dy = std::abs(a.y - b.y);
  if (std::isinf(p)) return std::max(dx, dy);
  if (p == 1.0) return dx + dy;
  if (p == 2.0) return std::hypot(dx, dy);
  return std::pow(std::pow(dx, p) + std::pow(dy, p), 1.0 / p);
}

inline double weighted_ground_distance(PlanePoint a, PlanePoint b, double p, const Weighting& w) {
  return lp_distance(a, b, p) * 0.5 * (w(a) + w(b));
}

inline double weighted_diagonal_distance(PlanePoint a, double p, const Weighting& w) {
  return weighted_ground_distance(a, diagonal_projection(a), p, w);
}

/// Indices of points that take part in matchings.
inline std::vector<std::size_t> matchable_points(const PersistenceDiagram& d, bool include_essential) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < d.points.size(); ++i) {
    const auto& pt = d.points[i];
    if (pt.birth == pt.death) continue;
    if (pt.essential && !include_essential) continue;
    idx.push_back(i);
  }
  return idx;
}

namespace detail {

inline double combine(const std::vector<double>& costs, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double c : costs) m = std::max(m, c);
    return m;
  }
  double s = 0.0;
  if (q == 1.0) {
    for (double c : costs) s += c;
    return s;
  }
  for (double c : costs) s += std::pow(c, q);
  return std::pow(s, 1.0 / q);
}

inline void check_exponents(double p, double q) {
  if (!(p >= 1.0) || !(q >= 1.0)) throw Error(ErrorKind::InvalidArgument, "exponents p and q must be >= 1");
}

}  // namespace detail

/// Optimal partial matching for arbitrary ground costs: pair_cost(a, b) for
/// matched points, diag_cost(a) for points sent to the diagonal, combined with
/// an outer q-norm. Finite q is a balanced assignment on the augmented
/// (|P|+|Q|) square matrix; q = inf is a bottleneck assignment.
template <class PairCost, class DiagCost>
DistanceResult optimal_partial_matching(const PersistenceDiagram& p_dgm, const PersistenceDiagram& q_dgm,
                                        PairCost&& pair_cost, DiagCost&& diag_cost, double q,
                                        bool include_essential = true) {
  if (p_dgm.dim != q_dgm.dim)
    throw Error(ErrorKind::DimensionMismatch, "diagrams have dimensions " + std::to_string(p_dgm.dim) + " and " +
                                                  std::to_string(q_dgm.dim));
  const auto ps = matchable_points(p_dgm, include_essential);
  const auto qs = matchable_points(q_dgm, include_essential);
  const std::size_t n = ps.size(), m = qs.size();
  DistanceResult result;
  if (n + m == 0) return result;

  const bool bottleneck = std::isinf(q);
  auto lift = [&](double c) { return (bottleneck || q == 1.0) ? c : std::pow(c, q); };
  assignment::CostMatrix cost(n + m);
  for (std::size_t i = 0; i < n; ++i) {
    const PlanePoint a = as_point(p_dgm.points[ps[i]]);
    for (std::size_t j = 0; j < m; ++j) cost(i, j) = lift(pair_cost(a, as_point(q_dgm.points[qs[j]])));
    cost(i, m + i) = lift(diag_cost(a));
  }
  for (std::size_t j = 0; j < m; ++j) {
    cost(n + j, j) = lift(diag_cost(as_point(q_dgm.points[qs[j]])));
    for (std::size_t i = 0; i < n; ++i) cost(n + j, m + i) = 0.0;
  }

  const assignment::Solution sol = bottleneck ? assignment::solve_bottleneck(cost) : assignment::solve_min_cost(cost, n);
  Matching& mt = result.matching;
  mt.ambiguous = sol.ambiguous;
  std::vector<double> used;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = sol.row_to_col[i];
    const PlanePoint a = as_point(p_dgm.points[ps[i]]);
    if (j < m) {
      mt.pairs.emplace_back(ps[i], qs[j]);
      used.push_back(pair_cost(a, as_point(q_dgm.points[qs[j]])));
    } else {
      mt.p_to_diagonal.push_back(ps[i]);
      used.push_back(diag_cost(a));
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (sol.row_to_col[n + j] == j) {
      mt.q_to_diagonal.push_back(qs[j]);
      used.push_back(diag_cost(as_point(q_dgm.points[qs[j]])));
    }
  }
  mt.cost = detail::combine(used, q);
  result.distance = mt.cost;
  return result;
}

/// w-weighted (p, q)-Wasserstein distance with an optimal matching.
inline DistanceResult weighted_wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p, double q,
                                           const Weighting& w, bool include_essential = true) {
  detail::check_exponents(p, q);
  return optimal_partial_matching(
      a, b, [&](PlanePoint x, PlanePoint y) { return weighted_ground_distance(x, y, p, w); },
      [&](PlanePoint x) { return weighted_diagonal_distance(x, p, w); }, q, include_essential);
}

inline DistanceResult wasserstein(const PersistenceDiagram& a, const PersistenceDiagram& b, double p, double q,
                                  bool include_essential = true) {
  detail::check_exponents(p, q);
  return optimal_partial_matching(
      a, b, [&](PlanePoint x, PlanePoint y) { return lp_distance(x, y, p); },
      [&](PlanePoint x) { return lp_distance(x, diagonal_projection(x), p); }, q, include_essential);
}

inline DistanceResult bottleneck(const PersistenceDiagram& a, const PersistenceDiagram& b,
                                 bool include_essential = true) {
  return wasserstein(a, b, kInfinity, kInfinity, include_essential);
}

/// Objective D^(w)(pi) of a given matching, for checking returned costs.
inline double evaluate_matching(const PersistenceDiagram& a, const PersistenceDiagram& b, const Matching& m, double p,
                                double q, const Weighting& w) {
  std::vector<double> costs;
  for (auto [i, j] : m.pairs)
    costs.push_back(weighted_ground_distance(as_point(a.points[i]), as_point(b.points[j]), p, w));
  for (std::size_t i : m.p_to_diagonal) costs.push_back(weighted_diagonal_distance(as_point(a.points[i]), p, w));
  for (std::size_t j : m.q_to_diagonal) costs.push_back(weighted_diagonal_distance(as_point(b.points[j]), p, w));
  return detail::combine(costs, q);
}

}  // namespace vinedist
