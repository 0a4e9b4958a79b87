#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vinedist/complex.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/geodesics.hpp"
#include "vinedist/persistence.hpp"
#include "vinedist/wasserstein.hpp"
#include "vinedist/weighting.hpp"

namespace vinedist {

/// Which ends of a vine rest on the diagonal.
enum class VineClass {
  Off,            // never touches the diagonal
  EndsOnDiagonal,
  StartsOnDiagonal,
  BothOnDiagonal,
};

inline std::string_view to_string(VineClass c) {
  switch (c) {
    case VineClass::Off: return "**";
    case VineClass::EndsOnDiagonal: return "*o";
    case VineClass::StartsOnDiagonal: return "o*";
    case VineClass::BothOnDiagonal: return "oo";
  }
  return "??";
}

inline VineClass vine_class_from_string(std::string_view s) {
  if (s == "**") return VineClass::Off;
  if (s == "*o") return VineClass::EndsOnDiagonal;
  if (s == "o*") return VineClass::StartsOnDiagonal;
  if (s == "oo") return VineClass::BothOnDiagonal;
  throw Error(ErrorKind::ParseError, "unknown vine class '" + std::string(s) + "'");
}

struct VinePoint {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;

  PlanePoint point() const { return {x, y}; }
};

/// Polyline traced by one diagram point; t strictly increasing. A vine that
/// starts (ends) on the diagonal rests there before start_time (after end_time).
struct Vine {
  std::vector<VinePoint> points;
  VineClass cls = VineClass::Off;
  bool essential = false;  // followed a ceiling-capped point at some time

  double start_time() const { return points.front().t; }
  double end_time() const { return points.back().t; }
};

struct Vineyard {
  int dim = 0;
  std::vector<double> times;
  std::vector<PersistenceDiagram> diagrams;
  std::vector<Vine> vines;
  std::vector<double> ambiguity_times;
  bool refinement_limit_reached = false;
  std::vector<std::string> warnings;

  /// Off-diagonal vine positions at grid time index k.
  std::vector<PlanePoint> points_at(std::size_t k) const {
    std::vector<PlanePoint> out;
    const double t = times[k];
    for (const auto& v : vines)
      for (const auto& vp : v.points)
        if (vp.t == t && vp.x != vp.y) out.push_back(vp.point());
    return out;
  }
};

struct VineyardOptions {
  std::size_t initial_steps = 16;
  std::optional<double> delta;  // bottleneck threshold; default 1e-2 of the value range
  int max_depth = 10;
  bool include_essential = true;
  std::optional<double> ceiling;  // default: max over both endpoint functions
};

namespace detail {

inline std::vector<std::pair<std::size_t, std::size_t>> sorted_pairs(const Matching& m) {
  auto pairs = m.pairs;
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

inline std::vector<std::pair<std::size_t, std::size_t>> compose(const Matching& first, const Matching& second) {
  std::map<std::size_t, std::size_t> next(second.pairs.begin(), second.pairs.end());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (auto [a, b] : first.pairs) {
    auto it = next.find(b);
    if (it != next.end()) out.emplace_back(a, it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline DistanceResult step_matching(const PersistenceDiagram& a, const PersistenceDiagram& b, const Weighting& w,
                                    bool include_essential) {
  return weighted_wasserstein(a, b, kInfinity, 1.0, w, include_essential);
}

/// Follows matched points through consecutive diagrams. Unmatched points leave
/// or enter through their diagonal projection at the neighbouring grid time.
inline Vineyard assemble(int dim, std::vector<double> times, std::vector<PersistenceDiagram> diagrams,
                         const std::vector<Matching>& matchings, bool include_essential) {
  Vineyard vy;
  vy.dim = dim;
  std::vector<bool> starts_on(0), ends_on(0);
  std::map<std::size_t, std::size_t> active;
  auto open_vine = [&](std::vector<VinePoint> pts, bool essential, bool from_diagonal) {
    vy.vines.push_back({std::move(pts), VineClass::Off, essential});
    starts_on.push_back(from_diagonal);
    ends_on.push_back(false);
    return vy.vines.size() - 1;
  };
  for (std::size_t idx : matchable_points(diagrams.front(), include_essential)) {
    const auto& pt = diagrams.front().points[idx];
    active[idx] = open_vine({{times.front(), pt.birth, pt.death}}, pt.essential, false);
  }
  for (std::size_t i = 0; i + 1 < diagrams.size(); ++i) {
    const auto& from = diagrams[i];
    const auto& to = diagrams[i + 1];
    const Matching& m = matchings[i];
    if (m.ambiguous) vy.ambiguity_times.push_back(times[i]);
    std::map<std::size_t, std::size_t> next;
    for (auto [a, b] : m.pairs) {
      const std::size_t v = active.at(a);
      const auto& pt = to.points[b];
      vy.vines[v].points.push_back({times[i + 1], pt.birth, pt.death});
      vy.vines[v].essential = vy.vines[v].essential || pt.essential;
      next[b] = v;
    }
    for (std::size_t a : m.p_to_diagonal) {
      const std::size_t v = active.at(a);
      const PlanePoint proj = diagonal_projection(as_point(from.points[a]));
      vy.vines[v].points.push_back({times[i + 1], proj.x, proj.y});
      ends_on[v] = true;
    }
    for (std::size_t b : m.q_to_diagonal) {
      const auto& pt = to.points[b];
      const PlanePoint proj = diagonal_projection(as_point(pt));
      next[b] = open_vine({{times[i], proj.x, proj.y}, {times[i + 1], pt.birth, pt.death}}, pt.essential, true);
    }
    active = std::move(next);
  }
  for (std::size_t v = 0; v < vy.vines.size(); ++v) {
    const bool s = starts_on[v], e = ends_on[v];
    vy.vines[v].cls = s && e ? VineClass::BothOnDiagonal
                      : s    ? VineClass::StartsOnDiagonal
                      : e    ? VineClass::EndsOnDiagonal
                             : VineClass::Off;
  }
  vy.times = std::move(times);
  vy.diagrams = std::move(diagrams);
  return vy;
}

}  // namespace detail

/// Weighted vineyard distance: sum over vine segments of the segment integral
/// of w. Diagonal-resting stretches contribute nothing.
inline double vineyard_distance(const Vineyard& vy, const Weighting& w) {
  double total = 0.0;
  for (const auto& v : vy.vines)
    for (std::size_t i = 0; i + 1 < v.points.size(); ++i)
      total += segment_integral(v.points[i].point(), v.points[i + 1].point(), w);
  return total;
}

/// Vineyard of a homotopy on an adaptive time grid. Consecutive diagrams are
/// matched by optimal w-weighted W_{inf,1}; an interval is bisected while its
/// endpoint diagrams are more than delta apart in bottleneck distance, or while
/// bisection changes the matching or the summed cost, up to max_depth.
inline Vineyard build_vineyard(const Homotopy& h, int dim, const Weighting& w, const VineyardOptions& opt = {}) {
  if (opt.initial_steps < 1) throw Error(ErrorKind::InvalidArgument, "initial_steps must be >= 1");
  if (opt.delta && !(*opt.delta > 0.0)) throw Error(ErrorKind::InvalidArgument, "delta must be positive");
  const double ceiling = opt.ceiling.value_or(h.value_ceiling());
  const double range = h.value_ceiling() - h.value_floor();
  const double delta = opt.delta.value_or(range > 0.0 ? 1e-2 * range : 1e-2);
  const CellComplex& k = h.complex();
  auto diagram_at = [&](double t) { return compute_diagram(k, h.at(t), dim, ceiling); };

  std::vector<double> times;
  std::vector<PersistenceDiagram> diagrams;
  std::vector<Matching> matchings;
  bool limit_reached = false;

  auto step = [&](const PersistenceDiagram& a, const PersistenceDiagram& b) {
    return detail::step_matching(a, b, w, opt.include_essential);
  };

  // Appends the interior and right endpoint of [ta, tb] to the output lists.
  auto refine = [&](auto&& self, double ta, const PersistenceDiagram& da, double tb, PersistenceDiagram db,
                    DistanceResult ab, int depth) -> void {
    const double tm = 0.5 * (ta + tb);
    PersistenceDiagram dm = diagram_at(tm);
    DistanceResult am = step(da, dm);
    DistanceResult mb = step(dm, db);
    bool unstable = bottleneck(da, db, opt.include_essential).distance > delta;
    if (!unstable) unstable = detail::sorted_pairs(ab.matching) != detail::compose(am.matching, mb.matching);
    if (!unstable) {
      const double split = am.distance + mb.distance;
      unstable = std::abs(split - ab.distance) > 1e-9 * std::max(1.0, std::abs(split));
    }
    if (!unstable) {
      times.push_back(tb);
      diagrams.push_back(std::move(db));
      matchings.push_back(std::move(ab.matching));
      return;
    }
    if (depth >= opt.max_depth) {
      // A crossing inside the interval keeps the matching test firing at any
      // depth; only an unresolved bottleneck jump counts as a failure.
      if (bottleneck(da, dm, opt.include_essential).distance > delta ||
          bottleneck(dm, db, opt.include_essential).distance > delta)
        limit_reached = true;
      times.push_back(tm);
      diagrams.push_back(dm);
      matchings.push_back(std::move(am.matching));
      times.push_back(tb);
      diagrams.push_back(std::move(db));
      matchings.push_back(std::move(mb.matching));
      return;
    }
    const PersistenceDiagram dm_copy = dm;
    self(self, ta, da, tm, std::move(dm), std::move(am), depth + 1);
    self(self, tm, dm_copy, tb, std::move(db), std::move(mb), depth + 1);
  };

  const std::size_t n0 = opt.initial_steps;
  times.push_back(0.0);
  diagrams.push_back(diagram_at(0.0));
  PersistenceDiagram left = diagrams.front();
  for (std::size_t i = 1; i <= n0; ++i) {
    const double ta = static_cast<double>(i - 1) / static_cast<double>(n0);
    const double tb = i == n0 ? 1.0 : static_cast<double>(i) / static_cast<double>(n0);
    PersistenceDiagram right = diagram_at(tb);
    DistanceResult ab = step(left, right);
    PersistenceDiagram right_copy = right;
    refine(refine, ta, left, tb, std::move(right), std::move(ab), 0);
    left = std::move(right_copy);
  }

  Vineyard vy = detail::assemble(dim, std::move(times), std::move(diagrams), matchings, opt.include_essential);
  vy.refinement_limit_reached = limit_reached;
  if (limit_reached)
    vy.warnings.push_back("RefinementLimitReached: some intervals were still unstable at max_depth " +
                          std::to_string(opt.max_depth));
  return vy;
}

/// Piecewise-linear vineyard through a sequence of diagrams on the uniform grid
/// i / (n - 1).
inline Vineyard vineyard_from_diagrams(std::vector<PersistenceDiagram> diagrams, const Weighting& w,
                                       bool include_essential = true) {
  if (diagrams.size() < 2) throw Error(ErrorKind::EmptySequence, "need at least two diagrams");
  const int dim = diagrams.front().dim;
  for (const auto& d : diagrams)
    if (d.dim != dim) throw Error(ErrorKind::DimensionMismatch, "diagram sequence mixes homology dimensions");
  const std::size_t n = diagrams.size();
  std::vector<double> times(n);
  for (std::size_t i = 0; i < n; ++i) times[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  std::vector<Matching> matchings;
  for (std::size_t i = 0; i + 1 < n; ++i)
    matchings.push_back(detail::step_matching(diagrams[i], diagrams[i + 1], w, include_essential).matching);
  return detail::assemble(dim, std::move(times), std::move(diagrams), matchings, include_essential);
}

/// Sum of w-weighted W_{inf,1} between diagrams at i/n and (i-1)/n. Needs no
/// vine tracking; converges to the vineyard distance as n grows.
inline double riemann_sum_distance(const Homotopy& h, int dim, const Weighting& w, std::size_t n,
                                   bool include_essential = true, std::optional<double> ceiling = std::nullopt) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  const double cap = ceiling.value_or(h.value_ceiling());
  const CellComplex& k = h.complex();
  PersistenceDiagram prev = compute_diagram(k, h.at(0.0), dim, cap);
  double total = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = i == n ? 1.0 : static_cast<double>(i) / static_cast<double>(n);
    PersistenceDiagram cur = compute_diagram(k, h.at(t), dim, cap);
    total += weighted_wasserstein(cur, prev, kInfinity, 1.0, w, include_essential).distance;
    prev = std::move(cur);
  }
  return total;
}

}  // namespace vinedist
