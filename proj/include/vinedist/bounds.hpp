#pragma once

#include <cmath>
#include <memory>
#include <optional>

#include "vinedist/complex.hpp"
#include "vinedist/geodesics.hpp"
#include "vinedist/persistence.hpp"
#include "vinedist/vineyard.hpp"
#include "vinedist/wasserstein.hpp"

namespace vinedist {

/// Sum of |f(s) - g(s)|^p over cells of dimension dim and dim + 1.
inline double cellwise_lp_sum(const CellComplex& k, const FilterFunction& f, const FilterFunction& g, int dim,
                              double p = 1.0) {
  double s = 0.0;
  for (std::size_t id = 0; id < k.size(); ++id) {
    if (k.dim(id) != dim && k.dim(id) != dim + 1) continue;
    const double d = std::abs(f[id] - g[id]);
    s += p == 1.0 ? d : std::pow(d, p);
  }
  return s;
}

inline double sup_norm_difference(const FilterFunction& f, const FilterFunction& g) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

struct BoundsReport {
  double w_inf1 = 0.0;         // W_{inf,1}(dgm f, dgm g)
  double vineyard = 0.0;       // unweighted straight-line vineyard distance
  double l1_sum = 0.0;         // sum over dims d, d+1 of |f - g|
  double weighted_vineyard = 0.0;
  std::optional<double> mvc;   // standard weighting only
  bool lower_ok = false;       // w_inf1 <= vineyard
  bool upper_ok = false;       // vineyard <= l1_sum
  bool mvc_ok = true;          // mvc <= weighted_vineyard

  bool all_ok() const { return lower_ok && upper_ok && mvc_ok; }
};

inline constexpr double kBoundTolerance = 1e-6;

/// Evaluates the sandwich W_{inf,1} <= V <= L1 for the simplex-level
/// straight-line homotopy from f to g, and MVC <= V^(w) when w is standard.
inline BoundsReport check_bounds(std::shared_ptr<const CellComplex> k, const FilterFunction& f,
                                 const FilterFunction& g, int dim, const Weighting& w = Weighting::standard(),
                                 VineyardOptions opt = {}) {
  const Homotopy h = straight_line_homotopy(k, f, g, HomotopyMode::SimplexLevel);
  const double ceiling = opt.ceiling.value_or(h.value_ceiling());
  opt.ceiling = ceiling;
  const PersistenceDiagram p = compute_diagram(*k, f, dim, ceiling);
  const PersistenceDiagram q = compute_diagram(*k, g, dim, ceiling);

  BoundsReport r;
  r.w_inf1 = wasserstein(p, q, kInfinity, 1.0, opt.include_essential).distance;
  r.vineyard = vineyard_distance(build_vineyard(h, dim, Weighting::uniform(), opt), Weighting::uniform());
  r.l1_sum = cellwise_lp_sum(*k, f, g, dim);
  r.weighted_vineyard = vineyard_distance(build_vineyard(h, dim, w, opt), w);
  r.lower_ok = r.w_inf1 <= r.vineyard + kBoundTolerance;
  r.upper_ok = r.vineyard <= r.l1_sum + kBoundTolerance;
  if (w.kind() == WeightingKind::Standard) {
    r.mvc = mvc(p, q, w, opt.include_essential).distance;
    r.mvc_ok = *r.mvc <= r.weighted_vineyard + kBoundTolerance;
  }
  return r;
}

}  // namespace vinedist
