#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "vinedist/complex.hpp"
#include "vinedist/errors.hpp"

namespace vinedist {

struct DiagramPoint {
  double birth = 0.0;
  double death = 0.0;
  bool essential = false;  // death was capped at the ceiling

  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

inline bool point_less(const DiagramPoint& a, const DiagramPoint& b) {
  return std::tie(a.birth, a.death, a.essential) < std::tie(b.birth, b.death, b.essential);
}

/// Multiset of (birth, death) pairs in one homology dimension. Essential classes
/// carry death == ceiling and are flagged.
struct PersistenceDiagram {
  int dim = 0;
  double ceiling = 0.0;
  std::vector<DiagramPoint> points;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  void sort() { std::sort(points.begin(), points.end(), point_less); }
  std::size_t essential_count() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const DiagramPoint& p) { return p.essential; }));
  }
};

/// Cells sorted by (value, dim, id), plus the inverse permutation.
struct FiltrationOrder {
  std::vector<std::size_t> order;
  std::vector<std::size_t> position;
};

inline FiltrationOrder make_filtration_order(const CellComplex& k, const FilterFunction& f) {
  validate_monotone(k, f);
  FiltrationOrder fo;
  fo.order.resize(k.size());
  std::iota(fo.order.begin(), fo.order.end(), std::size_t{0});
  std::sort(fo.order.begin(), fo.order.end(), [&](std::size_t a, std::size_t b) {
    return std::make_tuple(f[a], k.dim(a), a) < std::make_tuple(f[b], k.dim(b), b);
  });
  fo.position.resize(k.size());
  for (std::size_t i = 0; i < fo.order.size(); ++i) fo.position[fo.order[i]] = i;
  return fo;
}

namespace detail {

inline double resolve_ceiling(const FilterFunction& f, std::optional<double> ceiling) {
  const double top = f.max_value();
  if (!ceiling) return top;
  if (*ceiling < top)
    throw Error(ErrorKind::InvalidArgument,
                "ceiling " + std::to_string(*ceiling) + " is below the maximum filter value " + std::to_string(top));
  return *ceiling;
}

// Symmetric difference of two sorted index columns (addition over Z/2).
inline void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source,
                       std::vector<std::size_t>& scratch) {
  scratch.clear();
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(scratch));
  target.swap(scratch);
}

}  // namespace detail

/// Persistence diagram of the sublevel filtration of f in dimension dim over
/// Z/2, by standard column reduction with clearing. Zero-persistence finite
/// pairs are dropped; essential classes are kept with death = ceiling.
inline PersistenceDiagram compute_diagram(const CellComplex& k, const FilterFunction& f, int dim,
                                          std::optional<double> ceiling = std::nullopt) {
  if (dim < 0) throw Error(ErrorKind::InvalidArgument, "homology dimension must be nonnegative");
  const FiltrationOrder fo = make_filtration_order(k, f);
  PersistenceDiagram dgm;
  dgm.dim = dim;
  dgm.ceiling = detail::resolve_ceiling(f, ceiling);

  const std::size_t n = k.size();
  constexpr std::size_t none = CellComplex::npos;
  std::vector<std::vector<std::size_t>> columns(n);
  std::vector<std::size_t> pivot_owner(n, none);
  std::vector<bool> positive(n, false);
  std::vector<bool> paired(n, false);
  std::vector<std::size_t> scratch;

  auto load = [&](std::size_t pos) {
    const std::size_t cell = fo.order[pos];
    std::vector<std::size_t> col;
    col.reserve(k.boundary(cell).size());
    for (std::size_t face : k.boundary(cell)) col.push_back(fo.position[face]);
    std::sort(col.begin(), col.end());
    return col;
  };
  auto reduce = [&](std::size_t pos, std::vector<std::size_t> col) {
    while (!col.empty()) {
      const std::size_t owner = pivot_owner[col.back()];
      if (owner == none) break;
      detail::add_column(col, columns[owner], scratch);
    }
    if (!col.empty()) pivot_owner[col.back()] = pos;
    columns[pos] = std::move(col);
    return columns[pos].empty() ? none : columns[pos].back();
  };

  // Columns of dim + 1 give the deaths; their pivots are creators and need no reduction.
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (k.dim(fo.order[pos]) != dim + 1) continue;
    const std::size_t low = reduce(pos, load(pos));
    if (low == none) continue;
    positive[low] = true;
    paired[low] = true;
    const double birth = f[fo.order[low]];
    const double death = f[fo.order[pos]];
    if (birth != death) dgm.points.push_back({birth, death, false});
  }
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (k.dim(fo.order[pos]) != dim || positive[pos]) continue;
    positive[pos] = (dim == 0) || reduce(pos, load(pos)) == none;
  }
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (k.dim(fo.order[pos]) == dim && positive[pos] && !paired[pos])
      dgm.points.push_back({f[fo.order[pos]], dgm.ceiling, true});
  }
  dgm.sort();
  return dgm;
}

/// Zero-dimensional diagram by union-find with the elder rule. Produces the
/// same multiset as compute_diagram(k, f, 0, ceiling).
inline PersistenceDiagram compute_h0_union_find(const CellComplex& k, const FilterFunction& f,
                                                std::optional<double> ceiling = std::nullopt) {
  const FiltrationOrder fo = make_filtration_order(k, f);
  PersistenceDiagram dgm;
  dgm.dim = 0;
  dgm.ceiling = detail::resolve_ceiling(f, ceiling);

  const std::size_t nv = k.vertex_count();
  std::vector<std::size_t> parent(nv);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  // Filtration position of the oldest vertex in each root's component.
  std::vector<std::size_t> oldest(nv);
  for (std::size_t v = 0; v < nv; ++v) oldest[v] = fo.position[k.vertex_cell(v)];

  auto find = [&](std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };

  for (std::size_t pos = 0; pos < fo.order.size(); ++pos) {
    const std::size_t cell = fo.order[pos];
    if (k.dim(cell) != 1) continue;
    auto vs = k.vertices(cell);
    std::size_t a = find(vs.front());
    std::size_t b = find(vs.back());
    if (a == b) continue;
    if (oldest[a] > oldest[b]) std::swap(a, b);
    // b is the younger component and dies here.
    const double birth = f[fo.order[oldest[b]]];
    const double death = f[cell];
    if (birth != death) dgm.points.push_back({birth, death, false});
    parent[b] = a;
  }
  for (std::size_t v = 0; v < nv; ++v)
    if (find(v) == v) dgm.points.push_back({f[fo.order[oldest[v]]], dgm.ceiling, true});
  dgm.sort();
  return dgm;
}

}  // namespace vinedist
