#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vinedist/errors.hpp"

namespace vinedist {

/// One entry of a raw cell list, as read from complex JSON.
struct RawCell {
  std::size_t id = 0;
  int dim = 0;
  std::vector<std::size_t> boundary;
};

/// Combinatorial cell complex (simplicial or cubical) given by explicit
/// boundary lists. Cell ids are dense in [0, size()).
class CellComplex {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  CellComplex() = default;

  /// Validates and builds a complex. Throws Error on dangling faces, dimension
  /// mismatches, duplicate ids and boundaries whose boundary is nonzero mod 2.
  static CellComplex build(std::vector<RawCell> cells) {
    const std::size_t n = cells.size();
    CellComplex k;
    k.dims_.assign(n, -1);
    k.boundary_.assign(n, {});
    std::vector<bool> seen(n, false);
    for (auto& c : cells) {
      if (c.id >= n)
        throw Error(ErrorKind::InvalidArgument,
                    "cell id " + std::to_string(c.id) + " is outside [0, " + std::to_string(n) + ")");
      if (seen[c.id]) throw Error(ErrorKind::DuplicateCell, "cell id " + std::to_string(c.id) + " repeated");
      if (c.dim < 0) throw Error(ErrorKind::DimensionMismatch, "negative dimension on cell " + std::to_string(c.id));
      seen[c.id] = true;
      k.dims_[c.id] = c.dim;
      k.boundary_[c.id] = std::move(c.boundary);
    }
    for (std::size_t id = 0; id < n; ++id) {
      auto& bd = k.boundary_[id];
      const int d = k.dims_[id];
      if (d == 0 && !bd.empty())
        throw Error(ErrorKind::DimensionMismatch, "vertex " + std::to_string(id) + " has a nonempty boundary");
      if (d > 0 && bd.empty())
        throw Error(ErrorKind::InvalidBoundary, "cell " + std::to_string(id) + " of dim " + std::to_string(d) +
                                                    " has an empty boundary");
      for (std::size_t face : bd) {
        if (face >= n)
          throw Error(ErrorKind::DanglingFace,
                      "cell " + std::to_string(id) + " references missing face " + std::to_string(face));
        if (k.dims_[face] != d - 1)
          throw Error(ErrorKind::DimensionMismatch, "cell " + std::to_string(id) + " (dim " + std::to_string(d) +
                                                        ") has face " + std::to_string(face) + " of dim " +
                                                        std::to_string(k.dims_[face]));
      }
      std::sort(bd.begin(), bd.end());
      if (std::adjacent_find(bd.begin(), bd.end()) != bd.end())
        throw Error(ErrorKind::InvalidBoundary, "cell " + std::to_string(id) + " lists a face twice");
    }
    // The boundary of a boundary must vanish over Z/2.
    for (std::size_t id = 0; id < n; ++id) {
      if (k.dims_[id] < 2) continue;
      std::vector<std::size_t> acc;
      for (std::size_t face : k.boundary_[id])
        acc.insert(acc.end(), k.boundary_[face].begin(), k.boundary_[face].end());
      std::sort(acc.begin(), acc.end());
      for (std::size_t i = 0; i < acc.size();) {
        std::size_t j = i;
        while (j < acc.size() && acc[j] == acc[i]) ++j;
        if ((j - i) % 2 != 0)
          throw Error(ErrorKind::InvalidBoundary, "boundary of cell " + std::to_string(id) + " is not a cycle");
        i = j;
      }
    }
    k.index_vertices();
    return k;
  }

  std::size_t size() const noexcept { return dims_.size(); }
  int dim(std::size_t id) const { return dims_[id]; }
  std::span<const std::size_t> boundary(std::size_t id) const { return boundary_[id]; }

  /// Vertex indices (not cell ids) spanned by a cell, sorted.
  std::span<const std::size_t> vertices(std::size_t id) const { return vertices_[id]; }

  std::size_t vertex_count() const noexcept { return vertex_cells_.size(); }
  std::size_t vertex_cell(std::size_t vertex) const { return vertex_cells_[vertex]; }
  std::size_t vertex_index(std::size_t cell) const { return vertex_index_[cell]; }

  int max_dim() const noexcept { return max_dim_; }

  std::size_t count_of_dim(int d) const {
    return static_cast<std::size_t>(std::count(dims_.begin(), dims_.end(), d));
  }

  long euler_characteristic() const {
    long chi = 0;
    for (int d : dims_) chi += (d % 2 == 0) ? 1 : -1;
    return chi;
  }

 private:
  void index_vertices() {
    const std::size_t n = dims_.size();
    vertex_index_.assign(n, npos);
    vertex_cells_.clear();
    max_dim_ = -1;
    for (std::size_t id = 0; id < n; ++id) {
      max_dim_ = std::max(max_dim_, dims_[id]);
      if (dims_[id] == 0) {
        vertex_index_[id] = vertex_cells_.size();
        vertex_cells_.push_back(id);
      }
    }
    std::vector<std::size_t> by_dim(n);
    for (std::size_t i = 0; i < n; ++i) by_dim[i] = i;
    std::stable_sort(by_dim.begin(), by_dim.end(),
                     [&](std::size_t a, std::size_t b) { return dims_[a] < dims_[b]; });
    vertices_.assign(n, {});
    for (std::size_t id : by_dim) {
      if (dims_[id] == 0) {
        vertices_[id] = {vertex_index_[id]};
        continue;
      }
      std::vector<std::size_t> vs;
      for (std::size_t face : boundary_[id]) vs.insert(vs.end(), vertices_[face].begin(), vertices_[face].end());
      std::sort(vs.begin(), vs.end());
      vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
      vertices_[id] = std::move(vs);
    }
  }

  std::vector<int> dims_;
  std::vector<std::vector<std::size_t>> boundary_;
  std::vector<std::vector<std::size_t>> vertices_;
  std::vector<std::size_t> vertex_cells_;
  std::vector<std::size_t> vertex_index_;
  int max_dim_ = -1;
};

inline CellComplex build_complex(std::vector<RawCell> cells) { return CellComplex::build(std::move(cells)); }

/// Real value per cell. Remembers the vertex values it was induced from, if any,
/// so that filtering down can be re-derived at the vertex level.
class FilterFunction {
 public:
  FilterFunction() = default;
  explicit FilterFunction(std::vector<double> values, std::optional<std::vector<double>> vertex_values = std::nullopt)
      : values_(std::move(values)), vertex_values_(std::move(vertex_values)) {}

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t id) const { return values_[id]; }
  std::span<const double> values() const noexcept { return values_; }

  bool is_vertex_based() const noexcept { return vertex_values_.has_value(); }
  std::span<const double> vertex_values() const {
    if (!vertex_values_) throw Error(ErrorKind::NotVertexBased, "filter function was not induced from vertex values");
    return *vertex_values_;
  }

  double max_value() const {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
  }
  double min_value() const {
    return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
  }

 private:
  std::vector<double> values_;
  std::optional<std::vector<double>> vertex_values_;
};

inline bool is_monotone(const CellComplex& k, const FilterFunction& f) {
  if (f.size() != k.size()) return false;
  for (std::size_t id = 0; id < k.size(); ++id)
    for (std::size_t face : k.boundary(id))
      if (f[face] > f[id]) return false;
  return true;
}

inline void validate_monotone(const CellComplex& k, const FilterFunction& f) {
  if (f.size() != k.size())
    throw Error(ErrorKind::ComplexMismatch, "filter has " + std::to_string(f.size()) + " values for " +
                                                std::to_string(k.size()) + " cells");
  for (std::size_t id = 0; id < k.size(); ++id)
    for (std::size_t face : k.boundary(id))
      if (f[face] > f[id])
        throw Error(ErrorKind::NonMonotoneFunction,
                    "face " + std::to_string(face) + " has a larger value than coface " + std::to_string(id));
}

/// Wraps arbitrary per-cell values after checking monotonicity.
inline FilterFunction make_filter(const CellComplex& k, std::vector<double> values) {
  FilterFunction f(std::move(values));
  validate_monotone(k, f);
  return f;
}

/// Lower-star extension: each cell takes the max over its vertices.
inline FilterFunction lower_star(const CellComplex& k, std::span<const double> vertex_values) {
  if (vertex_values.size() != k.vertex_count())
    throw Error(ErrorKind::MissingVertexValue, "expected " + std::to_string(k.vertex_count()) +
                                                   " vertex values, got " + std::to_string(vertex_values.size()));
  std::vector<double> values(k.size());
  for (std::size_t id = 0; id < k.size(); ++id) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t v : k.vertices(id)) m = std::max(m, vertex_values[v]);
    values[id] = m;
  }
  return FilterFunction(std::move(values), std::vector<double>(vertex_values.begin(), vertex_values.end()));
}

/// Filters down on a vertex-based function: vertex values become offset - v and
/// the cell values are re-derived with lower_star. Negating cell values
/// directly would reverse the face inequalities, so non-vertex input is refused.
inline FilterFunction filter_down(const CellComplex& k, const FilterFunction& f, double offset = 0.0) {
  auto vv = f.vertex_values();
  std::vector<double> flipped(vv.size());
  std::transform(vv.begin(), vv.end(), flipped.begin(), [offset](double v) { return offset - v; });
  return lower_star(k, flipped);
}

struct FilteredComplex {
  CellComplex complex;
  FilterFunction filter;
};

using DistanceMatrix = std::vector<std::vector<double>>;

/// Vietoris-Rips complex up to max_dim with diameter filtration, restricted to
/// simplices of diameter <= max_scale.
inline FilteredComplex vietoris_rips(const DistanceMatrix& d, int max_dim, double max_scale) {
  const std::size_t n = d.size();
  if (max_dim < 0) throw Error(ErrorKind::InvalidArgument, "max_dim must be nonnegative");
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i].size() != n) throw Error(ErrorKind::AsymmetricMatrix, "distance matrix is not square");
    if (d[i][i] != 0.0) throw Error(ErrorKind::InvalidArgument, "distance matrix diagonal must be zero");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (d[i][j] < 0.0 || std::isnan(d[i][j]))
        throw Error(ErrorKind::NegativeDistance, "negative distance at (" + std::to_string(i) + ", " +
                                                     std::to_string(j) + ")");
      if (d[i][j] != d[j][i])
        throw Error(ErrorKind::AsymmetricMatrix, "d(" + std::to_string(i) + ", " + std::to_string(j) +
                                                     ") != d(" + std::to_string(j) + ", " + std::to_string(i) + ")");
    }

  std::vector<std::vector<std::size_t>> upper(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d[i][j] <= max_scale) upper[i].push_back(j);

  // Simplices grouped by dimension, each as a sorted vertex list.
  std::vector<std::vector<std::vector<std::size_t>>> by_dim(static_cast<std::size_t>(max_dim) + 1);
  std::function<void(std::vector<std::size_t>&, std::vector<std::size_t>)> expand =
      [&](std::vector<std::size_t>& simplex, std::vector<std::size_t> candidates) {
        by_dim[simplex.size() - 1].push_back(simplex);
        if (static_cast<int>(simplex.size()) > max_dim) return;
        for (std::size_t v : candidates) {
          std::vector<std::size_t> next;
          std::set_intersection(candidates.begin(), candidates.end(), upper[v].begin(), upper[v].end(),
                                std::back_inserter(next));
          simplex.push_back(v);
          expand(simplex, std::move(next));
          simplex.pop_back();
        }
      };
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> s{v};
    expand(s, upper[v]);
  }

  std::map<std::vector<std::size_t>, std::size_t> ids;
  std::vector<RawCell> cells;
  std::vector<double> values;
  for (auto& level : by_dim) {
    std::sort(level.begin(), level.end());
    for (const auto& s : level) {
      RawCell c;
      c.id = cells.size();
      c.dim = static_cast<int>(s.size()) - 1;
      if (s.size() > 1) {
        for (std::size_t skip = 0; skip < s.size(); ++skip) {
          std::vector<std::size_t> face;
          for (std::size_t i = 0; i < s.size(); ++i)
            if (i != skip) face.push_back(s[i]);
          c.boundary.push_back(ids.at(face));
        }
      }
      double diam = 0.0;
      for (std::size_t a = 0; a < s.size(); ++a)
        for (std::size_t b = a + 1; b < s.size(); ++b) diam = std::max(diam, d[s[a]][s[b]]);
      ids.emplace(s, c.id);
      values.push_back(diam);
      cells.push_back(std::move(c));
    }
  }
  CellComplex k = CellComplex::build(std::move(cells));
  FilterFunction f(std::move(values));
  return {std::move(k), std::move(f)};
}

/// Row-major 2-D array of pixel values.
struct ImageGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;

  double at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return pixels[r * cols + c]; }
};

/// Cubical complex with one vertex per pixel, edges between 4-neighbours and a
/// square per 2x2 block. Vertex ids are r * cols + c. Filter is lower_star of
/// the pixel values.
inline FilteredComplex cubical_from_image(const ImageGrid& grid) {
  if (grid.rows == 0 || grid.cols == 0 || grid.pixels.size() != grid.rows * grid.cols)
    throw Error(ErrorKind::EmptyGrid, "image grid is empty or not rectangular");
  const std::size_t m = grid.rows, n = grid.cols;
  std::vector<RawCell> cells;
  cells.reserve(m * n + m * (n - 1) + n * (m - 1) + (m - 1) * (n - 1));
  for (std::size_t i = 0; i < m * n; ++i) cells.push_back({i, 0, {}});
  auto vid = [n](std::size_t r, std::size_t c) { return r * n + c; };
  std::vector<std::size_t> horizontal(m * n, 0), vertical(m * n, 0);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c + 1 < n; ++c) {
      horizontal[vid(r, c)] = cells.size();
      cells.push_back({cells.size(), 1, {vid(r, c), vid(r, c + 1)}});
    }
  for (std::size_t r = 0; r + 1 < m; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      vertical[vid(r, c)] = cells.size();
      cells.push_back({cells.size(), 1, {vid(r, c), vid(r + 1, c)}});
    }
  for (std::size_t r = 0; r + 1 < m; ++r)
    for (std::size_t c = 0; c + 1 < n; ++c)
      cells.push_back({cells.size(),
                       2,
                       {horizontal[vid(r, c)], horizontal[vid(r + 1, c)], vertical[vid(r, c)], vertical[vid(r, c + 1)]}});
  CellComplex k = CellComplex::build(std::move(cells));
  FilterFunction f = lower_star(k, grid.pixels);
  return {std::move(k), std::move(f)};
}

enum class HomotopyMode { SimplexLevel, VertexLevel };

/// Continuous family of filter functions on a fixed complex, evaluated on demand.
/// The optional time map precomposes the parameter (used for reparameterization).
class Homotopy {
 public:
  Homotopy(std::shared_ptr<const CellComplex> complex, FilterFunction start, FilterFunction end, HomotopyMode mode,
           std::function<double(double)> time_map = {})
      : complex_(std::move(complex)),
        start_(std::move(start)),
        end_(std::move(end)),
        mode_(mode),
        time_map_(std::move(time_map)) {}

  FilterFunction at(double t) const {
    double s = time_map_ ? time_map_(t) : t;
    s = std::clamp(s, 0.0, 1.0);
    if (s == 0.0) return start_;
    if (s == 1.0) return end_;
    if (mode_ == HomotopyMode::SimplexLevel) {
      std::vector<double> v(start_.size());
      // Clamped so rounding never leaves the endpoint range (keeps common ceilings valid).
      for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = std::clamp((1.0 - s) * start_[i] + s * end_[i], std::min(start_[i], end_[i]),
                          std::max(start_[i], end_[i]));
      return FilterFunction(std::move(v));
    }
    auto a = start_.vertex_values();
    auto b = end_.vertex_values();
    std::vector<double> v(a.size());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::clamp((1.0 - s) * a[i] + s * b[i], std::min(a[i], b[i]), std::max(a[i], b[i]));
    return lower_star(*complex_, v);
  }

  Homotopy reparameterized(std::function<double(double)> phi) const {
    std::function<double(double)> composed = phi;
    if (time_map_) composed = [inner = time_map_, phi](double t) { return inner(phi(t)); };
    return Homotopy(complex_, start_, end_, mode_, std::move(composed));
  }

  const CellComplex& complex() const { return *complex_; }
  const std::shared_ptr<const CellComplex>& complex_ptr() const { return complex_; }
  const FilterFunction& start() const { return start_; }
  const FilterFunction& end() const { return end_; }
  HomotopyMode mode() const { return mode_; }

  /// Upper bound on every value taken along the homotopy; both modes interpolate
  /// convexly, so the endpoint maximum suffices.
  double value_ceiling() const { return std::max(start_.max_value(), end_.max_value()); }
  double value_floor() const { return std::min(start_.min_value(), end_.min_value()); }

 private:
  std::shared_ptr<const CellComplex> complex_;
  FilterFunction start_;
  FilterFunction end_;
  HomotopyMode mode_;
  std::function<double(double)> time_map_;
};

inline Homotopy straight_line_homotopy(std::shared_ptr<const CellComplex> complex, const FilterFunction& f,
                                       const FilterFunction& g, HomotopyMode mode = HomotopyMode::SimplexLevel) {
  if (!complex) throw Error(ErrorKind::InvalidArgument, "homotopy needs a complex");
  if (f.size() != complex->size() || g.size() != complex->size())
    throw Error(ErrorKind::ComplexMismatch, "endpoint functions do not live on the given complex");
  validate_monotone(*complex, f);
  validate_monotone(*complex, g);
  if (mode == HomotopyMode::VertexLevel) {
    if (!f.is_vertex_based() || !g.is_vertex_based())
      throw Error(ErrorKind::NotVertexBased, "vertex-level homotopy needs vertex-induced endpoints");
  }
  return Homotopy(std::move(complex), f, g, mode);
}

}  // namespace vinedist
