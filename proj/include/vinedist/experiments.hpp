#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "vinedist/bounds.hpp"
#include "vinedist/complex.hpp"
#include "vinedist/errors.hpp"
#include "vinedist/geodesics.hpp"
#include "vinedist/io.hpp"
#include "vinedist/mds.hpp"
#include "vinedist/persistence.hpp"
#include "vinedist/vineyard.hpp"
#include "vinedist/wasserstein.hpp"

namespace vinedist {

// ---------------------------------------------------------------------------
// Pairwise matrices

/// Fills a symmetric matrix with zero diagonal from fn(i, j), i < j, using a
/// pool of worker threads. fn must be safe to call concurrently.
template <class Fn>
std::vector<std::vector<double>> pairwise_matrix(std::size_t n, Fn&& fn, unsigned threads = 0) {
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  std::vector<std::pair<std::size_t, std::size_t>> jobs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) jobs.emplace_back(i, j);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        const auto [i, j] = jobs[k];
        m[i][j] = m[j][i] = fn(i, j);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return m;
}

enum class DistanceKind { L1, W1, Vineyard };

inline DistanceKind distance_kind_from_name(const std::string& s) {
  if (s == "l1") return DistanceKind::L1;
  if (s == "w1") return DistanceKind::W1;
  if (s == "vineyard") return DistanceKind::Vineyard;
  throw Error(ErrorKind::InvalidArgument, "unknown distance '" + s + "' (expected l1, w1 or vineyard)");
}

struct MatrixOptions {
  int dim = 0;
  Weighting weighting = Weighting::uniform();
  VineyardOptions vineyard;
  HomotopyMode mode = HomotopyMode::SimplexLevel;
  unsigned threads = 0;
};

/// Sum of |f - g| over vertices when both are vertex-induced, else over cells.
inline double l1_distance(const CellComplex& k, const FilterFunction& f, const FilterFunction& g) {
  double s = 0.0;
  if (f.is_vertex_based() && g.is_vertex_based()) {
    auto a = f.vertex_values(), b = g.vertex_values();
    for (std::size_t v = 0; v < k.vertex_count(); ++v) s += std::abs(a[v] - b[v]);
    return s;
  }
  for (std::size_t id = 0; id < k.size(); ++id) s += std::abs(f[id] - g[id]);
  return s;
}

/// Straight-line vineyard distance between f and g with a common ceiling.
inline double straight_line_vineyard_distance(const std::shared_ptr<const CellComplex>& k, const FilterFunction& f,
                                              const FilterFunction& g, int dim, const Weighting& w,
                                              VineyardOptions opt = {},
                                              HomotopyMode mode = HomotopyMode::SimplexLevel) {
  const Homotopy h = straight_line_homotopy(k, f, g, mode);
  return vineyard_distance(build_vineyard(h, dim, w, opt), w);
}

/// Pairwise distances between filter functions on one complex. Diagrams for
/// W1 share the ceiling of the whole input set.
inline std::vector<std::vector<double>> distance_matrix(const std::shared_ptr<const CellComplex>& k,
                                                        const std::vector<FilterFunction>& inputs,
                                                        DistanceKind kind, const MatrixOptions& opt = {}) {
  if (inputs.size() < 2) throw Error(ErrorKind::InvalidArgument, "distance matrix needs at least two inputs");
  for (std::size_t i = 0; i < inputs.size(); ++i)
    if (inputs[i].size() != k->size())
      throw Error(ErrorKind::DomainMismatch, "input " + std::to_string(i) + " has " +
                                                 std::to_string(inputs[i].size()) + " values for a complex of " +
                                                 std::to_string(k->size()) + " cells");
  switch (kind) {
    case DistanceKind::L1:
      return pairwise_matrix(
          inputs.size(), [&](std::size_t i, std::size_t j) { return l1_distance(*k, inputs[i], inputs[j]); },
          opt.threads);
    case DistanceKind::W1: {
      double ceiling = inputs.front().max_value();
      for (const auto& f : inputs) ceiling = std::max(ceiling, f.max_value());
      std::vector<PersistenceDiagram> dgms;
      for (const auto& f : inputs) dgms.push_back(compute_diagram(*k, f, opt.dim, ceiling));
      return pairwise_matrix(
          inputs.size(),
          [&](std::size_t i, std::size_t j) {
            return wasserstein(dgms[i], dgms[j], 1.0, 1.0, opt.vineyard.include_essential).distance;
          },
          opt.threads);
    }
    case DistanceKind::Vineyard:
      return pairwise_matrix(
          inputs.size(),
          [&](std::size_t i, std::size_t j) {
            return straight_line_vineyard_distance(k, inputs[i], inputs[j], opt.dim, opt.weighting, opt.vineyard,
                                                   opt.mode);
          },
          opt.threads);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Gaussian experiment: negated Gaussian densities on a path graph, H0.

struct GaussianRow {
  std::string sweep;  // "mean" or "variance"
  double shift = 0.0;  // mean offset, or standard deviation for the variance sweep
  double l1 = 0.0;
  double w1 = 0.0;
  double vineyard = 0.0;
};

struct GaussianOptions {
  std::size_t grid_size = 161;  // odd, so x = 0 is a grid point
  double half_width = 8.0;
  double max_mean_shift = 3.0;
  std::size_t mean_steps = 10;
  double max_sigma = 3.0;
  std::size_t variance_steps = 10;
  VineyardOptions vineyard;
  // Vertex-level keeps the interpolants lower-star; simplex-level adds a local
  // minimum at every vertex between the two wells.
  HomotopyMode mode = HomotopyMode::VertexLevel;
};

inline std::shared_ptr<const CellComplex> path_graph(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return std::make_shared<const CellComplex>(io::graph_complex(n, edges));
}

inline std::vector<GaussianRow> gaussian_experiment(const GaussianOptions& opt = {}) {
  if (opt.grid_size < 16) throw Error(ErrorKind::InvalidArgument, "grid_size must be at least 16");
  const std::size_t n = opt.grid_size | 1u;
  const auto k = path_graph(n);
  const double c = static_cast<double>(n / 2);
  const double dx = opt.half_width / c;
  const double peak = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  // Samples on integer offsets from the centre so shifted minima land exactly.
  auto sample = [&](auto&& density) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = -density(static_cast<double>(i) - c);
    return lower_star(*k, v);
  };
  const FilterFunction f = sample([&](double u) { return peak * std::exp(-0.5 * u * dx * u * dx); });

  auto row = [&](std::string sweep, double shift, const FilterFunction& g) {
    GaussianRow r;
    r.sweep = std::move(sweep);
    r.shift = shift;
    auto a = f.vertex_values(), b = g.vertex_values();
    for (std::size_t i = 0; i < n; ++i) r.l1 += std::abs(a[i] - b[i]) * dx;
    const double ceiling = std::max(f.max_value(), g.max_value());
    r.w1 = wasserstein(compute_diagram(*k, f, 0, ceiling), compute_diagram(*k, g, 0, ceiling), 1.0, 1.0).distance;
    r.vineyard = straight_line_vineyard_distance(k, f, g, 0, Weighting::uniform(), opt.vineyard, opt.mode);
    return r;
  };

  std::vector<GaussianRow> rows;
  for (std::size_t s = 0; s < opt.mean_steps; ++s) {
    const double target = opt.mean_steps == 1 ? 0.0 : opt.max_mean_shift * double(s) / double(opt.mean_steps - 1);
    const double steps = std::round(target / dx);
    const FilterFunction g =
        sample([&](double u) { return peak * std::exp(-0.5 * (u - steps) * dx * (u - steps) * dx); });
    rows.push_back(row("mean", steps * dx, g));
  }
  for (std::size_t s = 0; s < opt.variance_steps; ++s) {
    const double sigma =
        opt.variance_steps == 1 ? 1.0 : 1.0 + (opt.max_sigma - 1.0) * double(s) / double(opt.variance_steps - 1);
    // Rescaled so the minimum stays at -peak.
    const FilterFunction g = sample([&](double u) { return peak * std::exp(-0.5 * u * dx * u * dx / (sigma * sigma)); });
    rows.push_back(row("variance", sigma, g));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Synthetic digits: antialiased strokes on a square canvas. A "6" is a ring in
// the lower left with a stroke rising to the upper right; a "9" is an
// independently jittered 6 turned through 180 degrees; a "7" is a top bar with
// a descending stroke and no ring. Intensities lie in [0, 255].

struct DigitParams {
  double ring_radius = 0.21;   // fraction of the canvas
  double half_width = 0.85;    // pixels
  double jitter_shift = 1.5;   // pixels
  double jitter_radius = 0.12; // relative
  double jitter_width = 0.2;   // pixels
};

namespace detail {

struct Vec2 {
  double x, y;
};

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - a.x - t * vx, p.y - a.y - t * vy);
}

inline double ink(double dist, double half_width) { return 255.0 * std::clamp(half_width + 0.5 - dist, 0.0, 1.0); }

}  // namespace detail

inline ImageGrid synthetic_digit(int digit, std::size_t size, std::mt19937_64& rng, const DigitParams& p = {}) {
  using detail::Vec2;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s = static_cast<double>(size);
  const double dx = p.jitter_shift * u(rng), dy = p.jitter_shift * u(rng);
  const double hw = p.half_width + p.jitter_width * u(rng);
  const double r = p.ring_radius * s * (1.0 + p.jitter_radius * u(rng));
  const double tail_x = p.jitter_shift * u(rng), tail_y = p.jitter_shift * u(rng);

  std::vector<std::pair<Vec2, Vec2>> segments;
  std::optional<std::pair<Vec2, double>> ring;
  if (digit == 6 || digit == 9) {
    const Vec2 centre{0.42 * s + dx, 0.64 * s + dy};
    ring = {centre, r};
    segments.push_back({{centre.x - r * 0.95, centre.y - r * 0.3}, {0.62 * s + tail_x, 0.1 * s + tail_y}});
  } else if (digit == 7) {
    const Vec2 left{0.25 * s + dx, 0.2 * s + dy}, corner{0.75 * s + dx, 0.2 * s + dy};
    segments.push_back({left, corner});
    segments.push_back({corner, {0.42 * s + tail_x, 0.85 * s + tail_y}});
  } else {
    throw Error(ErrorKind::InvalidArgument, "synthetic digits are 6, 7 and 9");
  }

  ImageGrid g{size, size, std::vector<double>(size * size, 0.0)};
  for (std::size_t row = 0; row < size; ++row)
    for (std::size_t col = 0; col < size; ++col) {
      // A 9 is the 6 drawn on a canvas turned through 180 degrees.
      const bool turn = digit == 9;
      const Vec2 q{turn ? s - 1.0 - double(col) : double(col), turn ? s - 1.0 - double(row) : double(row)};
      double best = 0.0;
      if (ring) best = detail::ink(std::abs(std::hypot(q.x - ring->first.x, q.y - ring->first.y) - ring->second), hw);
      for (const auto& [a, b] : segments) best = std::max(best, detail::ink(detail::segment_distance(q, a, b), hw));
      g.at(row, col) = best;
    }
  return g;
}

/// Image intensities to a filter on the shared cubical complex: invert
/// (256 - I) and filter down, so bright strokes enter first and holes last.
inline FilterFunction image_filter(const CellComplex& k, const ImageGrid& img) {
  return filter_down(k, lower_star(k, img.pixels), 256.0);
}

struct DigitsOptions {
  std::size_t per_class = 30;
  std::size_t image_size = 16;
  std::uint64_t seed = 7;
  DigitParams params;
  VineyardOptions vineyard;
  HomotopyMode mode = HomotopyMode::VertexLevel;
  unsigned threads = 0;
};

struct DigitsResult {
  std::vector<int> labels;
  std::vector<ImageGrid> images;
  std::map<std::string, std::vector<std::vector<double>>> matrices;  // "l1", "w1", "vineyard"
  std::map<std::string, double> accuracy;                             // leave-one-out 1-NN, 3 classes
  std::map<std::string, double> six_nine_accuracy;                    // 1-NN restricted to 6s and 9s
  std::map<std::string, Embedding> embeddings;
};

/// Leave-one-out 1-NN accuracy over the items whose label passes keep.
template <class Keep>
double nearest_neighbour_accuracy(const std::vector<std::vector<double>>& d, const std::vector<int>& labels,
                                  Keep keep) {
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!keep(labels[i])) continue;
    std::size_t best = d.size();
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (j == i || !keep(labels[j])) continue;
      if (best == d.size() || d[i][j] < d[i][best]) best = j;
    }
    if (best == d.size()) continue;
    ++total;
    if (labels[best] == labels[i]) ++correct;
  }
  return total == 0 ? 0.0 : double(correct) / double(total);
}

inline double nearest_neighbour_accuracy(const std::vector<std::vector<double>>& d, const std::vector<int>& labels) {
  return nearest_neighbour_accuracy(d, labels, [](int) { return true; });
}

inline DigitsResult digits_experiment(const DigitsOptions& opt = {}) {
  if (opt.per_class < 5) throw Error(ErrorKind::InvalidArgument, "need at least 5 images per class");
  DigitsResult res;
  std::mt19937_64 rng(opt.seed);
  for (int digit : {6, 7, 9})
    for (std::size_t i = 0; i < opt.per_class; ++i) {
      res.labels.push_back(digit);
      res.images.push_back(synthetic_digit(digit, opt.image_size, rng, opt.params));
    }
  ImageGrid blank{opt.image_size, opt.image_size, std::vector<double>(opt.image_size * opt.image_size, 0.0)};
  const auto k = std::make_shared<const CellComplex>(cubical_from_image(blank).complex);
  std::vector<FilterFunction> fs;
  for (const auto& img : res.images) fs.push_back(image_filter(*k, img));

  MatrixOptions mo;
  mo.dim = 1;
  mo.vineyard = opt.vineyard;
  mo.mode = opt.mode;
  mo.threads = opt.threads;
  res.matrices["l1"] = distance_matrix(k, fs, DistanceKind::L1, mo);
  res.matrices["w1"] = distance_matrix(k, fs, DistanceKind::W1, mo);
  res.matrices["vineyard"] = distance_matrix(k, fs, DistanceKind::Vineyard, mo);
  for (const auto& [name, m] : res.matrices) {
    res.accuracy[name] = nearest_neighbour_accuracy(m, res.labels);
    res.six_nine_accuracy[name] = nearest_neighbour_accuracy(m, res.labels, [](int l) { return l != 7; });
    res.embeddings[name] = classical_mds(m);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Dual-graph comparison

struct DistanceTriple {
  double l1 = 0.0;        // mean |f - g| over vertices
  double w1 = 0.0;        // W_{1,1} of the H0 diagrams
  double vineyard = 0.0;  // standard-weighted straight-line vineyard distance
};

struct GeoCompareResult {
  DistanceTriple distances;
  PersistenceDiagram dgm_f, dgm_g;
  Vineyard vineyard;
  double mvc = 0.0;
};

inline GeoCompareResult geo_compare(const io::DualGraphDataset& ds, const std::string& col_f, const std::string& col_g,
                                    bool one_minus = false, VineyardOptions opt = {},
                                    HomotopyMode mode = HomotopyMode::VertexLevel) {
  auto values = [&](const std::string& name) {
    std::vector<double> v = ds.column(name);
    if (one_minus)
      for (double& x : v) x = 1.0 - x;
    return v;
  };
  const auto k = std::make_shared<const CellComplex>(ds.graph);
  const std::vector<double> fv = values(col_f), gv = values(col_g);
  const FilterFunction f = lower_star(*k, fv), g = lower_star(*k, gv);
  GeoCompareResult r;
  for (std::size_t v = 0; v < fv.size(); ++v) r.distances.l1 += std::abs(fv[v] - gv[v]);
  if (!fv.empty()) r.distances.l1 /= static_cast<double>(fv.size());
  const Homotopy h = straight_line_homotopy(k, f, g, mode);
  const double ceiling = opt.ceiling.value_or(h.value_ceiling());
  opt.ceiling = ceiling;
  r.dgm_f = compute_diagram(*k, f, 0, ceiling);
  r.dgm_g = compute_diagram(*k, g, 0, ceiling);
  r.distances.w1 = wasserstein(r.dgm_f, r.dgm_g, 1.0, 1.0, opt.include_essential).distance;
  const Weighting w = Weighting::standard();
  r.vineyard = build_vineyard(h, 0, w, opt);
  r.distances.vineyard = vineyard_distance(r.vineyard, w);
  r.mvc = mvc(r.dgm_f, r.dgm_g, w, opt.include_essential).distance;
  return r;
}

/// Grid-shaped dual graph with two bump columns. "separated" places the bumps
/// in opposite corners; otherwise both sit at the same spot. Bump heights
/// differ by the same amount in both layouts.
inline io::DualGraphDataset synthetic_city(bool separated, std::size_t side = 12, double peak_a = 0.8,
                                           double peak_b = 0.7) {
  io::DualGraphDataset ds;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  auto id = [side](std::size_t r, std::size_t c) { return r * side + c; };
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      if (c + 1 < side) edges.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < side) edges.emplace_back(id(r, c), id(r + 1, c));
    }
  ds.graph = io::graph_complex(side * side, edges);
  const double s = static_cast<double>(side);
  auto bump = [&](double cr, double cc, double peak) {
    std::vector<double> v(side * side);
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c) {
        const double d2 = (double(r) - cr) * (double(r) - cr) + (double(c) - cc) * (double(c) - cc);
        v[id(r, c)] = peak * std::exp(-d2 / (2.0 * 0.02 * s * s));
      }
    return v;
  };
  ds.columns["group_a"] = bump(0.25 * s, 0.25 * s, peak_a);
  ds.columns["group_b"] = separated ? bump(0.75 * s, 0.75 * s, peak_b) : bump(0.25 * s, 0.25 * s, peak_b);
  return ds;
}

// ---------------------------------------------------------------------------
// Diagram sequences

struct SequenceSummary {
  double distance = 0.0;
  Vineyard vineyard;
};

inline SequenceSummary diagram_sequence_summary(std::vector<PersistenceDiagram> diagrams, const Weighting& w,
                                                bool include_essential = true) {
  SequenceSummary s;
  s.vineyard = vineyard_from_diagrams(std::move(diagrams), w, include_essential);
  s.distance = vineyard_distance(s.vineyard, w);
  return s;
}

inline SequenceSummary diagram_sequence_summary(const std::vector<std::string>& files, const Weighting& w,
                                                int dim = -1, bool include_essential = true) {
  if (files.size() < 2) throw Error(ErrorKind::EmptySequence, "need at least two diagram files");
  std::vector<PersistenceDiagram> diagrams;
  for (const auto& f : files) diagrams.push_back(io::read_diagram(f, dim));
  return diagram_sequence_summary(std::move(diagrams), w, include_essential);
}

}  // namespace vinedist
