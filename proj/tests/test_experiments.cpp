#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vinedist/experiments.hpp"

using namespace vinedist;

TEST(Gaussian, ZeroShiftAndEqualMinimum) {
  GaussianOptions opt;
  opt.grid_size = 81;
  opt.mean_steps = 5;
  opt.variance_steps = 5;
  auto rows = gaussian_experiment(opt);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0].l1, 0.0);
  EXPECT_EQ(rows[0].w1, 0.0);
  EXPECT_EQ(rows[0].vineyard, 0.0);
  for (const auto& r : rows) EXPECT_LE(r.w1, 1e-6);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_GT(rows[i].vineyard, rows[i - 1].vineyard);
  GaussianOptions even;
  even.grid_size = 8;
  EXPECT_THROW(gaussian_experiment(even), Error);
}

TEST(Gaussian, VineBornAndDiesMidway) {
  // For a wide mean shift the interpolant has two wells for a while.
  const std::size_t n = 81;
  const auto k = path_graph(n);
  std::vector<double> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (double(i) - 40.0) / 5.0;
    a[i] = -std::exp(-0.5 * x * x);
    b[i] = -std::exp(-0.5 * (x - 4.0) * (x - 4.0));
  }
  auto h = straight_line_homotopy(k, lower_star(*k, a), lower_star(*k, b), HomotopyMode::VertexLevel);
  auto vy = build_vineyard(h, 0, Weighting::uniform());
  bool interior = false;
  for (const auto& v : vy.vines)
    if (v.cls == VineClass::BothOnDiagonal && v.start_time() > 0 && v.end_time() < 1) interior = true;
  EXPECT_TRUE(interior);
  const double ceiling = h.value_ceiling();
  auto p = compute_diagram(*k, h.start(), 0, ceiling), q = compute_diagram(*k, h.end(), 0, ceiling);
  EXPECT_GT(vineyard_distance(vy, Weighting::uniform()), wasserstein(p, q, kInfinity, 1).distance + 1e-3);
}

TEST(Digits, GeneratorShapes) {
  std::mt19937_64 rng(1);
  for (int d : {6, 7, 9}) {
    auto img = synthetic_digit(d, 16, rng);
    auto fc = cubical_from_image(img);
    auto dgm = compute_diagram(fc.complex, filter_down(fc.complex, fc.filter, 256.0), 1);
    double best = 0;
    for (const auto& p : dgm.points) best = std::max(best, p.death - p.birth);
    if (d == 7)
      EXPECT_LT(best, 50.0);
    else
      EXPECT_GT(best, 150.0);
  }
  EXPECT_THROW(synthetic_digit(3, 16, rng), Error);
}

TEST(Digits, IdenticalImagesHaveZeroDistance) {
  std::mt19937_64 rng(2);
  auto img = synthetic_digit(6, 12, rng);
  auto k = std::make_shared<const CellComplex>(cubical_from_image(img).complex);
  std::vector<FilterFunction> fs{image_filter(*k, img), image_filter(*k, img)};
  MatrixOptions mo;
  mo.dim = 1;
  mo.mode = HomotopyMode::VertexLevel;
  for (auto kind : {DistanceKind::L1, DistanceKind::W1, DistanceKind::Vineyard}) {
    auto m = distance_matrix(k, fs, kind, mo);
    EXPECT_EQ(m[0][1], 0.0);
    EXPECT_EQ(m[1][0], 0.0);
  }
}

TEST(Digits, SmallRunSeparatesClasses) {
  DigitsOptions opt;
  opt.per_class = 6;
  opt.image_size = 14;
  auto res = digits_experiment(opt);
  EXPECT_EQ(res.labels.size(), 18u);
  EXPECT_GE(res.accuracy["vineyard"], res.accuracy["w1"]);
  for (const auto& [name, m] : res.matrices)
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j) EXPECT_EQ(m[i][j], m[j][i]);
}

TEST(NearestNeighbour, Accuracy) {
  std::vector<std::vector<double>> d{{0, 1, 5, 5}, {1, 0, 5, 5}, {5, 5, 0, 1}, {5, 5, 1, 0}};
  EXPECT_EQ(nearest_neighbour_accuracy(d, {1, 1, 2, 2}), 1.0);
  EXPECT_EQ(nearest_neighbour_accuracy(d, {1, 2, 1, 2}), 0.0);
}

TEST(Mds, RecoversPlanarConfiguration) {
  const std::vector<std::array<double, 2>> pts{{0, 0}, {3, 0}, {0, 4}, {1, 1}, {2, 5}};
  std::vector<std::vector<double>> d(pts.size(), std::vector<double>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      d[i][j] = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
  auto e = classical_mds(d);
  EXPECT_LT(e.stress, 1e-9);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      EXPECT_NEAR((e.coords.row(Eigen::Index(i)) - e.coords.row(Eigen::Index(j))).norm(), d[i][j], 1e-9);
}

TEST(DistanceMatrix, DomainMismatchAndSymmetry) {
  auto k = path_graph(5);
  std::vector<double> a{0, 1, 2, 3, 4};
  std::vector<FilterFunction> fs{lower_star(*k, a), FilterFunction({1, 2})};
  EXPECT_THROW(distance_matrix(k, fs, DistanceKind::L1), Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<FilterFunction> many;
  for (int i = 0; i < 5; ++i) {
    std::vector<double> v(5);
    for (double& x : v) x = u(rng);
    many.push_back(lower_star(*k, v));
  }
  MatrixOptions mo;
  auto vm = distance_matrix(k, many, DistanceKind::Vineyard, mo);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(vm[i][i], 0.0);
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_NEAR(vm[i][j], vm[j][i], 1e-9);
      if (i == j) continue;
      const double c = std::max(many[i].max_value(), many[j].max_value());
      const double w = wasserstein(compute_diagram(*k, many[i], 0, c), compute_diagram(*k, many[j], 0, c),
                                   kInfinity, 1)
                           .distance;
      EXPECT_GE(vm[i][j], w - 1e-6);
    }
  }
  auto dup = distance_matrix(k, {many[0], many[0]}, DistanceKind::W1, mo);
  EXPECT_EQ(dup[0][1], 0.0);
}

TEST(Geo, IdenticalColumns) {
  auto ds = synthetic_city(true, 8);
  auto r = geo_compare(ds, "group_a", "group_a", true);
  EXPECT_EQ(r.distances.l1, 0.0);
  EXPECT_EQ(r.distances.w1, 0.0);
  EXPECT_EQ(r.distances.vineyard, 0.0);
}

TEST(Geo, SingleVertexDifference) {
  io::DualGraphDataset ds;
  ds.graph = io::graph_complex(4, {{0, 1}, {1, 2}, {2, 3}});
  ds.columns["f"] = {0.1, 0.5, 0.2, 0.9};
  ds.columns["g"] = {0.1, 0.5, 0.5, 0.9};
  EXPECT_NEAR(geo_compare(ds, "f", "g").distances.l1, 0.3 / 4, 1e-15);
  EXPECT_THROW(geo_compare(ds, "f", "nope"), Error);
}

TEST(Geo, SeparatedVersusColocatedBumps) {
  auto mil = geo_compare(synthetic_city(true), "group_a", "group_b", true);
  auto lex = geo_compare(synthetic_city(false), "group_a", "group_b", true);
  EXPECT_NEAR(mil.distances.w1, lex.distances.w1, 0.2 * std::max(mil.distances.w1, lex.distances.w1));
  EXPECT_GE(mil.distances.vineyard, 3.0 * lex.distances.vineyard);
  EXPECT_LE(mil.mvc, mil.distances.vineyard + 1e-9);
  EXPECT_LE(lex.mvc, lex.distances.vineyard + 1e-9);
}

TEST(Sequence, RepeatedDiagramsAndOrder) {
  PersistenceDiagram a, b, c;
  a.dim = b.dim = c.dim = 1;
  a.points = {{0, 3, false}};
  b.points = {{0, 3, false}, {4, 6, false}};
  c.points = {{1, 8, false}};
  const Weighting w = Weighting::standard();
  EXPECT_EQ(diagram_sequence_summary({a, a, a}, w).distance, 0.0);
  const double fwd = diagram_sequence_summary({a, b, c}, w).distance;
  const double shuffled = diagram_sequence_summary({b, a, c}, w).distance;
  EXPECT_NE(fwd, shuffled);
}
