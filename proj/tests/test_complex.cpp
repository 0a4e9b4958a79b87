#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "support/oracles.hpp"
#include "vinedist/complex.hpp"
#include "vinedist/persistence.hpp"

using namespace vinedist;
using vinedist::testing::Rng;

namespace {

CellComplex path3() {
  return build_complex({{0, 0, {}}, {1, 0, {}}, {2, 0, {}}, {3, 1, {0, 1}}, {4, 1, {1, 2}}});
}

CellComplex triangle() {
  return build_complex(
      {{0, 0, {}}, {1, 0, {}}, {2, 0, {}}, {3, 1, {0, 1}}, {4, 1, {0, 2}}, {5, 1, {1, 2}}, {6, 2, {3, 4, 5}}});
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

}  // namespace

TEST(BuildComplex, SingleVertex) {
  auto k = build_complex({{0, 0, {}}});
  EXPECT_EQ(k.size(), 1u);
  EXPECT_EQ(k.dim(0), 0);
  EXPECT_EQ(k.vertex_count(), 1u);
}

TEST(BuildComplex, TriangleEulerCharacteristic) {
  auto k = triangle();
  EXPECT_EQ(k.size(), 7u);
  EXPECT_EQ(k.euler_characteristic(), 1);
  EXPECT_EQ(k.max_dim(), 2);
  auto vs = k.vertices(6);
  EXPECT_EQ(std::vector<std::size_t>(vs.begin(), vs.end()), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(BuildComplex, ValidationErrors) {
  EXPECT_EQ(kind_of([] { build_complex({{0, 0, {}}, {1, 1, {0, 5}}}); }), ErrorKind::DanglingFace);
  EXPECT_EQ(kind_of([] { build_complex({{0, 0, {}}, {1, 0, {}}, {2, 2, {0, 1}}}); }), ErrorKind::DimensionMismatch);
  EXPECT_EQ(kind_of([] { build_complex({{0, 0, {}}, {0, 0, {}}}); }), ErrorKind::DuplicateCell);
  EXPECT_EQ(kind_of([] { build_complex({{0, 0, {0}}}); }), ErrorKind::DimensionMismatch);
  // Two edges that do not close up into a cycle cannot bound a 2-cell.
  EXPECT_EQ(kind_of([] {
              build_complex({{0, 0, {}}, {1, 0, {}}, {2, 0, {}}, {3, 1, {0, 1}}, {4, 1, {1, 2}}, {5, 2, {3, 4}}});
            }),
            ErrorKind::InvalidBoundary);
  EXPECT_EQ(kind_of([] { build_complex({{0, 0, {}}, {5, 0, {}}}); }), ErrorKind::InvalidArgument);
}

TEST(LowerStar, MaxRule) {
  auto k = path3();
  std::vector<double> v{0, 2, 1};
  auto f = lower_star(k, v);
  EXPECT_EQ(f[3], 2.0);
  EXPECT_EQ(f[4], 2.0);
  EXPECT_TRUE(is_monotone(k, f));
}

TEST(LowerStar, Constant) {
  auto k = triangle();
  std::vector<double> v(3, 4.5);
  auto f = lower_star(k, v);
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_EQ(f[i], 4.5);
}

TEST(LowerStar, MissingValue) {
  auto k = path3();
  std::vector<double> v{0, 1};
  EXPECT_EQ(kind_of([&] { lower_star(k, v); }), ErrorKind::MissingVertexValue);
}

TEST(LowerStar, RandomAgainstDirectMax) {
  Rng rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    auto k = vinedist::testing::random_complex(rng);
    std::vector<double> vv(k.vertex_count());
    for (double& x : vv) x = u(rng);
    auto f = lower_star(k, vv);
    ASSERT_TRUE(is_monotone(k, f));
    for (std::size_t id = 0; id < k.size(); ++id) {
      double m = -1e300;
      for (std::size_t v : k.vertices(id)) m = std::max(m, vv[v]);
      ASSERT_EQ(f[id], m);
    }
  }
}

TEST(FilterDown, NegatesAtVertexLevel) {
  auto k = path3();
  std::vector<double> v{0, 2, 1};
  auto down = filter_down(k, lower_star(k, v));
  auto dv = down.vertex_values();
  EXPECT_EQ(std::vector<double>(dv.begin(), dv.end()), (std::vector<double>{0, -2, -1}));
  EXPECT_EQ(down[3], 0.0);  // max(0, -2)
  EXPECT_EQ(down[4], -1.0);
  EXPECT_TRUE(is_monotone(k, down));
}

TEST(FilterDown, Involution) {
  auto k = triangle();
  std::vector<double> v{0.5, -3, 7};
  auto f = lower_star(k, v);
  auto twice = filter_down(k, filter_down(k, f));
  for (std::size_t i = 0; i < k.size(); ++i) EXPECT_EQ(twice[i], f[i]);
}

TEST(FilterDown, NeedsVertexValues) {
  auto k = path3();
  FilterFunction raw({0, 1, 2, 3, 4});
  EXPECT_EQ(kind_of([&] { filter_down(k, raw); }), ErrorKind::NotVertexBased);
}

TEST(FilterDown, ImageInversion) {
  ImageGrid img{2, 2, {0, 100, 256, 30}};
  auto fc = cubical_from_image(img);
  auto down = filter_down(fc.complex, fc.filter, 256.0);
  auto vv = down.vertex_values();
  EXPECT_EQ(std::vector<double>(vv.begin(), vv.end()), (std::vector<double>{256, 156, 0, 226}));
}

TEST(Monotone, Validation) {
  auto k = path3();
  EXPECT_EQ(kind_of([&] { validate_monotone(k, FilterFunction({0, 1, 2, 0.5, 2})); }),
            ErrorKind::NonMonotoneFunction);
  EXPECT_EQ(kind_of([&] { validate_monotone(k, FilterFunction({0, 1})); }), ErrorKind::ComplexMismatch);
}

TEST(VietorisRips, EquilateralTriangleFills) {
  DistanceMatrix d{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  auto fc = vietoris_rips(d, 2, 10);
  EXPECT_EQ(fc.complex.size(), 7u);
  for (std::size_t id = 3; id < 7; ++id) EXPECT_EQ(fc.filter[id], 1.0);
  EXPECT_TRUE(compute_diagram(fc.complex, fc.filter, 1).empty());
}

TEST(VietorisRips, SquareLoopDiesAtDiagonal) {
  const double r2 = std::sqrt(2.0);
  DistanceMatrix d{{0, 1, r2, 1}, {1, 0, 1, r2}, {r2, 1, 0, 1}, {1, r2, 1, 0}};
  auto fc = vietoris_rips(d, 2, 10);
  EXPECT_EQ(fc.complex.count_of_dim(1), 6u);
  auto dgm = compute_diagram(fc.complex, fc.filter, 1);
  ASSERT_EQ(dgm.size(), 1u);
  EXPECT_EQ(dgm.points[0].birth, 1.0);
  EXPECT_EQ(dgm.points[0].death, r2);
  EXPECT_FALSE(dgm.points[0].essential);
  // Without triangles the three independent cycles of K4's edges never die.
  auto open = vietoris_rips(d, 1, 10);
  EXPECT_EQ(compute_diagram(open.complex, open.filter, 1).size(), 3u);
}

TEST(VietorisRips, ZeroScaleGivesVertices) {
  DistanceMatrix d{{0, 1, 2}, {1, 0, 1}, {2, 1, 0}};
  auto fc = vietoris_rips(d, 2, 0.0);
  EXPECT_EQ(fc.complex.size(), 3u);
}

TEST(VietorisRips, InputErrors) {
  EXPECT_EQ(kind_of([] { vietoris_rips({{0, 1}, {2, 0}}, 1, 5); }), ErrorKind::AsymmetricMatrix);
  EXPECT_EQ(kind_of([] { vietoris_rips({{0, -1}, {-1, 0}}, 1, 5); }), ErrorKind::NegativeDistance);
}

TEST(VietorisRips, DiameterMatchesBruteForce) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 7;
    std::vector<std::array<double, 2>> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    DistanceMatrix d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
    auto fc = vietoris_rips(d, 3, 0.8);
    ASSERT_TRUE(is_monotone(fc.complex, fc.filter));
    for (std::size_t id = 0; id < fc.complex.size(); ++id) {
      auto vs = fc.complex.vertices(id);
      double diam = 0;
      for (std::size_t a : vs)
        for (std::size_t b : vs) diam = std::max(diam, d[a][b]);
      ASSERT_EQ(fc.filter[id], diam);
      ASSERT_LE(diam, 0.8);
    }
  }
}

TEST(Cubical, Counts) {
  EXPECT_EQ(cubical_from_image({1, 1, {3}}).complex.size(), 1u);
  auto two = cubical_from_image({2, 2, {0, 1, 2, 3}}).complex;
  EXPECT_EQ(two.count_of_dim(0), 4u);
  EXPECT_EQ(two.count_of_dim(1), 4u);
  EXPECT_EQ(two.count_of_dim(2), 1u);
  for (std::size_t m : {1u, 3u, 5u})
    for (std::size_t n : {2u, 4u}) {
      auto k = cubical_from_image({m, n, std::vector<double>(m * n, 0.0)}).complex;
      EXPECT_EQ(k.size(), m * n + (m * (n - 1) + n * (m - 1)) + (m - 1) * (n - 1));
      EXPECT_EQ(k.euler_characteristic(), 1);
    }
}

TEST(Cubical, EmptyGrid) {
  EXPECT_EQ(kind_of([] { cubical_from_image({0, 0, {}}); }), ErrorKind::EmptyGrid);
  EXPECT_EQ(kind_of([] { cubical_from_image({2, 2, {1, 2, 3}}); }), ErrorKind::EmptyGrid);
}

TEST(Cubical, RingGivesOneLoop) {
  ImageGrid img{3, 3, {1, 1, 1, 1, 0, 1, 1, 1, 1}};
  auto fc = cubical_from_image(img);
  auto down = filter_down(fc.complex, fc.filter, 256.0);
  auto dgm = compute_diagram(fc.complex, down, 1);
  ASSERT_EQ(dgm.size(), 1u);
  EXPECT_EQ(dgm.points[0].birth, 255.0);
  EXPECT_EQ(dgm.points[0].death, 256.0);
  EXPECT_FALSE(dgm.points[0].essential);
}

TEST(Homotopy, Endpoints) {
  auto k = std::make_shared<const CellComplex>(path3());
  std::vector<double> a{0, 2, 1}, b{1, 2, 0};
  auto f = lower_star(*k, a), g = lower_star(*k, b);
  auto h = straight_line_homotopy(k, f, g);
  for (std::size_t i = 0; i < k->size(); ++i) {
    EXPECT_EQ(h.at(0)[i], f[i]);
    EXPECT_EQ(h.at(1)[i], g[i]);
  }
  auto c = straight_line_homotopy(k, f, f);
  for (double t : {0.1, 0.5, 0.9})
    for (std::size_t i = 0; i < k->size(); ++i) EXPECT_EQ(c.at(t)[i], f[i]);
}

TEST(Homotopy, Midpoint) {
  auto k = std::make_shared<const CellComplex>(build_complex({{0, 0, {}}, {1, 0, {}}}));
  auto h = straight_line_homotopy(k, FilterFunction({0, 2}), FilterFunction({2, 0}));
  EXPECT_EQ(h.at(0.5)[0], 1.0);
  EXPECT_EQ(h.at(0.5)[1], 1.0);
}

TEST(Homotopy, MonotoneAtSampledTimes) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    auto k = std::make_shared<const CellComplex>(vinedist::testing::random_complex(rng));
    auto f = vinedist::testing::random_monotone(rng, *k);
    auto g = vinedist::testing::random_monotone(rng, *k);
    auto h = straight_line_homotopy(k, f, g);
    for (int s = 0; s <= 16; ++s) ASSERT_TRUE(is_monotone(*k, h.at(s / 16.0)));
  }
}

TEST(Homotopy, VertexLevelUsesLowerStar) {
  auto k = std::make_shared<const CellComplex>(path3());
  std::vector<double> a{0, 2, 1}, b{2, 0, 1};
  auto h = straight_line_homotopy(k, lower_star(*k, a), lower_star(*k, b), HomotopyMode::VertexLevel);
  auto mid = h.at(0.5);
  EXPECT_EQ(mid[3], 1.0);  // max(1, 1)
  EXPECT_EQ(mid[4], 1.0);
  EXPECT_EQ(kind_of([&] { straight_line_homotopy(k, FilterFunction({0, 0, 0, 1, 1}), lower_star(*k, b),
                                                  HomotopyMode::VertexLevel); }),
            ErrorKind::NotVertexBased);
}

TEST(Homotopy, ComplexMismatch) {
  auto k = std::make_shared<const CellComplex>(path3());
  EXPECT_EQ(kind_of([&] { straight_line_homotopy(k, FilterFunction({0, 1}), FilterFunction({0, 1})); }),
            ErrorKind::ComplexMismatch);
}
