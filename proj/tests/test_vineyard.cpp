#include <gtest/gtest.h>

#include <cmath>
#include <memory>
#include <random>

#include "support/oracles.hpp"
#include "vinedist/geodesics.hpp"
#include "vinedist/vineyard.hpp"

using namespace vinedist;
using vinedist::testing::Rng;

namespace {

PersistenceDiagram dgm(std::vector<std::pair<double, double>> pts, int dim = 0) {
  PersistenceDiagram d;
  d.dim = dim;
  for (auto [b, e] : pts) d.points.push_back({b, e, false});
  d.ceiling = 100;
  return d;
}

std::shared_ptr<const CellComplex> path3() {
  return std::make_shared<const CellComplex>(
      build_complex({{0, 0, {}}, {1, 0, {}}, {2, 0, {}}, {3, 1, {0, 1}}, {4, 1, {1, 2}}}));
}

void expect_well_formed(const Vineyard& vy) {
  for (const auto& v : vy.vines) {
    ASSERT_FALSE(v.points.empty());
    for (std::size_t i = 0; i < v.points.size(); ++i) {
      EXPECT_LE(v.points[i].x, v.points[i].y);
      if (i > 0) {
        EXPECT_LT(v.points[i - 1].t, v.points[i].t);
      }
    }
    const bool first_diag = on_diagonal(v.points.front().point());
    const bool last_diag = on_diagonal(v.points.back().point());
    if (v.cls == VineClass::Off) {
      EXPECT_FALSE(first_diag || last_diag);
    }
    if (v.cls == VineClass::StartsOnDiagonal || v.cls == VineClass::BothOnDiagonal) {
      EXPECT_TRUE(first_diag);
    }
    if (v.cls == VineClass::EndsOnDiagonal || v.cls == VineClass::BothOnDiagonal) {
      EXPECT_TRUE(last_diag);
    }
  }
  // Vine positions at each grid time reproduce the stored diagram.
  for (std::size_t k = 0; k < vy.times.size(); ++k) {
    auto pts = vy.points_at(k);
    std::vector<std::pair<double, double>> got, want;
    for (auto p : pts) got.emplace_back(p.x, p.y);
    for (const auto& p : vy.diagrams[k].points)
      if (p.birth != p.death) want.emplace_back(p.birth, p.death);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    EXPECT_EQ(got, want) << "time " << vy.times[k];
  }
}

}  // namespace

TEST(VineClassNames, RoundTrip) {
  for (auto c : {VineClass::Off, VineClass::EndsOnDiagonal, VineClass::StartsOnDiagonal, VineClass::BothOnDiagonal})
    EXPECT_EQ(vine_class_from_string(to_string(c)), c);
  EXPECT_THROW(vine_class_from_string("x"), Error);
}

TEST(VineyardDistance, SingleVine) {
  Vineyard vy;
  vy.vines.push_back({{{0, 0, 2}, {1, 0, 4}}, VineClass::Off, false});
  EXPECT_NEAR(vineyard_distance(vy, Weighting::uniform()), 2.0, 1e-12);
  EXPECT_NEAR(vineyard_distance(vy, Weighting::standard()), 3 * std::sqrt(2.0), 1e-12);
}

TEST(FromDiagrams, Stationary) {
  auto p = dgm({{0, 2}, {1, 5}});
  auto vy = vineyard_from_diagrams({p, p, p}, Weighting::uniform());
  EXPECT_EQ(vineyard_distance(vy, Weighting::uniform()), 0.0);
  EXPECT_EQ(vy.vines.size(), 2u);
  for (const auto& v : vy.vines) EXPECT_EQ(v.cls, VineClass::Off);
  expect_well_formed(vy);
}

TEST(FromDiagrams, DirectMove) {
  auto vy = vineyard_from_diagrams({dgm({{0, 2}}), dgm({{0, 4}})}, Weighting::uniform());
  ASSERT_EQ(vy.vines.size(), 1u);
  EXPECT_NEAR(vineyard_distance(vy, Weighting::uniform()), 2.0, 1e-12);
}

TEST(FromDiagrams, ExitThroughDiagonal) {
  auto vy = vineyard_from_diagrams({dgm({{0, 2}}), dgm({})}, Weighting::uniform());
  ASSERT_EQ(vy.vines.size(), 1u);
  EXPECT_EQ(vy.vines[0].cls, VineClass::EndsOnDiagonal);
  EXPECT_EQ(vy.vines[0].points.back().x, 1.0);
  EXPECT_EQ(vy.vines[0].points.back().y, 1.0);
  EXPECT_NEAR(vineyard_distance(vy, Weighting::uniform()), 1.0, 1e-12);
}

TEST(FromDiagrams, ExcursionMatchesSegmentIntegrals) {
  // A point appears, moves, and disappears again.
  const Weighting w = Weighting::standard();
  auto vy = vineyard_from_diagrams({dgm({}, 1), dgm({{1, 3}}, 1), dgm({{1, 3.5}}, 1), dgm({}, 1)}, w);
  ASSERT_EQ(vy.vines.size(), 1u);
  EXPECT_EQ(vy.vines[0].cls, VineClass::BothOnDiagonal);
  const double expected = segment_integral({2, 2}, {1, 3}, w) + segment_integral({1, 3}, {1, 3.5}, w) +
                          segment_integral({1, 3.5}, {2.25, 2.25}, w);
  EXPECT_NEAR(vineyard_distance(vy, w), expected, 1e-12);
  expect_well_formed(vy);
}

TEST(FromDiagrams, Errors) {
  EXPECT_THROW(vineyard_from_diagrams({dgm({})}, Weighting::uniform()), Error);
  EXPECT_THROW(vineyard_from_diagrams({dgm({}, 0), dgm({}, 1)}, Weighting::uniform()), Error);
}

TEST(BuildVineyard, ConstantHomotopy) {
  auto k = path3();
  std::vector<double> v{0, 2, 1};
  auto f = lower_star(*k, v);
  auto vy = build_vineyard(straight_line_homotopy(k, f, f), 0, Weighting::uniform());
  EXPECT_EQ(vineyard_distance(vy, Weighting::uniform()), 0.0);
  for (const auto& vine : vy.vines) {
    for (const auto& p : vine.points) {
      EXPECT_EQ(p.x, vine.points.front().x);
      EXPECT_EQ(p.y, vine.points.front().y);
    }
  }
}

TEST(BuildVineyard, PathExchange) {
  // Minima swap roles: the (1, 2) point slides to (0, 2) and back while the
  // essential point does the reverse.
  auto k = path3();
  std::vector<double> a{0, 2, 1}, b{1, 2, 0};
  auto h = straight_line_homotopy(k, lower_star(*k, a), lower_star(*k, b));
  VineyardOptions opt;
  opt.initial_steps = 4;
  auto vy = build_vineyard(h, 0, Weighting::uniform(), opt);
  expect_well_formed(vy);
  // Diagram at t: births {t, 1 - t}; the essential point carries the lower one.
  for (std::size_t i = 0; i < vy.times.size(); ++i) {
    const double t = vy.times[i];
    const auto& d = vy.diagrams[i];
    ASSERT_EQ(d.size(), 2u);
    EXPECT_NEAR(d.points[0].birth, std::min(t, 1 - t), 1e-12);
    EXPECT_NEAR(d.points[1].birth, std::max(t, 1 - t), 1e-12);
  }
  // Each point travels a birth distance of 1, whether the vines cross or bounce.
  EXPECT_NEAR(vineyard_distance(vy, Weighting::uniform()), 2.0, 1e-9);
  EXPECT_NEAR(riemann_sum_distance(h, 0, Weighting::uniform(), 64), 2.0, 1e-9);
}

TEST(BuildVineyard, RiemannSumAgreement) {
  Rng rng(55);
  int checked = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto k = std::make_shared<const CellComplex>(vinedist::testing::random_complex(rng));
    auto f = vinedist::testing::random_monotone(rng, *k);
    auto g = vinedist::testing::random_monotone(rng, *k);
    auto h = straight_line_homotopy(k, f, g);
    const Weighting u = Weighting::uniform();
    // The Riemann sum has an O(1/n) bias that can reach a few percent at 256.
    const double r = riemann_sum_distance(h, 0, u, 4096);
    const double v = vineyard_distance(build_vineyard(h, 0, u), u);
    if (r < 1e-9) continue;
    ++checked;
    EXPECT_NEAR(v, r, 0.01 * r);
  }
  EXPECT_GT(checked, 0);
}

TEST(BuildVineyard, RiemannRefinementIsSubadditive) {
  Rng rng(56);
  const Weighting u = Weighting::uniform();
  for (int trial = 0; trial < 10; ++trial) {
    auto k = std::make_shared<const CellComplex>(vinedist::testing::random_complex(rng));
    auto h = straight_line_homotopy(k, vinedist::testing::random_monotone(rng, *k),
                                    vinedist::testing::random_monotone(rng, *k));
    double prev = 0;
    for (std::size_t n : {1u, 2u, 4u, 8u, 16u, 32u}) {
      const double r = riemann_sum_distance(h, 1, u, n);
      EXPECT_GE(r, prev - 1e-9);
      prev = r;
    }
  }
}

TEST(BuildVineyard, ReparameterizationInvariance) {
  Rng rng(57);
  const Weighting s = Weighting::standard();
  for (int trial = 0; trial < 8; ++trial) {
    auto k = std::make_shared<const CellComplex>(vinedist::testing::random_complex(rng));
    auto h = straight_line_homotopy(k, vinedist::testing::random_monotone(rng, *k),
                                    vinedist::testing::random_monotone(rng, *k));
    const double a = vineyard_distance(build_vineyard(h, 0, s), s);
    const double b = vineyard_distance(build_vineyard(h.reparameterized([](double t) { return t * t * t; }), 0, s), s);
    EXPECT_NEAR(b, a, 0.005 * std::max(a, 1e-9));
  }
}

TEST(BuildVineyard, ResampledDiagramsReproduceDistance) {
  Rng rng(58);
  const Weighting s = Weighting::standard();
  for (int trial = 0; trial < 8; ++trial) {
    auto k = std::make_shared<const CellComplex>(vinedist::testing::random_complex(rng));
    auto h = straight_line_homotopy(k, vinedist::testing::random_monotone(rng, *k),
                                    vinedist::testing::random_monotone(rng, *k));
    auto vy = build_vineyard(h, 0, s);
    auto again = vineyard_from_diagrams(vy.diagrams, s);
    const double a = vineyard_distance(vy, s), b = vineyard_distance(again, s);
    EXPECT_NEAR(b, a, 0.005 * std::max(a, 1e-9));
    expect_well_formed(vy);
  }
}

TEST(BuildVineyard, RefinementLimitFlag) {
  auto k = path3();
  std::vector<double> a{0, 2, 1}, b{1, 2, 0};
  auto h = straight_line_homotopy(k, lower_star(*k, a), lower_star(*k, b));
  VineyardOptions opt;
  opt.initial_steps = 1;
  opt.max_depth = 0;
  opt.delta = 1e-6;
  auto vy = build_vineyard(h, 0, Weighting::uniform(), opt);
  EXPECT_TRUE(vy.refinement_limit_reached);
  EXPECT_FALSE(vy.warnings.empty());
}

TEST(BuildVineyard, InvalidOptions) {
  auto k = path3();
  std::vector<double> a{0, 2, 1};
  auto h = straight_line_homotopy(k, lower_star(*k, a), lower_star(*k, a));
  VineyardOptions opt;
  opt.initial_steps = 0;
  EXPECT_THROW(build_vineyard(h, 0, Weighting::uniform(), opt), Error);
}

TEST(BuildVineyard, MvcBelowWeightedVineyard) {
  Rng rng(59);
  const Weighting s = Weighting::standard();
  for (int trial = 0; trial < 20; ++trial) {
    auto a = vinedist::testing::random_diagram(rng, 5), b = vinedist::testing::random_diagram(rng, 5),
         c = vinedist::testing::random_diagram(rng, 5);
    auto vy = vineyard_from_diagrams({a, b, c}, s);
    EXPECT_LE(mvc(a, c).distance, vineyard_distance(vy, s) + 1e-9);
  }
}
