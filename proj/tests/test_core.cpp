#include "doctest.h"

#include "statenet/core.hpp"
#include "statenet/rng.hpp"

using namespace statenet;

namespace {

MeasurementPtr quad_gap(int n, double eps) {
  auto g = std::make_shared<UniformPolyMeasurements>(n, Poly2::quadratic_gap(eps), true);
  g->declare_smoothness(1.0);
  return g;
}

// Independent enumeration oracle: sign test on directly evaluated pair values.
NeighborSets enumerate_neighbors(const Vec& x, const MeasurementSet& g, bool attract) {
  NeighborSets out(x.size());
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      if (i == j) continue;
      double v = g.value(i, j, x[i], x[j]);
      if (attract ? v <= 0.0 : v > 0.0) out[i].push_back(j);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("neighborhoods on the three-agent gap instance") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);

  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
  CHECK(nb[0] == std::vector<int>{1});
  CHECK(nb[1] == std::vector<int>{0});
  CHECK(nb[2].empty());
  CHECK(nb == enumerate_neighbors(x, *g, true));

  NeighborSets far = neighborhoods(x, *g, NeighborhoodRule::RepelWhenFar);
  CHECK(far == enumerate_neighbors(x, *g, false));
  CHECK(far[0] == std::vector<int>{2});
  CHECK(far[1] == std::vector<int>{2});
  CHECK(far[2] == std::vector<int>{0, 1});
}

TEST_CASE("coincident states connect everyone under attract, nobody under repel") {
  Vec x(5, 3.25);
  auto g = quad_gap(5, 0.7);

  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
  for (int i = 0; i < 5; ++i) CHECK(nb[i].size() == 4);

  NeighborSets far = neighborhoods(x, *g, NeighborhoodRule::RepelWhenFar);
  for (int i = 0; i < 5; ++i) CHECK(far[i].empty());
}

TEST_CASE("the two rules partition every pair") {
  Rng rng(41);
  auto g = quad_gap(4, 1.3);
  for (int trial = 0; trial < 50; ++trial) {
    Vec x = rng.uniform_vec(4, -5, 5);
    NeighborSets close = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
    NeighborSets far = neighborhoods(x, *g, NeighborhoodRule::RepelWhenFar);
    for (int i = 0; i < 4; ++i) CHECK(close[i].size() + far[i].size() == 3);
  }
}

TEST_CASE("symmetric measurements make mutual neighborhoods") {
  Rng rng(7);
  auto g = quad_gap(5, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    Vec x = rng.uniform_vec(5, -10, 10);
    NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
    for (int i = 0; i < 5; ++i) {
      for (int j : nb[i]) {
        bool mutual = std::find(nb[j].begin(), nb[j].end(), i) != nb[j].end();
        CHECK(mutual);
      }
    }
  }
}

TEST_CASE("neighborhoods is pure: identical inputs, identical outputs") {
  Vec x{0.4, -1.2, 0.41, 5.0};
  auto g = quad_gap(4, 1.0);
  auto a = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
  auto b = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
  CHECK(a == b);
}

TEST_CASE("non-finite state is rejected with a divergence-style report") {
  auto g = quad_gap(2, 1.0);
  Vec bad{1.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK_THROWS_AS(neighborhoods(bad, *g, NeighborhoodRule::AttractWhenClose), EvaluationError);
}

TEST_CASE("non-finite measurement names the pair") {
  // Log-gap at a negative state blows up inside the measurement itself.
  LogGapMeasurements g(2, 1.0);
  Vec x{1.0, -2.0};
  CHECK_THROWS_AS(neighborhoods(x, g, NeighborhoodRule::AttractWhenClose), EvaluationError);
}

TEST_CASE("dual_from_state marks exactly the neighborhood edges") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);

  DualNetwork lam = dual_from_state(x, *g, NeighborhoodRule::AttractWhenClose);
  CHECK(lam.at(0, 1) == 1.0);
  CHECK(lam.at(1, 0) == 1.0);
  CHECK(lam.at(0, 2) == 0.0);
  CHECK(lam.at(2, 0) == 0.0);
  CHECK(lam.at(1, 2) == 0.0);
  CHECK(lam.at(2, 1) == 0.0);
  CHECK(lam.is_binary());
}

TEST_CASE("all pairs separated: dual is identically zero under attract") {
  Vec x{0.0, 10.0, 20.0};
  auto g = quad_gap(3, 1.0);
  DualNetwork lam = dual_from_state(x, *g, NeighborhoodRule::AttractWhenClose);
  for (int k = 0; k < lam.pair_count(); ++k) CHECK(lam.flat(k) == 0.0);
}

TEST_CASE("dual network flat indexing round-trips") {
  DualNetwork lam(4);
  int k = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j) continue;
      CHECK(pair_index(4, i, j) == k);
      ++k;
    }
  }
  lam.set(2, 3, 0.5);
  CHECK(lam.at(2, 3) == 0.5);
  CHECK(lam.at(3, 2) == 0.0);
}
