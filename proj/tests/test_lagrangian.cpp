#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

#include "statenet/harness.hpp"
#include "statenet/lagrangian.hpp"
#include "statenet/rng.hpp"

using namespace statenet;

namespace {

MeasurementPtr quad_gap(int n, double eps) {
  auto g = std::make_shared<UniformPolyMeasurements>(n, Poly2::quadratic_gap(eps), true);
  g->declare_smoothness(1.0);
  return g;
}

/// Exhaustive min of L(x, .) over binary networks; independent of
/// dual_from_state and of the harness oracle.
double brute_force_min_lagrangian(const Vec& x, const MeasurementSet& g, const PrivateCosts& f) {
  int pairs = g.size() * (g.size() - 1);
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
    DualNetwork lam(g.size());
    for (int k = 0; k < pairs; ++k) lam.flat(k) = (mask >> k) & 1u ? 1.0 : 0.0;
    best = std::min(best, lagrangian_value(x, lam, g, f, PairSumForm::SymmetricHalved));
  }
  return best;
}

}  // namespace

TEST_CASE("lagrangian value on the three-agent instance") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);
  PrivateCosts f = PrivateCosts::zero(3);

  DualNetwork lam = dual_from_state(x, *g, NeighborhoodRule::AttractWhenClose);
  CHECK(lagrangian_value(x, lam, *g, f) == doctest::Approx(-0.375).epsilon(1e-14));

  DualNetwork zero(3);
  CHECK(lagrangian_value(x, zero, *g, f) == doctest::Approx(0.0));

  PrivateCosts fq = PrivateCosts::uniform_quadratic(3, 1.0);
  CHECK(lagrangian_value(x, zero, *g, fq) == doctest::Approx(fq.total(x)));
}

TEST_CASE("lagrangian value of the product-threshold pair model") {
  // f_i = x_i^2/2, g_ij = x_i x_j - 1, both edges on: L = 1 + (1/2)*2*0 = 1.
  auto g = std::make_shared<UniformPolyMeasurements>(2, Poly2::product_threshold(1.0), true);
  PrivateCosts f = PrivateCosts::uniform_quadratic(2, 1.0);
  Vec x{1.0, 1.0};
  DualNetwork lam(2, 1.0);
  CHECK(lagrangian_value(x, lam, *g, f) == doctest::Approx(1.0));
}

TEST_CASE("fixed-network gradient matches the hand computation") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);
  PrivateCosts f = PrivateCosts::zero(3);
  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);

  Vec grad = lagrangian_grad_fixed_network(x, nb, *g, f);
  CHECK(grad[0] == doctest::Approx(-0.5));
  CHECK(grad[1] == doctest::Approx(0.5));
  CHECK(grad[2] == doctest::Approx(0.0));
}

TEST_CASE("empty network gradient is the private-cost derivative") {
  Vec x{5.0, -3.0};
  auto g = quad_gap(2, 0.1);
  PrivateCosts f = PrivateCosts::quadratic_well({2.0, 4.0}, {1.0, 0.0});
  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
  REQUIRE(nb[0].empty());

  Vec grad = lagrangian_grad_fixed_network(x, nb, *g, f);
  CHECK(grad[0] == doctest::Approx(2.0 * (5.0 - 1.0)));
  CHECK(grad[1] == doctest::Approx(4.0 * (-3.0)));
}

TEST_CASE("full gradient matches central differences on random instances") {
  Rng rng(11);
  auto g = quad_gap(4, 1.5);
  PrivateCosts f = PrivateCosts::quadratic_well({0.5, 1.0, 0.2, 0.8}, {0, 1, -1, 2});
  for (int trial = 0; trial < 30; ++trial) {
    Vec x = rng.uniform_vec(4, -3, 3);
    if (near_tie(x, *g)) continue;
    DualNetwork lam(4);
    for (int k = 0; k < lam.pair_count(); ++k) lam.flat(k) = rng.unit();
    // Quadratic measurements are exact under central differences.
    CHECK(fd_gradient_check(x, lam, *g, f) < 1e-9);
  }
}

TEST_CASE("fixed-network formula equals the halved-L gradient for symmetric instances") {
  Rng rng(12);
  auto g = quad_gap(5, 2.0);
  PrivateCosts f = PrivateCosts::uniform_quadratic(5, 0.3);
  for (int trial = 0; trial < 30; ++trial) {
    Vec x = rng.uniform_vec(5, -4, 4);
    NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
    DualNetwork lam = dual_from_neighbors(5, nb);
    Vec a = lagrangian_grad_fixed_network(x, nb, *g, f);
    Vec b = lagrangian_grad_full(x, lam, *g, f, PairSumForm::SymmetricHalved);
    for (int i = 0; i < 5; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("dominating diagonals per variant") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);
  PrivateCosts f = PrivateCosts::zero(3);
  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);

  auto q3 = dominating_diagonal(x, nb, *g, f, 1.0, DiagonalVariant::MajorizeSmooth);
  CHECK(q3.diag == Vec{4.0, 4.0, 2.0});

  auto qe = dominating_diagonal(x, nb, *g, f, 1.0, DiagonalVariant::ExactQuadratic);
  CHECK(qe.diag == Vec{2.0, 2.0, 1.0});

  auto qa = dominating_diagonal(x, nb, *g, f, 1.0, DiagonalVariant::AsymmetricSmooth);
  CHECK(qa.diag == Vec{2.0, 2.0, 1.0});
}

TEST_CASE("transfer-majorize diagonal") {
  // g = (x_i - x_j)^2, f_ij = exp(-l), m = 2: entries 2 + 8 e^{-1}.
  auto g = std::make_shared<UniformPolyMeasurements>(2, Poly2::scaled_square_gap(1.0), true);
  PrivateCosts f = PrivateCosts::zero(2);
  Vec x{0.0, 1.0};
  auto transfers = TransferFunctionSet::uniform(2, TransferFunctionSet::Kind::Exp);
  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);

  auto q = dominating_diagonal(x, nb, *g, f, 2.0, DiagonalVariant::TransferMajorize, &transfers);
  CHECK(q.diag[0] == doctest::Approx(2.0 + 8.0 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(q.diag[0] == doctest::Approx(4.9430355293715385).epsilon(1e-10));
}

TEST_CASE("quasi-newton diagonal rejects nonpositive curvature") {
  // Concave pair term makes 1 + sum of second partials negative.
  auto g = std::make_shared<UniformPolyMeasurements>(2, Poly2{-3.0, -3.0, 0, 0, 0, -10.0}, true);
  PrivateCosts f = PrivateCosts::zero(2);
  Vec x{0.0, 0.1};
  NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
  REQUIRE(nb[0].size() == 1);
  CHECK_THROWS_AS(dominating_diagonal(x, nb, *g, f, 0.0, DiagonalVariant::QuasiNewtonDiag),
                  EvaluationError);
}

TEST_CASE("lyapunov families reproduce the cited functionals") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);
  PrivateCosts f = PrivateCosts::zero(3);

  CHECK(lyapunov(x, *g, f, LyapunovFamily::MajorizeLagrangian) ==
        doctest::Approx(-0.375).epsilon(1e-14));

  // Coincident agents with per-agent confidence radii: every ordered pair
  // contributes its own -eps_i^2/2.
  Vec eps{1.0, 2.0, 0.5};
  Vec offsets(3);
  for (int i = 0; i < 3; ++i) offsets[i] = 0.5 * eps[i] * eps[i];
  auto gh = std::make_shared<PerAgentOffsetMeasurements>(Poly2{0.5, 0.5, -1.0, 0, 0, 0}, offsets);
  Vec xc(3, 4.0);
  double expected = 0.0;
  for (int i = 0; i < 3; ++i) expected += 2.0 * (-0.5 * eps[i] * eps[i]);
  CHECK(lyapunov(xc, *gh, f, LyapunovFamily::AsymmetricMinSum) == doctest::Approx(expected));

  // Transfer integral: two ordered pairs at g = 1 with f = exp(-l).
  auto gsq = std::make_shared<UniformPolyMeasurements>(2, Poly2::scaled_square_gap(1.0), true);
  auto transfers = TransferFunctionSet::uniform(2, TransferFunctionSet::Kind::Exp);
  Vec x2{0.0, 1.0};
  PrivateCosts f2 = PrivateCosts::zero(2);
  CHECK(lyapunov(x2, *gsq, f2, LyapunovFamily::TransferIntegral, &transfers) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
}

TEST_CASE("optimal-network value equals the exhaustive binary minimum") {
  Rng rng(13);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + static_cast<int>(rng.raw() % 2);  // n in {3, 4}
    auto g = quad_gap(n, 1.0 + rng.unit());
    PrivateCosts f = PrivateCosts::uniform_quadratic(n, rng.unit());
    Vec x = rng.uniform_vec(n, -2, 2);
    double direct = lyapunov(x, *g, f, LyapunovFamily::MajorizeLagrangian);
    CHECK(direct == doctest::Approx(brute_force_min_lagrangian(x, *g, f)).epsilon(1e-12));
  }
}

TEST_CASE("penalty objective and its subgradient on the complement instance") {
  Vec x{0.0, 0.5, 2.0};
  auto g = quad_gap(3, 1.0);
  PrivateCosts f = PrivateCosts::zero(3);

  CHECK(penalty_phi(x, *g, f) == doctest::Approx(2.125).epsilon(1e-14));

  Vec s = penalty_subgradient(x, *g, f);
  CHECK(s[0] == doctest::Approx(-2.0));
  CHECK(s[1] == doctest::Approx(-1.5));
  CHECK(s[2] == doctest::Approx(3.5));

  // Everyone within the confidence radius: the max terms vanish.
  Vec close{0.0, 0.1, 0.2};
  PrivateCosts fq = PrivateCosts::uniform_quadratic(3, 2.0);
  CHECK(penalty_phi(close, *g, fq) == doctest::Approx(fq.total(close)));
}

TEST_CASE("penalty objective is convex along random segments") {
  Rng rng(17);
  auto g = quad_gap(4, 1.0);
  PrivateCosts f = PrivateCosts::uniform_quadratic(4, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    Vec a = rng.uniform_vec(4, -3, 3);
    Vec b = rng.uniform_vec(4, -3, 3);
    double theta = rng.unit();
    Vec mid(4);
    for (int i = 0; i < 4; ++i) mid[i] = theta * a[i] + (1 - theta) * b[i];
    double lhs = penalty_phi(mid, *g, f);
    double rhs = theta * penalty_phi(a, *g, f) + (1 - theta) * penalty_phi(b, *g, f);
    CHECK(lhs <= rhs + 1e-12);
  }
}

TEST_CASE("penalty subgradient matches finite differences off the tie set") {
  Rng rng(19);
  auto g = quad_gap(4, 1.2);
  PrivateCosts f = PrivateCosts::uniform_quadratic(4, 0.7);
  int checked = 0;
  while (checked < 30) {
    Vec x = rng.uniform_vec(4, -3, 3);
    if (near_tie(x, *g, 1e-3)) continue;  // keep the stencil off the kink
    CHECK(fd_penalty_check(x, *g, f) < 1e-9);
    ++checked;
  }
}

TEST_CASE("gershgorin dominance: Q - hessian stays positive semidefinite") {
  Rng rng(23);
  const double m = 1.0;
  for (int n : {3, 4, 6}) {
    auto g = quad_gap(n, 1.0);
    PrivateCosts f = PrivateCosts::uniform_quadratic(n, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
      Vec x = rng.uniform_vec(n, -3, 3);
      NeighborSets nb = neighborhoods(x, *g, NeighborhoodRule::AttractWhenClose);
      auto Q = dominating_diagonal(x, nb, *g, f, m, DiagonalVariant::MajorizeSmooth);

      // Build the network-fixed Hessian of the halved Lagrangian.
      std::vector<double> H(static_cast<std::size_t>(n) * n, 0.0);
      for (int i = 0; i < n; ++i) {
        double d = f.d2(i, x[i]);
        for (int j : nb[i]) {
          d += g->d11(i, j, x[i], x[j]);
          H[i * n + j] = g->d12(i, j, x[i], x[j]);
        }
        H[i * n + i] = d - Q.diag[i];  // Q - H made negative: check -(H - Q)
      }
      for (auto& v : H) v = -v;
      CHECK(testutil::min_eigenvalue(H, n) > -1e-9);
    }
  }
}

TEST_CASE("bregman divergences") {
  MirrorMap quad = MirrorMap::quadratic();
  Vec a{1.0, -2.0, 0.5};
  Vec b{0.0, 1.0, 0.25};
  double expect = 0.0;
  for (int i = 0; i < 3; ++i) expect += 0.5 * sq(a[i] - b[i]);
  CHECK(bregman(quad, a, b) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(bregman(quad, a, a) == doctest::Approx(0.0));

  MirrorMap ent = MirrorMap::negative_entropy();
  Vec ea{1.0, 2.0};
  Vec eb{2.0, 1.0};
  // KL form: sum a ln(a/b) - a + b.
  double kl = 1.0 * std::log(0.5) - 1 + 2 + 2.0 * std::log(2.0) - 2 + 1;
  CHECK(bregman(ent, ea, eb) == doctest::Approx(kl).epsilon(1e-12));
  CHECK(kl == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(bregman(ent, ea, ea) == doctest::Approx(0.0));

  CHECK_THROWS_AS(bregman(ent, Vec{-1.0}, Vec{1.0}), EvaluationError);
}

TEST_CASE("bregman is nonnegative for convex maps") {
  Rng rng(29);
  MirrorMap ent = MirrorMap::negative_entropy();
  MirrorMap quad = MirrorMap::quadratic(2.5);
  for (int trial = 0; trial < 50; ++trial) {
    Vec a = rng.uniform_vec(3, 0.01, 5.0);
    Vec b = rng.uniform_vec(3, 0.01, 5.0);
    CHECK(bregman(ent, a, b) >= -1e-12);
    CHECK(bregman(quad, a, b) >= -1e-12);
  }
}

TEST_CASE("sorted gap vector") {
  CHECK(sorted_gap_vector({0.0, 0.5, 2.0}) == Vec{2.0, 1.5, 0.5});
  CHECK(sorted_gap_vector({3.0, 3.0, 3.0}) == Vec{0.0, 0.0, 0.0});
  // Permutation invariance.
  CHECK(sorted_gap_vector({2.0, 0.0, 0.5}) == sorted_gap_vector({0.0, 0.5, 2.0}));
  CHECK(sorted_gap_vector({1.0, 4.0}) == Vec{3.0});
}

TEST_CASE("mirror map inverse identity") {
  Rng rng(31);
  MirrorMap ent = MirrorMap::negative_entropy();
  MirrorMap quad = MirrorMap::quadratic(3.0);
  for (int trial = 0; trial < 200; ++trial) {
    double x = rng.uniform(1e-3, 50.0);
    CHECK(ent.grad_inverse(ent.grad(x)) == doctest::Approx(x).epsilon(1e-10));
    double y = rng.uniform(-20.0, 20.0);
    CHECK(quad.grad_inverse(quad.grad(y)) == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("transfer functions: nonnegative, strictly decreasing, exact antiderivative") {
  Rng rng(37);
  using K = TransferFunctionSet::Kind;
  for (K kind : {K::Exp, K::SmoothedHinge, K::Reciprocal}) {
    auto t = TransferFunctionSet::uniform(2, kind, 0.1);
    CHECK(t.antiderivative(0, 1, 0.0) == doctest::Approx(0.0));
    for (int trial = 0; trial < 100; ++trial) {
      double l = rng.uniform(kind == K::Reciprocal ? -0.5 : -2.0, 5.0);
      CHECK(t.f(0, 1, l) > 0.0);
      CHECK(t.fprime(0, 1, l) < 0.0);
      // F' == f, central differences.
      double h = 1e-6;
      double fd = (t.antiderivative(0, 1, l + h) - t.antiderivative(0, 1, l - h)) / (2 * h);
      CHECK(fd == doctest::Approx(t.f(0, 1, l)).epsilon(1e-6));
      // f' matches differences of f.
      double fpd = (t.f(0, 1, l + h) - t.f(0, 1, l - h)) / (2 * h);
      CHECK(fpd == doctest::Approx(t.fprime(0, 1, l)).epsilon(1e-5));
    }
  }
}
