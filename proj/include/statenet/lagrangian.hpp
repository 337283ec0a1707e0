#pragma once

#include <optional>

#include "statenet/core.hpp"
#include "statenet/measurement.hpp"

namespace statenet {

/// How the ordered-pair sum enters L. Symmetric families sum over ordered
/// pairs and halve; the asymmetric family sums unhalved. One shared enum so
/// no caller silently double counts.
enum class PairSumForm { SymmetricHalved, Ordered };

/// L(x, lambda) = sum_i f_i(x_i) + w * sum_{i != j} lambda_ij g_ij(x_i, x_j),
/// w = 1/2 for SymmetricHalved and 1 for Ordered.
double lagrangian_value(const Vec& x, const DualNetwork& lambda, const MeasurementSet& g,
                        const PrivateCosts& f, PairSumForm form = PairSumForm::SymmetricHalved);

/// Gradient of L at a fixed binary network:
///   [grad]_i = f_i'(x_i) + sum_{j in N_i} d g_ij / d x_i.
/// For symmetric g this equals the x-gradient of the halved L.
Vec lagrangian_grad_fixed_network(const Vec& x, const NeighborSets& neighbors,
                                  const MeasurementSet& g, const PrivateCosts& f);

/// Exact x-gradient of L(x, lambda) for arbitrary lambda, chaining through
/// both argument slots of every pair term. Matches central differences of
/// lagrangian_value for any measurement set.
Vec lagrangian_grad_full(const Vec& x, const DualNetwork& lambda, const MeasurementSet& g,
                         const PrivateCosts& f, PairSumForm form = PairSumForm::SymmetricHalved);

// ---------------------------------------------------------------------------
// Dominating diagonal matrices
// ---------------------------------------------------------------------------

class TransferFunctionSet;

/// Which diagonal majorizer bounds the Hessian of the network-fixed L.
enum class DiagonalVariant {
  MajorizeSmooth,     // 2m(|N_i|+1); generic twice-differentiable measurements
  ExactQuadratic,     // |N_i|+1; quadratic measurements, no approximation slack
  AsymmetricSmooth,   // m(|N_i|+1); duplicated-state penalty scheme
  TransferMajorize,   // 2 + 4m * sum_j f_ij(g_ij); transformed network variables
  QuasiNewtonDiag,    // 1 + f_i'' + sum_{j in N_i} d2 g_ij / d x_i^2
};

struct DominatingDiagonal {
  Vec diag;
  DiagonalVariant variant;
};

DominatingDiagonal dominating_diagonal(const Vec& x, const NeighborSets& neighbors,
                                       const MeasurementSet& g, const PrivateCosts& f, double m,
                                       DiagonalVariant variant,
                                       const TransferFunctionSet* transfers = nullptr);

// ---------------------------------------------------------------------------
// Lyapunov functionals
// ---------------------------------------------------------------------------

/// Each update family pairs with exactly one V; callers select explicitly.
enum class LyapunovFamily {
  MajorizeLagrangian,  // sum_i f_i + 1/2 sum_{i!=j} min{g_ij, 0}  (= min_lambda L)
  AsymmetricMinSum,    // sum_{i!=j} min{g_ij, 0}
  TransferIntegral,    // sum_{i!=j} F_ij(g_ij),  F_ij(u) = int_0^u f_ij
  Penalty,             // sum_i f_i + 1/2 sum_{i!=j} max{g_ij, 0}
};

double lyapunov(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, LyapunovFamily family,
                const TransferFunctionSet* transfers = nullptr);

/// Phi(x) = f(x) + 1/2 sum_{i,j} max{g_ij(x_i,x_j), 0}; convex for convex
/// f and g.
double penalty_phi(const Vec& x, const MeasurementSet& g, const PrivateCosts& f);

/// Subgradient of Phi. At ties g_ij = 0 the zero branch is taken (the pair
/// is excluded), so this is the far-neighborhood gradient
///   [s]_i = f_i'(x_i) + sum_{j: g_ij > 0} d g_ij / d x_i.
Vec penalty_subgradient(const Vec& x, const MeasurementSet& g, const PrivateCosts& f);

/// All n(n-1)/2 pairwise distances |x_i - x_j|, sorted nonincreasing.
Vec sorted_gap_vector(const Vec& x);

// ---------------------------------------------------------------------------
// Mirror maps and Bregman divergences
// ---------------------------------------------------------------------------

/// Separable strictly convex map Psi(x) = sum_i psi(x_i), with closed-form
/// gradient and inverse gradient.
class MirrorMap {
 public:
  enum class Kind { NegativeEntropy, Quadratic };

  static MirrorMap negative_entropy() { return MirrorMap(Kind::NegativeEntropy, 1.0); }
  static MirrorMap quadratic(double scale = 1.0) { return MirrorMap(Kind::Quadratic, scale); }

  Kind kind() const { return kind_; }

  double value(double x) const;
  double grad(double x) const;
  double grad_inverse(double y) const;
  double hessian(double x) const;
  bool in_domain(double x) const;

  double value(const Vec& x) const;

 private:
  MirrorMap(Kind k, double scale) : kind_(k), scale_(scale) {}
  Kind kind_;
  double scale_;
};

/// D_psi(a, b) = Psi(a) - Psi(b) - <grad Psi(b), a - b>; nonnegative for
/// convex Psi, zero at a = b.
double bregman(const MirrorMap& map, const Vec& a, const Vec& b);

// ---------------------------------------------------------------------------
// Transfer functions (change of network variables)
// ---------------------------------------------------------------------------

/// Nonnegative, strictly decreasing, differentiable transfer f(lambda) with
/// a closed-form antiderivative F(u) = int_0^u f; numeric quadrature is
/// rejected so Lyapunov evaluations stay exact for drift tests.
class TransferFunctionSet {
 public:
  enum class Kind {
    Exp,            // f(l) = exp(-l)
    SmoothedHinge,  // f(l) = ((1-l) + sqrt((1-l)^2 + delta^2)) / 2
    Reciprocal,     // f(l) = 1/(1+l), for l > -1
  };

  static TransferFunctionSet uniform(int n, Kind kind, double param = 0.1);

  int size() const { return n_; }
  bool symmetric() const { return true; }
  Kind kind() const { return kind_; }

  double f(int i, int j, double lambda) const;
  double fprime(int i, int j, double lambda) const;
  /// F(u) = int_0^u f(l) dl, closed form.
  double antiderivative(int i, int j, double u) const;

 private:
  TransferFunctionSet(int n, Kind kind, double param) : n_(n), kind_(kind), param_(param) {}
  int n_;
  Kind kind_;
  double param_;
};

}  // namespace statenet
