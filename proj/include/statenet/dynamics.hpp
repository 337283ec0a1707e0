#pragma once

#include <memory>
#include <optional>
#include <string>

#include "statenet/lagrangian.hpp"

namespace statenet {

enum class Family {
  BcdMajorize,
  ExactQuadratic,
  Mirror,
  Asymmetric,
  Transfer,
  SubgradientSaddle,
  QuasiNewton,
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Default edge logic for a family: the saddle-point families couple far
/// agents, everything else couples close ones.
NeighborhoodRule default_rule(Family f);

struct StepSchedule {
  enum class Kind { DiminishingOverGradNorm, ConstantEps, Unit, Fixed };

  Kind kind = Kind::Unit;
  double c = 1.0;    // gamma_k = c/(k+1) for the diminishing rule
  double t = 1.0;    // fixed step value
  double eps = 0.0;  // ConstantEps: alpha = eps / (n^2 G^2)
  double G = 0.0;
  int n = 0;

  static StepSchedule unit() { return {}; }
  static StepSchedule fixed(double t);
  static StepSchedule diminishing(double c);
  static StepSchedule constant_eps(double eps, int n, double G);

  /// Step size at iteration k (0-based) given the current (sub)gradient norm.
  double alpha(int k, double grad_norm) const;
  void validate() const;
  std::string describe() const;
};

enum class TransferForm { Eq5, ProofQ };

/// Exact quadratic update presets. The measurement Hessian is constant for
/// quadratic g, so the majorizer needs no smoothness slack.
struct ExactQuadraticSpec {
  enum class Kind {
    HomogeneousHK,     // x_i' = (x_i + sum_{j in N_i} x_j) / (|N_i|+1)
    WeightedConsensus, // x' = W x on a fixed row-stochastic graph
    NegativeWeights,   // x_i' = (|N_i| x_i - sum_{j in N_i} x_j) / (|N_i|+1)
    GeometricMean,     // x_i' = geometric mean over N_i and self (log-gap edges)
  };
  Kind kind = Kind::HomogeneousHK;
  /// Row-stochastic weight matrix (n x n, row-major) incl. self-weights;
  /// WeightedConsensus only.
  std::vector<double> weights;

  /// Certified per-step drift coefficient: V drops by at least
  /// coeff * ||dx||^2 for this update. Zero means "monotone only".
  double drift_coefficient() const;
};

struct DynamicsSpec {
  Family family = Family::BcdMajorize;
  std::optional<NeighborhoodRule> rule;  // family default when unset
  double m = 1.0;
  StepSchedule schedule;
  std::optional<MirrorMap> mirror;
  std::shared_ptr<const TransferFunctionSet> transfers;
  TransferForm transfer_form = TransferForm::ProofQ;
  ExactQuadraticSpec exact;
  bool backtracking = false;  // quasi-Newton Armijo halving line search
  int max_iters = 100;
  /// Stop when ||x^{k+1} - x^k|| < stop_tol. Negative selects the default
  /// 1e-9 * (1 + ||x0||_inf); zero disables the stop entirely (fixed-horizon
  /// experiments run all max_iters).
  double stop_tol = -1.0;
  double divergence_threshold = 1e12;
  double tie_tol = 1e-9;  // |g_ij| below this flags the nondifferentiable set

  NeighborhoodRule effective_rule() const { return rule.value_or(default_rule(family)); }
  LyapunovFamily lyapunov_family() const;
  void validate(const MeasurementSet& g, const PrivateCosts& f) const;
};

// ---------------------------------------------------------------------------
// Single-step update rules (synchronous: every agent steps from x^k)
// ---------------------------------------------------------------------------

Vec step_bcd_majorize(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double m,
                      const NeighborSets& neighbors);

Vec step_exact_quadratic(const Vec& x, const ExactQuadraticSpec& spec, const NeighborSets& neighbors);

Vec step_mirror(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, const MirrorMap& map,
                const NeighborSets& neighbors);

Vec step_asymmetric(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double m,
                    const NeighborSets& neighbors);

Vec step_transfer(const Vec& x, const MeasurementSet& g, const TransferFunctionSet& transfers,
                  double m, TransferForm form);

/// Returns the next state and the step size actually used.
std::pair<Vec, double> step_subgradient(const Vec& x, const MeasurementSet& g,
                                        const PrivateCosts& f, const StepSchedule& schedule, int k,
                                        const NeighborSets& far_neighbors);

Vec step_quasi_newton(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double t_k,
                      const NeighborSets& far_neighbors);

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

enum class RunStatus { Converged, MaxIters, Diverged };
const char* status_name(RunStatus s);

struct StepLog {
  double drift = 0.0;       // V(x^k) - V(x^{k+1})
  double bound = 0.0;       // required drift for certified families
  bool bound_asserted = false;
  bool bound_ok = true;
  double step_size = 1.0;
  bool domain_ok = true;    // mirror curvature domain satisfied on this step
  bool tie_hit = false;     // x^k on the nondifferentiable set (some g_ij ~ 0)
};

struct TrajectoryRecord {
  std::vector<Vec> states;               // length iterations()+1
  Vec lyapunov;                          // V at each stored state
  std::vector<StepLog> steps;            // length iterations()
  std::vector<std::vector<int>> degrees; // |N_i(x^k)| per executed iteration
  RunStatus status = RunStatus::MaxIters;
  Family family = Family::BcdMajorize;
  NeighborhoodRule rule = NeighborhoodRule::AttractWhenClose;

  int iterations() const { return static_cast<int>(steps.size()); }
  const Vec& initial() const { return states.front(); }
  const Vec& final_state() const { return states.back(); }
  double residual() const;  // ||dx|| of the last executed step, 0 if none
};

/// Iterates the family's update rule, recomputing neighborhoods from the
/// current state before every step (the network is state-slaved, never
/// cached). Records V, drift, and bound satisfaction each iteration.
/// Divergence is recorded as a status, not thrown.
TrajectoryRecord run(const DynamicsSpec& spec, const Vec& x0, const MeasurementSet& g,
                     const PrivateCosts& f);

}  // namespace statenet
