#pragma once

#include <optional>

#include "statenet/dynamics.hpp"

namespace statenet {

// ---------------------------------------------------------------------------
// Drift ledger
// ---------------------------------------------------------------------------

struct DriftLedger {
  struct Entry {
    double v = 0.0;        // V(x^k), recomputed from the stored state
    double drift = 0.0;    // V(x^k) - V(x^{k+1})
    double bound = 0.0;    // required drift when asserted
    bool asserted = false;
    bool satisfied = true;
  };

  std::vector<Entry> entries;
  /// Asserted bounds missed by more than the 1e-9 drift tolerance.
  int violations = 0;
  double max_violation = 0.0;
  /// V increases beyond 1e-9 * (1 + |V|) on observational families.
  int observational_increases = 0;
  /// V increases beyond 1e-6 * (1 + |V|): genuine jumps, not asymptotic creep.
  int significant_increases = 0;
  /// Iterations started on the nondifferentiable set (some g_ij ~ 0).
  int tie_hits = 0;
  /// Quasi-Newton steps off the tie set where the penalty failed to strictly
  /// decrease (the semi-Lyapunov exception count).
  int strict_decrease_exceptions = 0;
  /// Mirror steps outside the certified curvature domain.
  int domain_violations = 0;
  /// Worst |stored V - recomputed V| relative discrepancy.
  double max_roundtrip_error = 0.0;

  bool all_asserted_satisfied() const { return violations == 0; }
};

/// Replays a finished trajectory: recomputes V from the stored states
/// (round-trip check against the recorded values), recomputes the
/// family-required drift bound at every iteration, and tallies violations.
DriftLedger monitor(const TrajectoryRecord& traj, const DynamicsSpec& spec,
                    const MeasurementSet& g, const PrivateCosts& f);

// ---------------------------------------------------------------------------
// Gradient and dual oracles
// ---------------------------------------------------------------------------

/// Max relative error between the analytic x-gradient of L(x, lambda) and
/// central finite differences, max_i |analytic - fd| / (1 + |analytic|).
/// Callers are expected to sample x away from ties (|g_ij| < 1e-7).
double fd_gradient_check(const Vec& x, const DualNetwork& lambda, const MeasurementSet& g,
                         const PrivateCosts& f, double h = 1e-5,
                         PairSumForm form = PairSumForm::SymmetricHalved);

/// Same check for the penalty objective Phi and its subgradient; x must
/// avoid the nondifferentiable set.
double fd_penalty_check(const Vec& x, const MeasurementSet& g, const PrivateCosts& f,
                        double h = 1e-5);

/// True when some pair sits within tol of the g_ij = 0 boundary.
bool near_tie(const Vec& x, const MeasurementSet& g, double tol = 1e-7);

struct DualOracleResult {
  DualNetwork lambda;
  std::vector<bool> tied;  // flat pair index; comparisons skip tied coordinates
  bool any_tie = false;
};

/// Exhaustive search over the 2^{n(n-1)} binary networks for the one
/// minimizing (Attract) or maximizing (Repel) L(x, .); n <= 4 only.
DualOracleResult bcd_dual_oracle(const Vec& x, const MeasurementSet& g, const PrivateCosts& f,
                                 NeighborhoodRule rule = NeighborhoodRule::AttractWhenClose,
                                 double tie_tol = 1e-9);

/// True when oracle and candidate agree on every untied coordinate.
bool dual_agrees_off_ties(const DualOracleResult& oracle, const DualNetwork& candidate);

// ---------------------------------------------------------------------------
// Equilibrium analysis
// ---------------------------------------------------------------------------

struct ClusterReport {
  struct Cluster {
    double value = 0.0;  // cluster mean
    int size = 0;
    double lo = 0.0, hi = 0.0;
  };
  std::vector<Cluster> clusters;
  /// Smallest nearest-member gap between adjacent clusters; +inf for a
  /// single cluster.
  double min_separation = 0.0;
  double residual = 0.0;  // ||dx|| of the last executed step
  bool diverged = false;
};

/// Single-linkage clustering of the final profile with the given gap
/// threshold. Diverged trajectories produce a report with no clusters.
ClusterReport analyze_equilibrium(const TrajectoryRecord& traj, double gap_threshold);

// ---------------------------------------------------------------------------
// Constant-step feasibility bound
// ---------------------------------------------------------------------------

struct EpsEquilibriumReport {
  std::optional<int> hit_iteration;  // first k with max_ij g_ij(x^k) <= eps
  double bound = 0.0;                // d_ub^2 n^2 G^2 / eps^2 iterations
  double d_upper = 0.0;              // witness distance upper bound on d(x0, X)
  double closest_violation = 0.0;    // min over k of max_ij g_ij(x^k)
  bool within_bound() const { return hit_iteration && *hit_iteration <= bound; }
};

/// Checks when the trajectory first enters the eps-equilibrium set
/// X_eps = {x : g_ij(x) <= eps for all pairs} against the constant-step
/// iteration bound computed from a feasible witness.
EpsEquilibriumReport eps_equilibrium_check(const TrajectoryRecord& traj, const MeasurementSet& g,
                                           double eps, double G, const Vec& feasible_witness);

// ---------------------------------------------------------------------------
// Declared-bound audit
// ---------------------------------------------------------------------------

struct SmoothnessAudit {
  double max_mixed = 0.0;  // max sampled |d^2 g / dx_i dx_j|
  double max_own = 0.0;    // max sampled |d^2 g / dx_i^2|
  double max_cost = 0.0;   // max sampled |f_i''|
  bool ok = false;
};

/// Sampling audit of the declared smoothness bound m on a state box. The
/// bound is never inferred; the audit only confirms or rejects it.
SmoothnessAudit audit_smoothness(const MeasurementSet& g, const PrivateCosts& f, double m,
                                 double lo, double hi, int samples, std::uint64_t seed);

}  // namespace statenet
