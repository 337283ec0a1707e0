#include "statenet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "statenet/rng.hpp"

namespace statenet {

namespace {

Vec log_state(const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::log(x[i]);
  return y;
}

}  // namespace

DriftLedger monitor(const TrajectoryRecord& traj, const DynamicsSpec& spec,
                    const MeasurementSet& g, const PrivateCosts& f) {
  const LyapunovFamily vfam = spec.lyapunov_family();
  DriftLedger ledger;
  if (traj.states.empty()) return ledger;

  Vec v(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    v[k] = lyapunov(traj.states[k], g, f, vfam, spec.transfers.get());
    if (k < traj.lyapunov.size()) {
      double rel = std::abs(v[k] - traj.lyapunov[k]) / (1.0 + std::abs(v[k]));
      ledger.max_roundtrip_error = std::max(ledger.max_roundtrip_error, rel);
    }
  }

  for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
    const Vec& x = traj.states[k];
    const Vec& next = traj.states[k + 1];
    const StepLog& log = traj.steps[k];

    DriftLedger::Entry e;
    e.v = v[k];
    e.drift = v[k] - v[k + 1];

    NeighborSets nb = neighborhoods(x, g, traj.rule);
    switch (spec.family) {
      case Family::BcdMajorize:
        e.bound = spec.m * sq(norm2_diff(x, next));
        e.asserted = true;
        break;
      case Family::ExactQuadratic: {
        double coeff = spec.exact.drift_coefficient();
        if (spec.exact.kind == ExactQuadraticSpec::Kind::GeometricMean) {
          e.bound = coeff * sq(norm2_diff(log_state(x), log_state(next)));
          e.asserted = true;
        } else {
          e.bound = coeff * sq(norm2_diff(x, next));
          e.asserted = coeff > 0.0;
        }
        break;
      }
      case Family::Transfer:
        if (spec.transfer_form == TransferForm::ProofQ) {
          DominatingDiagonal Q = dominating_diagonal(
              x, nb, g, f, spec.m, DiagonalVariant::TransferMajorize, spec.transfers.get());
          double qn = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) qn += Q.diag[i] * sq(next[i] - x[i]);
          e.bound = 0.5 * qn;
          e.asserted = true;
        }
        break;
      case Family::Mirror:
        e.asserted = log.domain_ok;
        if (!log.domain_ok) ++ledger.domain_violations;
        break;
      case Family::QuasiNewton:
        e.asserted = spec.backtracking && !log.tie_hit;
        break;
      case Family::Asymmetric:
      case Family::SubgradientSaddle:
        e.asserted = false;
        break;
    }

    e.satisfied = e.drift >= e.bound - 1e-9;
    if (e.asserted && !e.satisfied) {
      ++ledger.violations;
      ledger.max_violation = std::max(ledger.max_violation, e.bound - e.drift);
    }

    double rel9 = 1e-9 * (1.0 + std::abs(e.v));
    double rel6 = 1e-6 * (1.0 + std::abs(e.v));
    if (e.drift < -rel9) ++ledger.observational_increases;
    if (e.drift < -rel6) ++ledger.significant_increases;
    if (log.tie_hit) ++ledger.tie_hits;
    if (spec.family == Family::QuasiNewton && !log.tie_hit && e.drift < -rel9)
      ++ledger.strict_decrease_exceptions;

    ledger.entries.push_back(e);
  }
  return ledger;
}

double fd_gradient_check(const Vec& x, const DualNetwork& lambda, const MeasurementSet& g,
                         const PrivateCosts& f, double h, PairSumForm form) {
  Vec analytic = lagrangian_grad_full(x, lambda, g, f, form);
  double worst = 0.0;
  Vec xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    double up = lagrangian_value(xp, lambda, g, f, form);
    xp[i] = x[i] - h;
    double dn = lagrangian_value(xp, lambda, g, f, form);
    xp[i] = x[i];
    double fd = (up - dn) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic[i] - fd) / (1.0 + std::abs(analytic[i])));
  }
  return worst;
}

double fd_penalty_check(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double h) {
  Vec analytic = penalty_subgradient(x, g, f);
  double worst = 0.0;
  Vec xp = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    double up = penalty_phi(xp, g, f);
    xp[i] = x[i] - h;
    double dn = penalty_phi(xp, g, f);
    xp[i] = x[i];
    double fd = (up - dn) / (2.0 * h);
    worst = std::max(worst, std::abs(analytic[i] - fd) / (1.0 + std::abs(analytic[i])));
  }
  return worst;
}

bool near_tie(const Vec& x, const MeasurementSet& g, double tol) {
  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i && std::abs(g.value(i, j, x[static_cast<std::size_t>(i)],
                                     x[static_cast<std::size_t>(j)])) < tol) {
        return true;
      }
    }
  }
  return false;
}

DualOracleResult bcd_dual_oracle(const Vec& x, const MeasurementSet& g, const PrivateCosts& f,
                                 NeighborhoodRule rule, double tie_tol) {
  const int n = g.size();
  if (n > 4) throw EvaluationError("bcd_dual_oracle is exhaustive; n <= 4 only");
  const int pairs = n * (n - 1);
  const bool minimize = (rule == NeighborhoodRule::AttractWhenClose);

  DualOracleResult out{DualNetwork(n), std::vector<bool>(static_cast<std::size_t>(pairs), false),
                       false};

  // Tie detection: a coordinate with g_ij = 0 leaves L unchanged either way.
  {
    int k = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        double gij = g.checked_value(i, j, x[static_cast<std::size_t>(i)],
                                     x[static_cast<std::size_t>(j)]);
        if (std::abs(gij) <= tie_tol) {
          out.tied[static_cast<std::size_t>(k)] = true;
          out.any_tie = true;
        }
        ++k;
      }
    }
  }

  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  for (std::uint32_t mask = 0; mask < (1u << pairs); ++mask) {
    DualNetwork lam(n);
    for (int k = 0; k < pairs; ++k) lam.flat(k) = (mask >> k) & 1u ? 1.0 : 0.0;
    double val = lagrangian_value(x, lam, g, f, PairSumForm::SymmetricHalved);
    if (minimize ? val < best : val > best) {
      best = val;
      best_mask = mask;
    }
  }
  for (int k = 0; k < pairs; ++k) out.lambda.flat(k) = (best_mask >> k) & 1u ? 1.0 : 0.0;
  return out;
}

bool dual_agrees_off_ties(const DualOracleResult& oracle, const DualNetwork& candidate) {
  if (oracle.lambda.pair_count() != candidate.pair_count()) return false;
  for (int k = 0; k < candidate.pair_count(); ++k) {
    if (oracle.tied[static_cast<std::size_t>(k)]) continue;
    if (oracle.lambda.flat(k) != candidate.flat(k)) return false;
  }
  return true;
}

ClusterReport analyze_equilibrium(const TrajectoryRecord& traj, double gap_threshold) {
  ClusterReport report;
  report.residual = traj.residual();
  if (traj.status == RunStatus::Diverged) {
    report.diverged = true;
    return report;
  }

  Vec xs = traj.final_state();
  std::sort(xs.begin(), xs.end());

  ClusterReport::Cluster cur{xs[0], 1, xs[0], xs[0]};
  double min_sep = std::numeric_limits<double>::infinity();
  double sum = xs[0];
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] - cur.hi > gap_threshold) {
      cur.value = sum / cur.size;
      report.clusters.push_back(cur);
      min_sep = std::min(min_sep, xs[i] - cur.hi);
      cur = ClusterReport::Cluster{xs[i], 1, xs[i], xs[i]};
      sum = xs[i];
    } else {
      cur.hi = xs[i];
      sum += xs[i];
      ++cur.size;
    }
  }
  cur.value = sum / cur.size;
  report.clusters.push_back(cur);
  report.min_separation = min_sep;
  return report;
}

EpsEquilibriumReport eps_equilibrium_check(const TrajectoryRecord& traj, const MeasurementSet& g,
                                           double eps, double G, const Vec& feasible_witness) {
  if (!(eps > 0) || !(G > 0)) throw ConfigError("eps_equilibrium_check needs eps > 0, G > 0");
  const int n = g.size();

  // The witness must actually be feasible, otherwise the bound is vacuous.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i &&
          g.checked_value(i, j, feasible_witness[static_cast<std::size_t>(i)],
                          feasible_witness[static_cast<std::size_t>(j)]) > 1e-12) {
        throw ConfigError("eps_equilibrium_check: witness is not feasible");
      }
    }
  }

  EpsEquilibriumReport report;
  report.d_upper = norm2_diff(traj.initial(), feasible_witness);
  report.bound = report.d_upper * report.d_upper * static_cast<double>(n) * n * G * G / (eps * eps);
  report.closest_violation = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const Vec& x = traj.states[k];
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j != i) {
          worst = std::max(worst, g.checked_value(i, j, x[static_cast<std::size_t>(i)],
                                                  x[static_cast<std::size_t>(j)]));
        }
      }
    }
    report.closest_violation = std::min(report.closest_violation, worst);
    if (worst <= eps) {
      report.hit_iteration = static_cast<int>(k);
      break;
    }
  }
  return report;
}

SmoothnessAudit audit_smoothness(const MeasurementSet& g, const PrivateCosts& f, double m,
                                 double lo, double hi, int samples, std::uint64_t seed) {
  Rng rng(seed);
  const int n = g.size();
  SmoothnessAudit audit;
  for (int s = 0; s < samples; ++s) {
    double a = rng.uniform(lo, hi);
    double b = rng.uniform(lo, hi);
    int i = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(n));
    int j = static_cast<int>(rng.raw() % static_cast<std::uint64_t>(n));
    if (j == i) j = (j + 1) % n;
    if (n > 1) {
      audit.max_mixed = std::max(audit.max_mixed, std::abs(g.d12(i, j, a, b)));
      audit.max_own = std::max(audit.max_own, std::abs(g.d11(i, j, a, b)));
    }
    audit.max_cost = std::max(audit.max_cost, std::abs(f.d2(i, a)));
  }
  double tol = 1e-9 * (1.0 + m);
  audit.ok = audit.max_mixed <= m + tol && audit.max_own <= m + tol && audit.max_cost <= m + tol;
  return audit;
}

}  // namespace statenet
