#include "statenet/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace statenet {

const char* family_name(Family f) {
  switch (f) {
    case Family::BcdMajorize: return "bcd_majorize";
    case Family::ExactQuadratic: return "exact_quadratic";
    case Family::Mirror: return "mirror";
    case Family::Asymmetric: return "asymmetric";
    case Family::Transfer: return "transfer";
    case Family::SubgradientSaddle: return "subgradient";
    case Family::QuasiNewton: return "quasi_newton";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  for (Family f : {Family::BcdMajorize, Family::ExactQuadratic, Family::Mirror, Family::Asymmetric,
                   Family::Transfer, Family::SubgradientSaddle, Family::QuasiNewton}) {
    if (name == family_name(f)) return f;
  }
  throw ConfigError("unknown dynamics family: " + name, {"dynamics.family"});
}

NeighborhoodRule default_rule(Family f) {
  switch (f) {
    case Family::SubgradientSaddle:
    case Family::QuasiNewton:
      return NeighborhoodRule::RepelWhenFar;
    default:
      return NeighborhoodRule::AttractWhenClose;
  }
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIters: return "max_iters";
    case RunStatus::Diverged: return "diverged";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// StepSchedule
// ---------------------------------------------------------------------------

StepSchedule StepSchedule::fixed(double t) {
  StepSchedule s;
  s.kind = Kind::Fixed;
  s.t = t;
  return s;
}

StepSchedule StepSchedule::diminishing(double c) {
  StepSchedule s;
  s.kind = Kind::DiminishingOverGradNorm;
  s.c = c;
  return s;
}

StepSchedule StepSchedule::constant_eps(double eps, int n, double G) {
  StepSchedule s;
  s.kind = Kind::ConstantEps;
  s.eps = eps;
  s.n = n;
  s.G = G;
  return s;
}

void StepSchedule::validate() const {
  switch (kind) {
    case Kind::DiminishingOverGradNorm:
      if (!(c > 0)) throw ConfigError("diminishing schedule needs c > 0", {"schedule.c"});
      break;
    case Kind::ConstantEps:
      if (!(eps > 0) || !(G > 0) || n < 1)
        throw ConfigError("constant-eps schedule needs eps > 0, declared G > 0 and n >= 1",
                          {"schedule.eps", "schedule.G"});
      break;
    case Kind::Fixed:
      if (!(t > 0)) throw ConfigError("fixed schedule needs t > 0", {"schedule.t"});
      break;
    case Kind::Unit:
      break;
  }
}

double StepSchedule::alpha(int k, double grad_norm) const {
  switch (kind) {
    case Kind::DiminishingOverGradNorm: {
      if (grad_norm == 0.0) return 0.0;  // equilibrium: declare zero step
      return (c / static_cast<double>(k + 1)) / grad_norm;
    }
    case Kind::ConstantEps:
      return eps / (static_cast<double>(n) * n * G * G);
    case Kind::Unit:
      return 1.0;
    case Kind::Fixed:
      return t;
  }
  return 1.0;
}

std::string StepSchedule::describe() const {
  switch (kind) {
    case Kind::DiminishingOverGradNorm: return "diminishing(c=" + std::to_string(c) + ")/||g||";
    case Kind::ConstantEps: return "constant eps/(n^2 G^2)";
    case Kind::Unit: return "unit";
    case Kind::Fixed: return "fixed(" + std::to_string(t) + ")";
  }
  return "?";
}

double ExactQuadraticSpec::drift_coefficient() const {
  switch (kind) {
    case Kind::HomogeneousHK: return 1.0;
    case Kind::GeometricMean: return 1.0;   // in log coordinates
    case Kind::NegativeWeights: return 0.5;
    case Kind::WeightedConsensus: return 0.0;
  }
  return 0.0;
}

LyapunovFamily DynamicsSpec::lyapunov_family() const {
  switch (family) {
    case Family::Asymmetric:
      return LyapunovFamily::AsymmetricMinSum;
    case Family::Transfer:
      return LyapunovFamily::TransferIntegral;
    case Family::SubgradientSaddle:
    case Family::QuasiNewton:
      return LyapunovFamily::Penalty;
    default:
      return LyapunovFamily::MajorizeLagrangian;
  }
}

void DynamicsSpec::validate(const MeasurementSet& g, const PrivateCosts& f) const {
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0", {"dynamics.max_iters"});
  if (g.size() != f.size()) throw ConfigError("measurement/cost size mismatch");
  schedule.validate();
  switch (family) {
    case Family::BcdMajorize:
    case Family::Asymmetric:
      if (!(m > 0)) throw ConfigError("smoothness m must be positive", {"dynamics.m"});
      break;
    case Family::Mirror:
      if (!mirror.has_value()) throw ConfigError("mirror family needs a mirror map");
      break;
    case Family::Transfer:
      if (!transfers) throw ConfigError("transfer family needs a transfer function set");
      if (!(m > 0)) throw ConfigError("smoothness m must be positive", {"dynamics.m"});
      if (!g.symmetric()) throw ConfigError("transfer family needs symmetric measurements");
      break;
    case Family::ExactQuadratic:
      if (exact.kind == ExactQuadraticSpec::Kind::WeightedConsensus) {
        const int n = g.size();
        if (exact.weights.size() != static_cast<std::size_t>(n) * n)
          throw ConfigError("weighted consensus needs an n x n weight matrix");
        for (int i = 0; i < n; ++i) {
          double row = 0.0;
          for (int j = 0; j < n; ++j) row += exact.weights[static_cast<std::size_t>(i) * n + j];
          if (std::abs(row - 1.0) > 1e-12)
            throw ConfigError("weighted consensus rows must sum to 1 including the self-weight");
        }
      }
      break;
    case Family::SubgradientSaddle:
    case Family::QuasiNewton:
      break;
  }
  if (family == Family::BcdMajorize && !g.symmetric())
    throw ConfigError("the majorized BCD family needs symmetric measurements");
}

// ---------------------------------------------------------------------------
// Step rules
// ---------------------------------------------------------------------------

Vec step_bcd_majorize(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double m,
                      const NeighborSets& neighbors) {
  Vec grad = lagrangian_grad_fixed_network(x, neighbors, g, f);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double deg1 = static_cast<double>(neighbors[i].size()) + 1.0;
    out[i] = x[i] - grad[i] / (2.0 * m * deg1);
  }
  return out;
}

Vec step_exact_quadratic(const Vec& x, const ExactQuadraticSpec& spec,
                         const NeighborSets& neighbors) {
  const std::size_t n = x.size();
  Vec out(n);
  switch (spec.kind) {
    case ExactQuadraticSpec::Kind::HomogeneousHK:
      for (std::size_t i = 0; i < n; ++i) {
        double s = x[i];
        for (int j : neighbors[i]) s += x[static_cast<std::size_t>(j)];
        out[i] = s / (static_cast<double>(neighbors[i].size()) + 1.0);
      }
      break;
    case ExactQuadraticSpec::Kind::NegativeWeights:
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j : neighbors[i]) s += x[static_cast<std::size_t>(j)];
        double deg = static_cast<double>(neighbors[i].size());
        out[i] = (deg * x[i] - s) / (deg + 1.0);
      }
      break;
    case ExactQuadraticSpec::Kind::GeometricMean:
      for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0)) throw EvaluationError("geometric averaging needs positive states");
        double s = std::log(x[i]);
        for (int j : neighbors[i]) s += std::log(x[static_cast<std::size_t>(j)]);
        out[i] = std::exp(s / (static_cast<double>(neighbors[i].size()) + 1.0));
      }
      break;
    case ExactQuadraticSpec::Kind::WeightedConsensus: {
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += spec.weights[i * n + j] * x[j];
        out[i] = s;
      }
      break;
    }
  }
  return out;
}

Vec step_mirror(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, const MirrorMap& map,
                const NeighborSets& neighbors) {
  Vec grad = lagrangian_grad_fixed_network(x, neighbors, g, f);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!map.in_domain(x[i])) throw EvaluationError("mirror step: state left the map domain");
    // Entropy map: multiplicative closed form, exact at zero gradient and
    // positive by construction.
    if (map.kind() == MirrorMap::Kind::NegativeEntropy) {
      out[i] = x[i] * std::exp(-grad[i]);
    } else {
      out[i] = map.grad_inverse(map.grad(x[i]) - grad[i]);
    }
    if (!std::isfinite(out[i])) throw EvaluationError("mirror step: inverse gradient failed");
  }
  return out;
}

Vec step_asymmetric(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double m,
                    const NeighborSets& neighbors) {
  const std::size_t n = x.size();
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int j : neighbors[i]) {
      s += g.d1(static_cast<int>(i), j, x[i], x[static_cast<std::size_t>(j)]);
    }
    // The duplicated-copy penalty cancels the f' term at y = x, so only the
    // measurement part drives the update.
    (void)f;
    out[i] = x[i] - s / (m * (static_cast<double>(neighbors[i].size()) + 1.0));
  }
  return out;
}

Vec step_transfer(const Vec& x, const MeasurementSet& g, const TransferFunctionSet& transfers,
                  double m, TransferForm form) {
  const int n = g.size();
  Vec out(x.size());
  for (int i = 0; i < n; ++i) {
    double weighted_grad = 0.0;  // sum_j f_ij(g_ij) * d g_ij / d x_i
    double weight_sum = 0.0;     // sum_j f_ij(g_ij)
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double xi = x[static_cast<std::size_t>(i)], xj = x[static_cast<std::size_t>(j)];
      double gij = g.checked_value(i, j, xi, xj);
      double w = transfers.f(i, j, gij);
      weight_sum += w;
      weighted_grad += w * g.d1(i, j, xi, xj);
    }
    double xi = x[static_cast<std::size_t>(i)];
    if (form == TransferForm::Eq5) {
      double denom = 2.0 * m * weight_sum;
      if (!(std::abs(denom) > 0))
        throw EvaluationError("transfer step: degenerate denominator (all transfer weights zero)");
      out[static_cast<std::size_t>(i)] = xi - weighted_grad / denom;
    } else {
      // Proof form: gradient carries the symmetry factor 2, majorizer
      // 2 + 4m * sum_j f_ij(g_ij) never degenerates.
      out[static_cast<std::size_t>(i)] = xi - 2.0 * weighted_grad / (2.0 + 4.0 * m * weight_sum);
    }
  }
  return out;
}

std::pair<Vec, double> step_subgradient(const Vec& x, const MeasurementSet& g,
                                        const PrivateCosts& f, const StepSchedule& schedule, int k,
                                        const NeighborSets& far_neighbors) {
  Vec sg = lagrangian_grad_fixed_network(x, far_neighbors, g, f);
  double alpha = schedule.alpha(k, norm2(sg));
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - alpha * sg[i];
  return {std::move(out), alpha};
}

Vec step_quasi_newton(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, double t_k,
                      const NeighborSets& far_neighbors) {
  Vec grad = lagrangian_grad_fixed_network(x, far_neighbors, g, f);
  DominatingDiagonal G =
      dominating_diagonal(x, far_neighbors, g, f, 0.0, DiagonalVariant::QuasiNewtonDiag);
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - t_k * grad[i] / G.diag[i];
  return out;
}

// ---------------------------------------------------------------------------
// Run loop
// ---------------------------------------------------------------------------

namespace {

bool state_ok(const Vec& x, double threshold) {
  for (double v : x) {
    if (!std::isfinite(v) || std::abs(v) > threshold) return false;
  }
  return true;
}

bool on_tie_set(const Vec& x, const MeasurementSet& g, double tol) {
  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j != i && std::abs(g.value(i, j, x[static_cast<std::size_t>(i)],
                                     x[static_cast<std::size_t>(j)])) <= tol) {
        return true;
      }
    }
  }
  return false;
}

Vec log_state(const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::log(x[i]);
  return y;
}

struct BoundInfo {
  double bound = 0.0;
  bool asserted = false;
};

}  // namespace

double TrajectoryRecord::residual() const {
  if (states.size() < 2) return 0.0;
  return norm2_diff(states[states.size() - 1], states[states.size() - 2]);
}

TrajectoryRecord run(const DynamicsSpec& spec, const Vec& x0, const MeasurementSet& g,
                     const PrivateCosts& f) {
  spec.validate(g, f);
  require_finite_state(x0, "run");
  if (static_cast<int>(x0.size()) != g.size()) throw ConfigError("run: x0 size mismatch");

  const NeighborhoodRule rule = spec.effective_rule();
  const LyapunovFamily vfam = spec.lyapunov_family();
  const double tol = spec.stop_tol < 0 ? 1e-9 * (1.0 + norm_inf(x0)) : spec.stop_tol;
  const int n = g.size();

  auto eval_v = [&](const Vec& x) { return lyapunov(x, g, f, vfam, spec.transfers.get()); };

  TrajectoryRecord rec;
  rec.family = spec.family;
  rec.rule = rule;
  rec.states.push_back(x0);
  rec.lyapunov.push_back(eval_v(x0));
  rec.status = RunStatus::MaxIters;

  Vec x = x0;
  for (int k = 0; k < spec.max_iters; ++k) {
    NeighborSets nb = neighborhoods(x, g, rule);

    Vec next;
    double alpha = 1.0;
    switch (spec.family) {
      case Family::BcdMajorize:
        next = step_bcd_majorize(x, g, f, spec.m, nb);
        break;
      case Family::ExactQuadratic:
        next = step_exact_quadratic(x, spec.exact, nb);
        break;
      case Family::Mirror:
        next = step_mirror(x, g, f, *spec.mirror, nb);
        break;
      case Family::Asymmetric:
        next = step_asymmetric(x, g, f, spec.m, nb);
        break;
      case Family::Transfer:
        next = step_transfer(x, g, *spec.transfers, spec.m, spec.transfer_form);
        break;
      case Family::SubgradientSaddle: {
        auto [s, a] = step_subgradient(x, g, f, spec.schedule, k, nb);
        next = std::move(s);
        alpha = a;
        break;
      }
      case Family::QuasiNewton: {
        alpha = spec.schedule.alpha(k, 1.0);
        if (spec.backtracking) {
          Vec grad = lagrangian_grad_fixed_network(x, nb, g, f);
          DominatingDiagonal Gd =
              dominating_diagonal(x, nb, g, f, 0.0, DiagonalVariant::QuasiNewtonDiag);
          double decrease = 0.0;  // g^T G^{-1} g
          for (std::size_t i = 0; i < x.size(); ++i) decrease += grad[i] * grad[i] / Gd.diag[i];
          double phi0 = rec.lyapunov.back();
          double t = alpha;
          for (int half = 0; half < 60; ++half) {
            next = step_quasi_newton(x, g, f, t, nb);
            if (penalty_phi(next, g, f) <= phi0 - 1e-4 * t * decrease) break;
            t *= 0.5;
          }
          alpha = t;
        } else {
          next = step_quasi_newton(x, g, f, alpha, nb);
        }
        break;
      }
    }

    StepLog log;
    log.step_size = alpha;
    log.tie_hit = (spec.family == Family::QuasiNewton || spec.family == Family::SubgradientSaddle)
                      ? on_tie_set(x, g, spec.tie_tol)
                      : false;

    std::vector<int> degs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) degs[static_cast<std::size_t>(i)] = static_cast<int>(nb[static_cast<std::size_t>(i)].size());

    if (!state_ok(next, spec.divergence_threshold)) {
      // Record the offending state when it is still representable; a
      // non-finite state is dropped and the run ends one step earlier.
      if (all_finite(next)) {
        rec.states.push_back(next);
        rec.lyapunov.push_back(eval_v(next));
        log.drift = rec.lyapunov[rec.lyapunov.size() - 2] - rec.lyapunov.back();
        rec.steps.push_back(log);
        rec.degrees.push_back(std::move(degs));
      }
      rec.status = RunStatus::Diverged;
      return rec;
    }
    rec.degrees.push_back(std::move(degs));

    double v_next = eval_v(next);
    log.drift = rec.lyapunov.back() - v_next;

    // Family-specific certified drift bound.
    BoundInfo b;
    switch (spec.family) {
      case Family::BcdMajorize:
        b = {spec.m * sq(norm2_diff(x, next)), true};
        break;
      case Family::ExactQuadratic: {
        double coeff = spec.exact.drift_coefficient();
        if (spec.exact.kind == ExactQuadraticSpec::Kind::GeometricMean) {
          b = {coeff * sq(norm2_diff(log_state(x), log_state(next))), true};
        } else {
          b = {coeff * sq(norm2_diff(x, next)), coeff > 0.0};
        }
        break;
      }
      case Family::Transfer:
        if (spec.transfer_form == TransferForm::ProofQ) {
          DominatingDiagonal Q = dominating_diagonal(x, nb, g, f, spec.m,
                                                     DiagonalVariant::TransferMajorize,
                                                     spec.transfers.get());
          double qn = 0.0;
          for (std::size_t i = 0; i < x.size(); ++i) qn += Q.diag[i] * sq(next[i] - x[i]);
          b = {0.5 * qn, true};
        }
        break;
      case Family::Mirror: {
        // Descent is certified only while the map curvature dominates
        // 2 m n on the step segment.
        double need = 2.0 * spec.m * static_cast<double>(n);
        bool ok = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
          double hi = std::max(std::abs(x[i]), std::abs(next[i]));
          double lo_curv = spec.mirror->kind() == MirrorMap::Kind::NegativeEntropy
                               ? spec.mirror->hessian(hi)
                               : spec.mirror->hessian(x[i]);
          if (lo_curv < need) ok = false;
        }
        log.domain_ok = ok;
        b = {0.0, ok};
        break;
      }
      case Family::Asymmetric:
      case Family::SubgradientSaddle:
        b = {0.0, false};  // observational
        break;
      case Family::QuasiNewton:
        // Semi-Lyapunov: strict decrease expected off the tie set; hits and
        // increases are counted by the monitor rather than asserted here.
        b = {0.0, spec.backtracking && !log.tie_hit};
        break;
    }
    log.bound = b.bound;
    log.bound_asserted = b.asserted;
    log.bound_ok = log.drift >= b.bound - 1e-9;

    rec.states.push_back(next);
    rec.lyapunov.push_back(v_next);
    rec.steps.push_back(log);

    double dx = norm2_diff(x, next);
    x = std::move(next);
    if (tol > 0 && dx < tol) {
      rec.status = RunStatus::Converged;
      return rec;
    }
  }
  return rec;
}

}  // namespace statenet
