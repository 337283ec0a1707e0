#include "statenet/flow.hpp"

#include <cmath>

namespace statenet {

double Transform::value(double s) const {
  switch (kind) {
    case Kind::Identity: return s;
    case Kind::Scaled: return scale * s;
    case Kind::Cube: return s * s * s;
  }
  return s;
}

double Transform::deriv(double s) const {
  switch (kind) {
    case Kind::Identity: return 1.0;
    case Kind::Scaled: return scale;
    case Kind::Cube: return 3.0 * s * s;
  }
  return 1.0;
}

double Transform::antiderivative(double s) const {
  switch (kind) {
    case Kind::Identity: return 0.5 * s * s;
    case Kind::Scaled: return 0.5 * scale * s * s;
    case Kind::Cube: return 0.25 * s * s * s * s;
  }
  return 0.5 * s * s;
}

double project_box(double a, double lambda) {
  if (lambda < -1e-12 || lambda > 1.0 + 1e-12)
    throw EvaluationError("project_box: lambda outside [0,1]");
  if (lambda >= 1.0) return std::min(0.0, a);
  if (lambda <= 0.0) return std::max(0.0, a);
  return a;
}

FlowRhs flow_rhs(const FlowState& s, const MeasurementSet& g, const PrivateCosts& f,
                 const VariableTransforms& tf) {
  const int n = g.size();
  require_finite_state(s.x, "flow_rhs");

  Vec u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    u[static_cast<std::size_t>(i)] = tf.p.value(s.x[static_cast<std::size_t>(i)]);
    if (!std::isfinite(u[static_cast<std::size_t>(i)]))
      throw EvaluationError("flow_rhs: non-finite transformed state");
  }

  FlowRhs out{Vec(static_cast<std::size_t>(n), 0.0), DualNetwork(n, 0.0)};
  for (int i = 0; i < n; ++i) {
    double di = f.d1(i, u[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double qij = tf.q.value(s.lambda.at(i, j));
      double qji = tf.q.value(s.lambda.at(j, i));
      // Both argument slots chained under the halved symmetric convention.
      di += 0.5 * (qij * g.d1(i, j, u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]) +
                   qji * g.d2(j, i, u[static_cast<std::size_t>(j)], u[static_cast<std::size_t>(i)]));
    }
    if (!std::isfinite(di)) throw EvaluationError("flow_rhs: non-finite state derivative");
    out.xdot[static_cast<std::size_t>(i)] = -di;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double gij = g.checked_value(i, j, u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]);
      out.lamdot.set(i, j, project_box(gij, s.lambda.at(i, j)));
    }
  }
  return out;
}

namespace {

FlowState euler_step(const FlowState& s, const MeasurementSet& g, const PrivateCosts& f, double dt,
                     const VariableTransforms& tf) {
  FlowRhs r = flow_rhs(s, g, f, tf);
  FlowState next = s;
  for (std::size_t i = 0; i < s.x.size(); ++i) next.x[i] = s.x[i] + dt * r.xdot[i];
  for (int k = 0; k < s.lambda.pair_count(); ++k)
    next.lambda.flat(k) = s.lambda.flat(k) + dt * r.lamdot.flat(k);
  next.lambda.clamp_unit_box();
  next.t = s.t + dt;
  return next;
}

FlowState rk4_step(const FlowState& s, const MeasurementSet& g, const PrivateCosts& f, double dt,
                   const VariableTransforms& tf) {
  // Stage derivatives are left unprojected; only the combined increment is
  // clamped back into the box.
  auto shifted = [&](const FlowRhs& r, double h) {
    FlowState z = s;
    for (std::size_t i = 0; i < s.x.size(); ++i) z.x[i] = s.x[i] + h * r.xdot[i];
    for (int k = 0; k < s.lambda.pair_count(); ++k) {
      z.lambda.flat(k) = std::min(1.0, std::max(0.0, s.lambda.flat(k) + h * r.lamdot.flat(k)));
    }
    return z;
  };
  FlowRhs k1 = flow_rhs(s, g, f, tf);
  FlowRhs k2 = flow_rhs(shifted(k1, 0.5 * dt), g, f, tf);
  FlowRhs k3 = flow_rhs(shifted(k2, 0.5 * dt), g, f, tf);
  FlowRhs k4 = flow_rhs(shifted(k3, dt), g, f, tf);

  FlowState next = s;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    next.x[i] = s.x[i] + dt / 6.0 * (k1.xdot[i] + 2 * k2.xdot[i] + 2 * k3.xdot[i] + k4.xdot[i]);
  }
  for (int k = 0; k < s.lambda.pair_count(); ++k) {
    next.lambda.flat(k) =
        s.lambda.flat(k) +
        dt / 6.0 * (k1.lamdot.flat(k) + 2 * k2.lamdot.flat(k) + 2 * k3.lamdot.flat(k) + k4.lamdot.flat(k));
  }
  next.lambda.clamp_unit_box();
  next.t = s.t + dt;
  return next;
}

}  // namespace

FlowTrajectory integrate(const FlowState& s0, const MeasurementSet& g, const PrivateCosts& f,
                         double dt, double T, FlowMethod method, int stride,
                         const VariableTransforms& tf, double divergence_threshold) {
  if (!(dt > 0) || !(T >= dt)) throw ConfigError("integrate needs dt > 0 and T >= dt");
  if (stride < 1) throw ConfigError("integrate needs stride >= 1");
  if (!s0.lambda.in_unit_box()) throw ConfigError("integrate: lambda0 outside [0,1]");

  FlowTrajectory out;
  out.dt = dt;
  out.samples.push_back({s0.t, s0.x, s0.lambda});

  const long steps = static_cast<long>(std::llround(T / dt));
  FlowState s = s0;
  for (long k = 0; k < steps; ++k) {
    s = (method == FlowMethod::ProjectedEuler) ? euler_step(s, g, f, dt, tf)
                                               : rk4_step(s, g, f, dt, tf);
    if (norm_inf(s.x) > divergence_threshold || !all_finite(s.x)) {
      out.diverged = true;
      break;
    }
    if ((k + 1) % stride == 0 || k + 1 == steps) out.samples.push_back({s.t, s.x, s.lambda});
  }
  return out;
}

double continuous_lyapunov(const FlowState& s, const Vec& xbar, const DualNetwork& lbar,
                           const VariableTransforms& tf) {
  if (s.x.size() != xbar.size() || s.lambda.pair_count() != lbar.pair_count())
    throw EvaluationError("continuous_lyapunov: saddle dimension mismatch");

  // D_P(a, b) = P(a) - P(b) - p(b)(a - b); the antiderivative reference
  // point cancels inside the Bregman difference.
  auto breg = [](const Transform& t, double a, double b) {
    return t.antiderivative(a) - t.antiderivative(b) - t.value(b) * (a - b);
  };

  double v = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) v += breg(tf.p, s.x[i], xbar[i]);
  for (int k = 0; k < s.lambda.pair_count(); ++k) v += breg(tf.q, s.lambda.flat(k), lbar.flat(k));
  return v;
}

FlowState find_saddle_by_integration(const FlowState& s0, const MeasurementSet& g,
                                     const PrivateCosts& f, double dt, long horizon_steps,
                                     double tol, const VariableTransforms& tf) {
  FlowState s = s0;
  for (long k = 0; k < horizon_steps; ++k) s = euler_step(s, g, f, dt, tf);
  FlowRhs r = flow_rhs(s, g, f, tf);
  double resid = norm2(r.xdot);
  for (int k = 0; k < s.lambda.pair_count(); ++k) resid = std::max(resid, std::abs(r.lamdot.flat(k)));
  if (resid >= tol) {
    throw EvaluationError("saddle search did not settle: residual " + std::to_string(resid) +
                          " after " + std::to_string(horizon_steps) + " steps");
  }
  return s;
}

}  // namespace statenet
