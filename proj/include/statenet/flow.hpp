#pragma once

#include "statenet/lagrangian.hpp"

namespace statenet {

/// Continuous nondecreasing coordinate transform s -> value(s) with
/// value(0) = 0, a derivative, and a closed-form antiderivative from 0.
struct Transform {
  enum class Kind { Identity, Scaled, Cube };

  Kind kind = Kind::Identity;
  double scale = 1.0;

  static Transform identity() { return {}; }
  static Transform scaled(double c) { return {Kind::Scaled, c}; }
  static Transform cube() { return {Kind::Cube, 1.0}; }

  double value(double s) const;
  double deriv(double s) const;
  double antiderivative(double s) const;  // int_0^s value
};

/// State transform p (per agent) and network transform q (per pair), shared
/// across agents/pairs. Identity is the standard saddle flow.
struct VariableTransforms {
  Transform p = Transform::identity();
  Transform q = Transform::identity();
};

struct FlowState {
  Vec x;
  DualNetwork lambda;
  double t = 0.0;

  FlowState(Vec x0, DualNetwork l0, double t0 = 0.0)
      : x(std::move(x0)), lambda(std::move(l0)), t(t0) {}
};

/// [a]^{[0,1]}_lambda: zeroes the outward component of the network velocity
/// at the box faces, passes it through in the interior.
double project_box(double a, double lambda);

struct FlowRhs {
  Vec xdot;
  DualNetwork lamdot;
};

/// Saddle flow of the shared Lagrangian, gradients taken in transformed
/// coordinates:
///   xdot_i   = -f_i'(u_i) - sum_j ((q(l_ij)+q(l_ji))/2) dg_ij/du_i,  u = p(x)
///   lamdot_ij = [ g_ij(u_i, u_j) ]^{[0,1]}_{l_ij}
/// The symmetric halved pair convention of the discrete module is carried
/// into the x block; the network block follows the unhalved per-pair
/// measurement, so identity transforms reproduce lamdot = [g_ij]_lambda.
FlowRhs flow_rhs(const FlowState& s, const MeasurementSet& g, const PrivateCosts& f,
                 const VariableTransforms& tf = {});

enum class FlowMethod { ProjectedEuler, ProjectedRK4 };

struct FlowSample {
  double t;
  Vec x;
  DualNetwork lambda;
};

struct FlowTrajectory {
  std::vector<FlowSample> samples;
  bool diverged = false;
  double dt = 0.0;

  const FlowSample& final_sample() const { return samples.back(); }
};

/// Fixed-step integration of the projected flow; lambda is clamped to the
/// unit box after every step, so the box constraint holds exactly. Samples
/// are recorded every `stride` steps (>= 1, plus the initial and final
/// states). Deterministic for fixed inputs.
FlowTrajectory integrate(const FlowState& s0, const MeasurementSet& g, const PrivateCosts& f,
                         double dt, double T, FlowMethod method = FlowMethod::ProjectedEuler,
                         int stride = 1, const VariableTransforms& tf = {},
                         double divergence_threshold = 1e12);

/// Bregman distance to a saddle point (xbar, lbar):
///   V = sum_i D_{P_i}(x_i, xbar_i) + sum_{i != j} D_{Q_ij}(l_ij, lbar_ij),
/// with P, Q the antiderivatives of the transforms. Zero at the saddle,
/// nonnegative by monotonicity.
double continuous_lyapunov(const FlowState& s, const Vec& xbar, const DualNetwork& lbar,
                           const VariableTransforms& tf = {});

/// Long-horizon saddle search for instances without an analytic saddle:
/// integrates to T = horizon_steps * dt and verifies ||rhs|| < tol at the
/// end point. Throws EvaluationError when the residual check fails.
FlowState find_saddle_by_integration(const FlowState& s0, const MeasurementSet& g,
                                     const PrivateCosts& f, double dt, long horizon_steps,
                                     double tol = 1e-8, const VariableTransforms& tf = {});

}  // namespace statenet
