#pragma once

#include <map>
#include <string>

#include "statenet/dynamics.hpp"

namespace statenet {

/// Scalar/vector/matrix parameters for a named preset; maps keep the
/// config-file schema flat.
struct PresetParams {
  std::map<std::string, double> scalars;
  std::map<std::string, Vec> vectors;
  std::vector<double> matrix;  // row-major n x n, weighted_consensus only

  double scalar(const std::string& key, double fallback) const;
  double require_scalar(const std::string& key) const;
  const Vec& require_vector(const std::string& key) const;
};

/// A fully wired model: measurements, private costs, edge rule and the
/// recommended dynamics, plus the bookkeeping the harness needs.
struct ModelPreset {
  std::string name;
  MeasurementPtr g;
  PrivateCosts f = PrivateCosts::zero(1);
  NeighborhoodRule rule = NeighborhoodRule::AttractWhenClose;
  DynamicsSpec dynamics;

  /// Confidence radius for cluster-separation checks (HK-type presets).
  std::optional<double> confidence_eps;
  /// Single-linkage gap threshold for the cluster report; defaults to
  /// confidence_eps/2 when present.
  std::optional<double> cluster_gap;
  /// State box on which the declared smoothness bound is audited.
  double audit_lo = -100.0, audit_hi = 100.0;
  /// Initial states must exceed this value (geometric averaging needs > 1).
  std::optional<double> init_floor;
  /// Convergence assertions disabled (divergence is an expected outcome).
  bool may_diverge = false;

  int size() const { return g->size(); }
};

/// Known preset names:
///   homogeneous_hk, lazy_hk, weighted_consensus, geometric_averaging,
///   entropy_multiplicative, complement_hk, heterogeneous_hk, polarization.
/// Unknown names and out-of-range parameters raise ConfigError.
ModelPreset build_preset(const std::string& name, int n, const PresetParams& params);

std::vector<std::string> preset_names();

}  // namespace statenet
