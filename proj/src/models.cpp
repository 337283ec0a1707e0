#include "statenet/models.hpp"

#include <cmath>

namespace statenet {

double PresetParams::scalar(const std::string& key, double fallback) const {
  auto it = scalars.find(key);
  return it == scalars.end() ? fallback : it->second;
}

double PresetParams::require_scalar(const std::string& key) const {
  auto it = scalars.find(key);
  if (it == scalars.end()) throw ConfigError("preset parameter missing: " + key, {"preset." + key});
  return it->second;
}

const Vec& PresetParams::require_vector(const std::string& key) const {
  auto it = vectors.find(key);
  if (it == vectors.end()) throw ConfigError("preset parameter missing: " + key, {"preset." + key});
  return it->second;
}

namespace {

double positive_scalar(const PresetParams& p, const std::string& key, double fallback = -1.0) {
  double v = fallback > 0 ? p.scalar(key, fallback) : p.require_scalar(key);
  if (!(v > 0)) throw ConfigError("preset parameter must be positive: " + key, {"preset." + key});
  return v;
}

ModelPreset hk_base(const std::string& name, int n, double eps) {
  ModelPreset m;
  m.name = name;
  auto g = std::make_shared<UniformPolyMeasurements>(n, Poly2::quadratic_gap(eps), true);
  g->declare_smoothness(1.0);
  m.g = g;
  m.f = PrivateCosts::zero(n);
  m.rule = NeighborhoodRule::AttractWhenClose;
  m.confidence_eps = eps;
  m.cluster_gap = 0.5 * eps;
  return m;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"homogeneous_hk",         "lazy_hk",       "weighted_consensus",
          "geometric_averaging",    "entropy_multiplicative", "complement_hk",
          "heterogeneous_hk",       "polarization"};
}

ModelPreset build_preset(const std::string& name, int n, const PresetParams& params) {
  if (n < 1) throw ConfigError("preset needs n >= 1", {"n"});

  if (name == "homogeneous_hk") {
    double eps = positive_scalar(params, "epsilon");
    ModelPreset m = hk_base(name, n, eps);
    m.dynamics.family = Family::ExactQuadratic;
    m.dynamics.exact.kind = ExactQuadraticSpec::Kind::HomogeneousHK;
    m.dynamics.m = 1.0;
    return m;
  }

  if (name == "lazy_hk") {
    double eps = positive_scalar(params, "epsilon");
    ModelPreset m = hk_base(name, n, eps);
    m.dynamics.family = Family::BcdMajorize;
    m.dynamics.m = 1.0;
    return m;
  }

  if (name == "weighted_consensus") {
    // Edges carry g_ij = (a_ij/2)(x_i-x_j)^2 - K with a large K, so the
    // fixed graph is the neighborhood for every reachable state; non-edges
    // carry a positive constant.
    if (params.matrix.size() != static_cast<std::size_t>(n) * n)
      throw ConfigError("weighted_consensus needs an n x n 'weights' matrix", {"preset.weights"});
    double K = positive_scalar(params, "gap_constant", 1e6);

    auto g = std::make_shared<PairTableMeasurements>(n, true);
    double max_w = 0.0;
    for (int i = 0; i < n; ++i) {
      double row = 0.0;
      for (int j = 0; j < n; ++j) {
        double w = params.matrix[static_cast<std::size_t>(i) * n + j];
        row += w;
        if (j == i) continue;
        double wt = params.matrix[static_cast<std::size_t>(j) * n + i];
        if (std::abs(w - wt) > 1e-12)
          throw ConfigError("weighted_consensus weights must be symmetric off the diagonal");
        if (w < 0) throw ConfigError("weighted_consensus weights must be nonnegative");
        if (w > 0) {
          g->set(i, j, Poly2::scaled_square_gap(0.5 * w, -K));
          max_w = std::max(max_w, w);
        } else {
          g->set(i, j, Poly2{0, 0, 0, 0, 0, 1.0});
        }
      }
      if (std::abs(row - 1.0) > 1e-12)
        throw ConfigError("weighted_consensus rows must sum to 1 including the self-weight");
    }
    g->declare_smoothness(std::max(max_w, 1e-12));

    ModelPreset m;
    m.name = name;
    m.g = g;
    m.f = PrivateCosts::zero(n);
    m.rule = NeighborhoodRule::AttractWhenClose;
    m.dynamics.family = Family::ExactQuadratic;
    m.dynamics.exact.kind = ExactQuadraticSpec::Kind::WeightedConsensus;
    m.dynamics.exact.weights = params.matrix;
    return m;
  }

  if (name == "geometric_averaging") {
    double eps = positive_scalar(params, "epsilon");
    auto g = std::make_shared<LogGapMeasurements>(n, eps);
    ModelPreset m;
    m.name = name;
    m.g = g;
    m.f = PrivateCosts::zero(n);
    m.rule = NeighborhoodRule::AttractWhenClose;
    m.dynamics.family = Family::ExactQuadratic;
    m.dynamics.exact.kind = ExactQuadraticSpec::Kind::GeometricMean;
    m.confidence_eps = eps;  // in log coordinates
    m.init_floor = 1.0;
    m.audit_lo = 1.0;
    return m;
  }

  if (name == "entropy_multiplicative") {
    double eps = positive_scalar(params, "epsilon");
    ModelPreset m = hk_base(name, n, eps);
    m.name = name;
    m.dynamics.family = Family::Mirror;
    m.dynamics.mirror = MirrorMap::negative_entropy();
    m.dynamics.m = 1.0;
    m.init_floor = 0.0;  // entropy map needs positive states
    m.audit_lo = 1e-6;
    return m;
  }

  if (name == "complement_hk") {
    double eps = positive_scalar(params, "epsilon");
    ModelPreset m = hk_base(name, n, eps);
    m.rule = NeighborhoodRule::RepelWhenFar;
    m.dynamics.family = Family::QuasiNewton;
    m.dynamics.rule = NeighborhoodRule::RepelWhenFar;
    m.dynamics.schedule = StepSchedule::unit();
    return m;
  }

  if (name == "heterogeneous_hk") {
    const Vec& eps_i = params.require_vector("epsilon_i");
    if (static_cast<int>(eps_i.size()) != n)
      throw ConfigError("heterogeneous_hk needs one epsilon per agent", {"preset.epsilon_i"});
    Vec offsets(eps_i.size());
    for (std::size_t i = 0; i < eps_i.size(); ++i) {
      if (eps_i[i] < 0) throw ConfigError("confidence bounds must be nonnegative", {"preset.epsilon_i"});
      offsets[i] = 0.5 * eps_i[i] * eps_i[i];
    }
    auto g = std::make_shared<PerAgentOffsetMeasurements>(
        Poly2{0.5, 0.5, -1.0, 0.0, 0.0, 0.0}, std::move(offsets));
    g->declare_smoothness(1.0);

    ModelPreset m;
    m.name = name;
    m.g = g;
    // Quadratic Bregman penalty map; enters the theorem hypothesis, not the
    // update itself.
    m.f = PrivateCosts::uniform_quadratic(n, 1.0);
    m.rule = NeighborhoodRule::AttractWhenClose;
    m.dynamics.family = Family::Asymmetric;
    m.dynamics.m = 1.0;
    double max_eps = 0.0;
    for (double e : eps_i) max_eps = std::max(max_eps, e);
    m.confidence_eps = max_eps;
    m.cluster_gap = max_eps > 0 ? 0.5 * max_eps : 1.0;
    return m;
  }

  if (name == "polarization") {
    double threshold = params.scalar("threshold", 1.0);
    auto g = std::make_shared<UniformPolyMeasurements>(n, Poly2::product_threshold(threshold), true);
    g->declare_smoothness(1.0);
    ModelPreset m;
    m.name = name;
    m.g = g;
    m.f = PrivateCosts::uniform_quadratic(n, 1.0);
    m.rule = NeighborhoodRule::AttractWhenClose;
    m.dynamics.family = Family::ExactQuadratic;
    m.dynamics.exact.kind = ExactQuadraticSpec::Kind::NegativeWeights;
    m.dynamics.m = 1.0;
    // Not convex, not bounded below: only monotone-V monitoring is enabled
    // and divergence is an expected outcome.
    m.may_diverge = true;
    m.cluster_gap = 1.0;
    m.audit_lo = -1e6;
    m.audit_hi = 1e6;
    return m;
  }

  throw ConfigError("unknown preset: " + name, {"preset.name"});
}

}  // namespace statenet
