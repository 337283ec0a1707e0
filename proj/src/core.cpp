#include "statenet/core.hpp"

namespace statenet {

NeighborSets neighborhoods(const Vec& x, const MeasurementSet& g, NeighborhoodRule rule) {
  require_finite_state(x, "neighborhoods");
  const int n = g.size();
  if (static_cast<int>(x.size()) != n) throw EvaluationError("neighborhoods: state size mismatch");

  NeighborSets sets(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double v = g.checked_value(i, j, x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
      bool edge = (rule == NeighborhoodRule::AttractWhenClose) ? (v <= 0.0) : (v > 0.0);
      if (edge) sets[static_cast<std::size_t>(i)].push_back(j);
    }
  }
  return sets;
}

DualNetwork dual_from_neighbors(int n, const NeighborSets& neighbors) {
  DualNetwork lam(n, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j : neighbors[static_cast<std::size_t>(i)]) lam.set(i, j, 1.0);
  }
  return lam;
}

DualNetwork dual_from_state(const Vec& x, const MeasurementSet& g, NeighborhoodRule rule) {
  return dual_from_neighbors(g.size(), neighborhoods(x, g, rule));
}

}  // namespace statenet
