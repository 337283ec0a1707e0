#pragma once

#include <vector>

#include "statenet/measurement.hpp"

namespace statenet {

using NeighborSets = std::vector<std::vector<int>>;

/// N_i(x) under the given rule. Pure and deterministic; neighbor lists
/// come back sorted by agent index.
NeighborSets neighborhoods(const Vec& x, const MeasurementSet& g, NeighborhoodRule rule);

/// The network implied by the state: lambda_ij = 1 exactly when j is a
/// neighbor of i. Coincides with the argmin (Attract) / argmax (Repel)
/// of the Lagrangian over [0,1]^{n(n-1)} at fixed x.
DualNetwork dual_from_state(const Vec& x, const MeasurementSet& g, NeighborhoodRule rule);

DualNetwork dual_from_neighbors(int n, const NeighborSets& neighbors);

}  // namespace statenet
