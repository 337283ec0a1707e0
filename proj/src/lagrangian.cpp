#include "statenet/lagrangian.hpp"

#include <algorithm>
#include <cmath>

namespace statenet {

double lagrangian_value(const Vec& x, const DualNetwork& lambda, const MeasurementSet& g,
                        const PrivateCosts& f, PairSumForm form) {
  require_finite_state(x, "lagrangian_value");
  const int n = g.size();
  if (!lambda.in_unit_box(1e-12)) throw EvaluationError("lagrangian_value: lambda outside [0,1]");

  double pair_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double lij = lambda.at(i, j);
      if (lij == 0.0) continue;
      pair_sum += lij * g.checked_value(i, j, x[static_cast<std::size_t>(i)],
                                        x[static_cast<std::size_t>(j)]);
    }
  }
  double w = (form == PairSumForm::SymmetricHalved) ? 0.5 : 1.0;
  return f.total(x) + w * pair_sum;
}

Vec lagrangian_grad_fixed_network(const Vec& x, const NeighborSets& neighbors,
                                  const MeasurementSet& g, const PrivateCosts& f) {
  require_finite_state(x, "lagrangian_grad");
  const int n = g.size();
  Vec grad(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double gi = f.d1(i, x[static_cast<std::size_t>(i)]);
    for (int j : neighbors[static_cast<std::size_t>(i)]) {
      gi += g.d1(i, j, x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
    }
    grad[static_cast<std::size_t>(i)] = gi;
  }
  return grad;
}

Vec lagrangian_grad_full(const Vec& x, const DualNetwork& lambda, const MeasurementSet& g,
                         const PrivateCosts& f, PairSumForm form) {
  require_finite_state(x, "lagrangian_grad_full");
  const int n = g.size();
  const double w = (form == PairSumForm::SymmetricHalved) ? 0.5 : 1.0;
  Vec grad(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double gi = f.d1(i, x[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double xi = x[static_cast<std::size_t>(i)], xj = x[static_cast<std::size_t>(j)];
      gi += w * lambda.at(i, j) * g.d1(i, j, xi, xj);
      gi += w * lambda.at(j, i) * g.d2(j, i, xj, xi);
    }
    grad[static_cast<std::size_t>(i)] = gi;
  }
  return grad;
}

DominatingDiagonal dominating_diagonal(const Vec& x, const NeighborSets& neighbors,
                                       const MeasurementSet& g, const PrivateCosts& f, double m,
                                       DiagonalVariant variant,
                                       const TransferFunctionSet* transfers) {
  const int n = g.size();
  DominatingDiagonal out{Vec(static_cast<std::size_t>(n), 0.0), variant};

  for (int i = 0; i < n; ++i) {
    const auto& Ni = neighbors[static_cast<std::size_t>(i)];
    double deg1 = static_cast<double>(Ni.size()) + 1.0;
    double d = 0.0;
    switch (variant) {
      case DiagonalVariant::MajorizeSmooth:
        d = 2.0 * m * deg1;
        break;
      case DiagonalVariant::ExactQuadratic:
        d = deg1;
        break;
      case DiagonalVariant::AsymmetricSmooth:
        d = m * deg1;
        break;
      case DiagonalVariant::TransferMajorize: {
        if (transfers == nullptr)
          throw EvaluationError("transfer-majorize diagonal needs a transfer function set");
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          double gij = g.checked_value(i, j, x[static_cast<std::size_t>(i)],
                                       x[static_cast<std::size_t>(j)]);
          s += transfers->f(i, j, gij);
        }
        d = 2.0 + 4.0 * m * s;
        break;
      }
      case DiagonalVariant::QuasiNewtonDiag: {
        double h = f.d2(i, x[static_cast<std::size_t>(i)]);
        for (int j : Ni) {
          h += g.d11(i, j, x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]);
        }
        d = 1.0 + h;
        break;
      }
    }
    if (!(d > 0.0)) {
      throw EvaluationError("dominating diagonal: nonpositive entry at agent " + std::to_string(i) +
                            " (model misconfiguration)");
    }
    out.diag[static_cast<std::size_t>(i)] = d;
  }
  return out;
}

double lyapunov(const Vec& x, const MeasurementSet& g, const PrivateCosts& f, LyapunovFamily family,
                const TransferFunctionSet* transfers) {
  require_finite_state(x, "lyapunov");
  const int n = g.size();

  auto pair_sum = [&](auto&& term) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        s += term(i, j,
                  g.checked_value(i, j, x[static_cast<std::size_t>(i)],
                                  x[static_cast<std::size_t>(j)]));
      }
    }
    return s;
  };

  switch (family) {
    case LyapunovFamily::MajorizeLagrangian:
      return f.total(x) + 0.5 * pair_sum([](int, int, double v) { return std::min(v, 0.0); });
    case LyapunovFamily::AsymmetricMinSum:
      return pair_sum([](int, int, double v) { return std::min(v, 0.0); });
    case LyapunovFamily::TransferIntegral:
      if (transfers == nullptr)
        throw EvaluationError("transfer-integral Lyapunov needs a transfer function set");
      return pair_sum([&](int i, int j, double v) { return transfers->antiderivative(i, j, v); });
    case LyapunovFamily::Penalty:
      return f.total(x) + 0.5 * pair_sum([](int, int, double v) { return std::max(v, 0.0); });
  }
  throw EvaluationError("unknown Lyapunov family");
}

double penalty_phi(const Vec& x, const MeasurementSet& g, const PrivateCosts& f) {
  return lyapunov(x, g, f, LyapunovFamily::Penalty);
}

Vec penalty_subgradient(const Vec& x, const MeasurementSet& g, const PrivateCosts& f) {
  NeighborSets far = neighborhoods(x, g, NeighborhoodRule::RepelWhenFar);
  return lagrangian_grad_fixed_network(x, far, g, f);
}

Vec sorted_gap_vector(const Vec& x) {
  const std::size_t n = x.size();
  Vec gaps;
  gaps.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) gaps.push_back(std::abs(x[i] - x[j]));
  }
  std::sort(gaps.begin(), gaps.end(), std::greater<double>());
  return gaps;
}

// ---------------------------------------------------------------------------
// MirrorMap
// ---------------------------------------------------------------------------

double MirrorMap::value(double x) const {
  switch (kind_) {
    case Kind::NegativeEntropy:
      if (!(x > 0)) throw EvaluationError("entropy map needs positive entries");
      return x * std::log(x);
    case Kind::Quadratic:
      return 0.5 * scale_ * x * x;
  }
  return 0.0;
}

double MirrorMap::grad(double x) const {
  switch (kind_) {
    case Kind::NegativeEntropy:
      if (!(x > 0)) throw EvaluationError("entropy map needs positive entries");
      return std::log(x) + 1.0;
    case Kind::Quadratic:
      return scale_ * x;
  }
  return 0.0;
}

double MirrorMap::grad_inverse(double y) const {
  switch (kind_) {
    case Kind::NegativeEntropy:
      return std::exp(y - 1.0);
    case Kind::Quadratic:
      return y / scale_;
  }
  return 0.0;
}

double MirrorMap::hessian(double x) const {
  switch (kind_) {
    case Kind::NegativeEntropy:
      if (!(x > 0)) throw EvaluationError("entropy map needs positive entries");
      return 1.0 / x;
    case Kind::Quadratic:
      return scale_;
  }
  return 0.0;
}

bool MirrorMap::in_domain(double x) const {
  return kind_ == Kind::Quadratic || x > 0.0;
}

double MirrorMap::value(const Vec& x) const {
  double s = 0.0;
  for (double xi : x) s += value(xi);
  return s;
}

double bregman(const MirrorMap& map, const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw EvaluationError("bregman: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += map.value(a[i]) - map.value(b[i]) - map.grad(b[i]) * (a[i] - b[i]);
  }
  return s;
}

// ---------------------------------------------------------------------------
// TransferFunctionSet
// ---------------------------------------------------------------------------

TransferFunctionSet TransferFunctionSet::uniform(int n, Kind kind, double param) {
  if (kind == Kind::SmoothedHinge && !(param > 0))
    throw ConfigError("smoothed-hinge transfer needs delta > 0");
  return TransferFunctionSet(n, kind, param);
}

double TransferFunctionSet::f(int, int, double l) const {
  switch (kind_) {
    case Kind::Exp:
      return std::exp(-l);
    case Kind::SmoothedHinge: {
      double t = 1.0 - l;
      return 0.5 * (t + std::sqrt(t * t + param_ * param_));
    }
    case Kind::Reciprocal:
      if (!(l > -1.0)) throw EvaluationError("reciprocal transfer needs lambda > -1");
      return 1.0 / (1.0 + l);
  }
  return 0.0;
}

double TransferFunctionSet::fprime(int, int, double l) const {
  switch (kind_) {
    case Kind::Exp:
      return -std::exp(-l);
    case Kind::SmoothedHinge: {
      double t = 1.0 - l;
      return -0.5 * (1.0 + t / std::sqrt(t * t + param_ * param_));
    }
    case Kind::Reciprocal:
      if (!(l > -1.0)) throw EvaluationError("reciprocal transfer needs lambda > -1");
      return -1.0 / ((1.0 + l) * (1.0 + l));
  }
  return 0.0;
}

double TransferFunctionSet::antiderivative(int, int, double u) const {
  switch (kind_) {
    case Kind::Exp:
      return 1.0 - std::exp(-u);
    case Kind::SmoothedHinge: {
      // int_0^u (1-l)/2 dl + 1/2 int_{1-u}^{1} sqrt(t^2 + d^2) dt
      auto A = [this](double t) {
        return 0.5 * t * std::sqrt(t * t + param_ * param_) +
               0.5 * param_ * param_ * std::asinh(t / param_);
      };
      return 0.5 * (u - 0.5 * u * u) + 0.5 * (A(1.0) - A(1.0 - u));
    }
    case Kind::Reciprocal:
      if (!(u > -1.0)) throw EvaluationError("reciprocal transfer needs lambda > -1");
      return std::log1p(u);
  }
  return 0.0;
}

}  // namespace statenet
