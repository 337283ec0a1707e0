#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "statenet/common.hpp"

namespace statenet {

/// Which sign of g_ij creates an edge from i to j.
///   AttractWhenClose: j is a neighbor of i iff g_ij(x_i, x_j) <= 0.
///   RepelWhenFar:     j is a neighbor of i iff g_ij(x_i, x_j) >  0.
/// The two modes partition every pair for every state; the boundary
/// g_ij = 0 belongs to the Attract edge set.
enum class NeighborhoodRule { AttractWhenClose, RepelWhenFar };

/// Degree-2 polynomial in (a, b):
///   p(a,b) = caa*a^2 + cbb*b^2 + cab*a*b + ca*a + cb*b + c0.
struct Poly2 {
  double caa = 0, cbb = 0, cab = 0, ca = 0, cb = 0, c0 = 0;

  double value(double a, double b) const {
    return caa * a * a + cbb * b * b + cab * a * b + ca * a + cb * b + c0;
  }
  double da(double a, double b) const { return 2 * caa * a + cab * b + ca; }
  double db(double a, double b) const { return 2 * cbb * b + cab * a + cb; }
  double daa() const { return 2 * caa; }
  double dbb() const { return 2 * cbb; }
  double dab() const { return cab; }

  /// p(b,a) as a polynomial of (a,b); used to make g_ji(b,a) = g_ij(a,b).
  Poly2 transposed() const { return Poly2{cbb, caa, cab, cb, ca, c0}; }

  /// (a-b)^2/2 - eps^2/2, the bounded-confidence gap measurement.
  static Poly2 quadratic_gap(double eps) {
    return Poly2{0.5, 0.5, -1.0, 0.0, 0.0, -0.5 * eps * eps};
  }
  /// a*b - c, the product-threshold measurement.
  static Poly2 product_threshold(double c) { return Poly2{0, 0, 1.0, 0, 0, -c}; }
  /// w*(a-b)^2 + c0.
  static Poly2 scaled_square_gap(double w, double c0v = 0.0) {
    return Poly2{w, w, -2.0 * w, 0.0, 0.0, c0v};
  }
};

/// The n(n-1) pairwise measurement functions g_ij together with their
/// declared smoothness data. Implementations must be pure and cheap:
/// the run loop re-evaluates every ordered pair at every iteration.
///
/// Partial-derivative accessors are taken with respect to the first
/// argument slot (d1, d11) and the second slot (d2), and the mixed
/// second partial (d12).
class MeasurementSet {
 public:
  virtual ~MeasurementSet() = default;

  virtual double value(int i, int j, double xi, double xj) const = 0;
  virtual double d1(int i, int j, double xi, double xj) const = 0;
  virtual double d2(int i, int j, double xi, double xj) const = 0;
  virtual double d11(int i, int j, double xi, double xj) const = 0;
  virtual double d12(int i, int j, double xi, double xj) const = 0;

  int size() const { return n_; }
  bool symmetric() const { return symmetric_; }

  /// Declared bound on |d2 g/dxi dxj| and |d2 g/dxi^2| (and |f''|).
  std::optional<double> smoothness_bound() const { return m_; }
  /// Declared Lipschitz constant of each g_ij.
  std::optional<double> lipschitz_bound() const { return lipschitz_; }
  /// Declared bound on ||grad g_ij||.
  std::optional<double> gradient_bound() const { return grad_bound_; }

  void declare_smoothness(double m) {
    if (!(m > 0)) throw ConfigError("smoothness bound m must be positive");
    m_ = m;
  }
  void declare_lipschitz(double L) {
    if (!(L > 0)) throw ConfigError("Lipschitz bound L must be positive");
    lipschitz_ = L;
  }
  void declare_gradient_bound(double G) {
    if (!(G > 0)) throw ConfigError("gradient bound G must be positive");
    grad_bound_ = G;
  }

  double checked_value(int i, int j, double xi, double xj) const {
    double v = value(i, j, xi, xj);
    if (!std::isfinite(v)) {
      throw EvaluationError("non-finite measurement g(" + std::to_string(i) + "," +
                            std::to_string(j) + ")");
    }
    return v;
  }

 protected:
  MeasurementSet(int n, bool symmetric) : n_(n), symmetric_(symmetric) {
    if (n < 1) throw ConfigError("measurement set needs n >= 1");
  }

  int n_;
  bool symmetric_;
  std::optional<double> m_, lipschitz_, grad_bound_;
};

using MeasurementPtr = std::shared_ptr<const MeasurementSet>;

/// One polynomial shared by every ordered pair.
class UniformPolyMeasurements final : public MeasurementSet {
 public:
  UniformPolyMeasurements(int n, Poly2 p, bool symmetric) : MeasurementSet(n, symmetric), p_(p) {}

  double value(int, int, double a, double b) const override { return p_.value(a, b); }
  double d1(int, int, double a, double b) const override { return p_.da(a, b); }
  double d2(int, int, double a, double b) const override { return p_.db(a, b); }
  double d11(int, int, double, double) const override { return p_.daa(); }
  double d12(int, int, double, double) const override { return p_.dab(); }

 private:
  Poly2 p_;
};

/// g_ij(a,b) = base(a,b) - offset_i. Asymmetric whenever offsets differ
/// (heterogeneous confidence bounds).
class PerAgentOffsetMeasurements final : public MeasurementSet {
 public:
  PerAgentOffsetMeasurements(Poly2 base, Vec offsets)
      : MeasurementSet(static_cast<int>(offsets.size()), false),
        base_(base),
        offsets_(std::move(offsets)) {}

  double value(int i, int, double a, double b) const override {
    return base_.value(a, b) - offsets_[static_cast<std::size_t>(i)];
  }
  double d1(int, int, double a, double b) const override { return base_.da(a, b); }
  double d2(int, int, double a, double b) const override { return base_.db(a, b); }
  double d11(int, int, double, double) const override { return base_.daa(); }
  double d12(int, int, double, double) const override { return base_.dab(); }

 private:
  Poly2 base_;
  Vec offsets_;
};

/// Fully general per-ordered-pair table. Quadratic memory; meant for
/// randomized small-n instances and fixed weighted graphs.
class PairTableMeasurements final : public MeasurementSet {
 public:
  PairTableMeasurements(int n, bool symmetric)
      : MeasurementSet(n, symmetric), table_(static_cast<std::size_t>(n) * (n - 1)) {}

  void set(int i, int j, Poly2 p) { table_[idx(i, j)] = p; }
  /// Installs p as g_ij and its transpose as g_ji, keeping the set symmetric.
  void set_symmetric(int i, int j, Poly2 p) {
    set(i, j, p);
    set(j, i, p.transposed());
  }
  const Poly2& at(int i, int j) const { return table_[idx(i, j)]; }

  double value(int i, int j, double a, double b) const override {
    return table_[idx(i, j)].value(a, b);
  }
  double d1(int i, int j, double a, double b) const override { return table_[idx(i, j)].da(a, b); }
  double d2(int i, int j, double a, double b) const override { return table_[idx(i, j)].db(a, b); }
  double d11(int i, int j, double, double) const override { return table_[idx(i, j)].daa(); }
  double d12(int i, int j, double, double) const override { return table_[idx(i, j)].dab(); }

 private:
  std::size_t idx(int i, int j) const { return static_cast<std::size_t>(pair_index(n_, i, j)); }
  std::vector<Poly2> table_;
};

/// g_ij(a,b) = (ln a - ln b)^2/2 - eps^2/2 on positive states. The edge
/// condition g <= 0 is exactly e^{-eps} <= a/b <= e^{eps}.
class LogGapMeasurements final : public MeasurementSet {
 public:
  LogGapMeasurements(int n, double eps) : MeasurementSet(n, true), eps_(eps) {
    if (!(eps > 0)) throw ConfigError("log-gap measurement needs eps > 0");
  }

  double value(int, int, double a, double b) const override {
    check(a, b);
    double d = std::log(a) - std::log(b);
    return 0.5 * d * d - 0.5 * eps_ * eps_;
  }
  double d1(int, int, double a, double b) const override {
    check(a, b);
    return (std::log(a) - std::log(b)) / a;
  }
  double d2(int, int, double a, double b) const override {
    check(a, b);
    return (std::log(b) - std::log(a)) / b;
  }
  double d11(int, int, double a, double b) const override {
    check(a, b);
    return (1.0 - (std::log(a) - std::log(b))) / (a * a);
  }
  double d12(int, int, double a, double b) const override {
    check(a, b);
    return -1.0 / (a * b);
  }

  double eps() const { return eps_; }

 private:
  static void check(double a, double b) {
    if (!(a > 0) || !(b > 0)) throw EvaluationError("log-gap measurement needs positive states");
  }
  double eps_;
};

/// Private costs f_i, one degree-2 polynomial per agent:
/// f_i(x) = c2*x^2 + c1*x + c0.
class PrivateCosts {
 public:
  struct Coeffs {
    double c2 = 0, c1 = 0, c0 = 0;
  };

  static PrivateCosts zero(int n) { return PrivateCosts(std::vector<Coeffs>(static_cast<std::size_t>(n))); }

  /// f_i(x) = (w_i/2) * (x - a_i)^2.
  static PrivateCosts quadratic_well(const Vec& weights, const Vec& centers) {
    if (weights.size() != centers.size()) throw ConfigError("quadratic_well: size mismatch");
    std::vector<Coeffs> cs(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      double w = weights[i], a = centers[i];
      cs[i] = Coeffs{0.5 * w, -w * a, 0.5 * w * a * a};
    }
    return PrivateCosts(std::move(cs));
  }

  /// f_i(x) = (w/2) * x^2 for every agent.
  static PrivateCosts uniform_quadratic(int n, double w) {
    return PrivateCosts(std::vector<Coeffs>(static_cast<std::size_t>(n), Coeffs{0.5 * w, 0, 0}));
  }

  explicit PrivateCosts(std::vector<Coeffs> cs) : coeffs_(std::move(cs)) {}

  int size() const { return static_cast<int>(coeffs_.size()); }
  double value(int i, double x) const {
    const Coeffs& c = coeffs_[static_cast<std::size_t>(i)];
    return c.c2 * x * x + c.c1 * x + c.c0;
  }
  double d1(int i, double x) const {
    const Coeffs& c = coeffs_[static_cast<std::size_t>(i)];
    return 2 * c.c2 * x + c.c1;
  }
  double d2(int i, double) const { return 2 * coeffs_[static_cast<std::size_t>(i)].c2; }

  double total(const Vec& x) const {
    double s = 0.0;
    for (int i = 0; i < size(); ++i) s += value(i, x[static_cast<std::size_t>(i)]);
    return s;
  }

 private:
  std::vector<Coeffs> coeffs_;
};

/// Edge weights lambda_ij in [0,1], indexed by ordered pairs (i,j), i != j.
/// Binary in the discrete BCD view, continuous in the flow view.
class DualNetwork {
 public:
  explicit DualNetwork(int n, double fill = 0.0)
      : n_(n), w_(static_cast<std::size_t>(n) * (n - 1), fill) {
    if (n < 1) throw ConfigError("dual network needs n >= 1");
  }

  int size() const { return n_; }
  int pair_count() const { return static_cast<int>(w_.size()); }

  double at(int i, int j) const { return w_[static_cast<std::size_t>(pair_index(n_, i, j))]; }
  void set(int i, int j, double v) { w_[static_cast<std::size_t>(pair_index(n_, i, j))] = v; }

  double& flat(int k) { return w_[static_cast<std::size_t>(k)]; }
  double flat(int k) const { return w_[static_cast<std::size_t>(k)]; }

  bool in_unit_box(double tol = 0.0) const {
    for (double v : w_) {
      if (v < -tol || v > 1.0 + tol) return false;
    }
    return true;
  }
  bool is_binary(double tol = 0.0) const {
    for (double v : w_) {
      if (std::abs(v) > tol && std::abs(v - 1.0) > tol) return false;
    }
    return true;
  }

  void clamp_unit_box() {
    for (double& v : w_) v = std::min(1.0, std::max(0.0, v));
  }

  bool operator==(const DualNetwork& o) const { return n_ == o.n_ && w_ == o.w_; }

 private:
  int n_;
  Vec w_;
};

}  // namespace statenet
