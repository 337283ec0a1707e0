#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace statenet {

/// Agent states x in R^n. Scalar states only; everything is keyed on the
/// agent index so a vector-valued extension touches only this alias.
using Vec = std::vector<double>;

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::vector<std::string> fields = {})
      : std::runtime_error(what), fields_(std::move(fields)) {}
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

inline bool all_finite(const Vec& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline void require_finite_state(const Vec& x, const char* where) {
  if (x.empty()) throw EvaluationError(std::string(where) + ": state must have n >= 1 agents");
  if (!all_finite(x)) throw EvaluationError(std::string(where) + ": non-finite state entry");
}

inline double sq(double v) { return v * v; }

inline double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double norm2_diff(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sq(a[i] - b[i]);
  return std::sqrt(s);
}

inline double norm_inf(const Vec& v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

/// Flat index of the ordered pair (i,j), i != j, into an n(n-1) array.
inline int pair_index(int n, int i, int j) { return i * (n - 1) + (j < i ? j : j - 1); }

}  // namespace statenet
