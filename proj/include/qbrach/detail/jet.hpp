#pragma once

// Truncated Taylor series in one variable s: x(s) = sum_k c_k s^k.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace qbrach::detail {

struct ScalarJet {
  std::vector<double> c;

  explicit ScalarJet(int order = 0, double value = 0.0) : c(static_cast<std::size_t>(order) + 1, 0.0) { c[0] = value; }

  int order() const { return static_cast<int>(c.size()) - 1; }
  double operator[](int k) const { return c[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return c[static_cast<std::size_t>(k)]; }

  friend ScalarJet operator+(ScalarJet a, const ScalarJet& b) {
    for (int k = 0; k <= a.order(); ++k) a[k] += b[k];
    return a;
  }
  friend ScalarJet operator-(ScalarJet a, const ScalarJet& b) {
    for (int k = 0; k <= a.order(); ++k) a[k] -= b[k];
    return a;
  }
  friend ScalarJet operator*(double s, ScalarJet a) {
    for (auto& v : a.c) v *= s;
    return a;
  }
  friend ScalarJet operator*(const ScalarJet& a, const ScalarJet& b) {
    ScalarJet out(a.order());
    for (int k = 0; k <= a.order(); ++k) {
      double acc = 0.0;
      for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i];
      out[k] = acc;
    }
    return out;
  }
  friend ScalarJet operator/(const ScalarJet& a, const ScalarJet& b) {
    ScalarJet out(a.order());
    for (int k = 0; k <= a.order(); ++k) {
      double acc = a[k];
      for (int i = 1; i <= k; ++i) acc -= b[i] * out[k - i];
      out[k] = acc / b[0];
    }
    return out;
  }
};

inline ScalarJet sqrt(const ScalarJet& a) {
  ScalarJet out(a.order());
  out[0] = std::sqrt(a[0]);
  for (int k = 1; k <= a.order(); ++k) {
    double acc = a[k];
    for (int i = 1; i < k; ++i) acc -= out[i] * out[k - i];
    out[k] = acc / (2.0 * out[0]);
  }
  return out;
}

struct MatrixJet {
  std::vector<Eigen::MatrixXcd> c;

  MatrixJet() = default;
  MatrixJet(int order, const Eigen::MatrixXcd& value)
      : c(static_cast<std::size_t>(order) + 1, Eigen::MatrixXcd::Zero(value.rows(), value.cols())) {
    c[0] = value;
  }

  int order() const { return static_cast<int>(c.size()) - 1; }
  const Eigen::MatrixXcd& operator[](int k) const { return c[static_cast<std::size_t>(k)]; }
  Eigen::MatrixXcd& operator[](int k) { return c[static_cast<std::size_t>(k)]; }

  void add_scaled(const ScalarJet& s, const Eigen::MatrixXcd& m) {
    for (int k = 0; k <= order(); ++k) c[static_cast<std::size_t>(k)] += s[k] * m;
  }

  /// d/ds, dropping one order.
  MatrixJet derivative() const {
    MatrixJet out;
    for (int k = 1; k <= order(); ++k) out.c.push_back(static_cast<double>(k) * c[static_cast<std::size_t>(k)]);
    return out;
  }
};

/// -i[A, B] coefficientwise, truncated to the shorter order.
inline MatrixJet commutator(const MatrixJet& a, const MatrixJet& b) {
  const int order = std::min(a.order(), b.order());
  MatrixJet out;
  for (int k = 0; k <= order; ++k) {
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(a[0].rows(), a[0].cols());
    for (int i = 0; i <= k; ++i) acc += a[i] * b[k - i] - b[k - i] * a[i];
    out.c.push_back(std::complex<double>(0.0, -1.0) * acc);
  }
  return out;
}

inline MatrixJet operator+(const MatrixJet& a, const MatrixJet& b) {
  const int order = std::min(a.order(), b.order());
  MatrixJet out;
  for (int k = 0; k <= order; ++k) out.c.push_back(a[k] + b[k]);
  return out;
}

}  // namespace qbrach::detail
