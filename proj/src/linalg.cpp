#include "qbrach/detail/linalg.hpp"

#include <cmath>
#include <cstdio>

#include <Eigen/Eigenvalues>

namespace qbrach::detail {

namespace {

struct Split {
  Eigen::MatrixXd range;
  Eigen::MatrixXd null;
};

Split split_columns(const Eigen::MatrixXd& a, double rel_tol) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) return {Eigen::MatrixXd(n, 0), Eigen::MatrixXd::Identity(n, n)};
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV | Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  Split out;
  out.null = svd.matrixV().rightCols(n - r);
  out.range = svd.matrixU().leftCols(r);
  return out;
}

}  // namespace

Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol) { return split_columns(a, rel_tol).null; }

Eigen::MatrixXd range_space(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.rows() == 0) return Eigen::MatrixXd(0, 0);
  return split_columns(a, rel_tol).range;
}

int numeric_rank(const Eigen::MatrixXd& a, double rel_tol) {
  return static_cast<int>(a.cols() - split_columns(a, rel_tol).null.cols());
}

Eigen::MatrixXd rref(const Eigen::MatrixXd& a, double tol) {
  Eigen::MatrixXd m = a;
  Eigen::Index lead = 0;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index r = 0;
  for (; r < rows && lead < cols; ++lead) {
    Eigen::Index piv;
    const double best = m.col(lead).segment(r, rows - r).cwiseAbs().maxCoeff(&piv);
    if (best <= tol) continue;
    piv += r;
    m.row(r).swap(m.row(piv));
    m.row(r) /= m(r, lead);
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i != r) m.row(i) -= m(i, lead) * m.row(r);
    }
    ++r;
  }
  Eigen::MatrixXd out = m.topRows(r);
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (std::abs(out(i, j)) <= tol) out(i, j) = 0.0;
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::string> format_linear_equalities(const Eigen::MatrixXd& rows,
                                                  const std::vector<std::string>& names, double tol) {
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::string s;
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
      const double c = rows(i, j);
      if (std::abs(c) <= tol) continue;
      const bool neg = c < 0;
      if (!s.empty()) s += neg ? "-" : "+";
      else if (neg) s += "-";
      const double mag = std::abs(c);
      if (std::abs(mag - 1.0) > tol) s += format_number(mag) + "*";
      s += names[static_cast<std::size_t>(j)];
    }
    if (!s.empty()) out.push_back(s + "=0");
  }
  return out;
}

Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double s) {
  using C = std::complex<double>;
  const Eigen::Index n = h.rows();
  if (n == 2) {
    // h = a0 I + traceless part; exp(-i s h) = e^{-i s a0} (cos(sr) I - i sin(sr)/r h0)
    const C a0 = 0.5 * (h(0, 0) + h(1, 1));
    const double hz = 0.5 * (h(0, 0) - h(1, 1)).real();
    const double r = std::sqrt(hz * hz + std::norm(h(0, 1)));
    const double c = std::cos(s * r);
    const double sr = (std::abs(s) * r < 1e-8) ? s * (1.0 - (s * r) * (s * r) / 6.0) : std::sin(s * r) / r;
    Eigen::MatrixXcd u(2, 2);
    u(0, 0) = C(c, -sr * hz);
    u(1, 1) = C(c, sr * hz);
    u(0, 1) = C(0.0, -sr) * h(0, 1);
    u(1, 0) = C(0.0, -sr) * h(1, 0);
    if (a0 != C(0.0)) u *= std::exp(C(0.0, -s) * a0.real());
    return u;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXd& lam = es.eigenvalues();
  Eigen::VectorXcd phase(n);
  for (Eigen::Index k = 0; k < n; ++k) phase(k) = std::polar(1.0, -s * lam(k));
  const Eigen::MatrixXcd& v = es.eigenvectors();
  return v * phase.asDiagonal() * v.adjoint();
}

Eigen::MatrixXcd commutator_raw(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  using C = std::complex<double>;
  return C(0.0, -1.0) * (a * b - b * a);
}

double inner_raw(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return 0.5 * (a.array() * b.array().conjugate()).real().sum();
}

}  // namespace qbrach::detail
