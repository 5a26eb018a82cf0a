#include "qbrach/sun_algebra.hpp"

#include "qbrach/detail/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

namespace qbrach {

namespace {

void require_same_dim(int a, int b, const char* where) {
  if (a != b) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(where) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                    std::to_string(b) + ")");
  }
}

// Eigenphases phi_k = -arg(lambda_k) of a special unitary, shifted by
// multiples of 2 pi so they sum to zero with minimal sum of squares.
Eigen::VectorXd balanced_phases(const Eigen::VectorXcd& lambda) {
  const int n = static_cast<int>(lambda.size());
  Eigen::VectorXd phi(n);
  for (int k = 0; k < n; ++k) {
    double p = -std::arg(lambda(k));
    if (p <= -std::numbers::pi) p += 2.0 * std::numbers::pi;
    phi(k) = p;
  }
  const long m = std::lround(phi.sum() / (2.0 * std::numbers::pi));
  if (m != 0) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return phi(a) > phi(b); });
    if (m > 0) {
      for (long j = 0; j < m && j < n; ++j) phi(order[j]) -= 2.0 * std::numbers::pi;
    } else {
      for (long j = 0; j < -m && j < n; ++j) phi(order[n - 1 - j]) += 2.0 * std::numbers::pi;
    }
  }
  return phi;
}

struct Spectral {
  Eigen::VectorXcd lambda;
  Matrix vectors;
};

Spectral unitary_spectrum(const Matrix& u) {
  Eigen::ComplexSchur<Matrix> schur(u);
  return {schur.matrixT().diagonal(), schur.matrixU()};
}

}  // namespace

HermitianOp HermitianOp::zero(int dim) {
  if (dim < 1) throw Error(ErrorCode::invalid_dimension, "operator dimension must be positive");
  return HermitianOp(Matrix::Zero(dim, dim));
}

HermitianOp HermitianOp::from_matrix(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw Error(ErrorCode::invalid_dimension, "operator must be square with N >= 2");
  }
  if (max_abs(m - m.adjoint()) > tol.hermitian) {
    throw Error(ErrorCode::invalid_argument, "operator is not Hermitian");
  }
  if (std::abs(m.trace()) > tol.trace) {
    throw Error(ErrorCode::invalid_argument, "operator is not traceless");
  }
  return hermitian_part(m);
}

HermitianOp HermitianOp::hermitian_part(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  const Complex tr = h.trace() / static_cast<double>(h.rows());
  h.diagonal().array() -= tr;
  return HermitianOp(std::move(h));
}

HermitianOp HermitianOp::operator-() const { return HermitianOp(-m_); }

HermitianOp& HermitianOp::operator+=(const HermitianOp& other) {
  require_same_dim(dim(), other.dim(), "operator +");
  m_ += other.m_;
  return *this;
}

HermitianOp& HermitianOp::operator-=(const HermitianOp& other) {
  require_same_dim(dim(), other.dim(), "operator -");
  m_ -= other.m_;
  return *this;
}

HermitianOp& HermitianOp::operator*=(double s) {
  m_ *= s;
  return *this;
}

UnitaryOp UnitaryOp::identity(int dim) {
  if (dim < 1) throw Error(ErrorCode::invalid_dimension, "operator dimension must be positive");
  return UnitaryOp(Matrix::Identity(dim, dim));
}

UnitaryOp UnitaryOp::from_matrix(const Matrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorCode::invalid_dimension, "unitary must be square");
  }
  const Matrix id = Matrix::Identity(m.rows(), m.cols());
  if (max_abs(m.adjoint() * m - id) > tol.unitary) {
    throw Error(ErrorCode::invalid_argument, "operator is not unitary");
  }
  if (std::abs(m.determinant() - 1.0) > tol.unitary) {
    throw Error(ErrorCode::invalid_argument, "unitary does not have determinant 1");
  }
  return UnitaryOp(m);
}

UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b) {
  require_same_dim(a.dim(), b.dim(), "unitary product");
  return UnitaryOp(a.m_ * b.m_);
}

BasisSet pauli_basis() { return generalized_gellmann(2); }

BasisSet gellmann_basis() { return generalized_gellmann(3); }

BasisSet generalized_gellmann(int n) {
  if (n < 2) throw Error(ErrorCode::invalid_dimension, "generalized Gell-Mann basis needs N >= 2");
  BasisSet basis;
  basis.dim = n;
  basis.elements.reserve(static_cast<std::size_t>(n * n - 1));
  const Complex i(0.0, 1.0);
  for (int k = 1; k < n; ++k) {
    for (int j = 0; j < k; ++j) {
      Matrix s = Matrix::Zero(n, n);
      s(j, k) = 1.0;
      s(k, j) = 1.0;
      basis.elements.push_back(HermitianOp::hermitian_part(s));
      Matrix a = Matrix::Zero(n, n);
      a(j, k) = -i;
      a(k, j) = i;
      basis.elements.push_back(HermitianOp::hermitian_part(a));
    }
    Matrix d = Matrix::Zero(n, n);
    const double scale = std::sqrt(2.0 / (k * (k + 1.0)));
    for (int j = 0; j < k; ++j) d(j, j) = scale;
    d(k, k) = -k * scale;
    basis.elements.push_back(HermitianOp::hermitian_part(d));
  }
  return basis;
}

const BasisSet& standard_basis(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<BasisSet>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<BasisSet>(generalized_gellmann(n));
  return *slot;
}

double trace_product(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a.dim(), b.dim(), "trace product");
  // Re tr[AB] = sum_ij Re(A_ij B_ji) = sum_ij Re(A_ij conj(B_ij)) for Hermitian B.
  return (a.matrix().array() * b.matrix().array().conjugate()).real().sum();
}

double inner(const HermitianOp& a, const HermitianOp& b) { return 0.5 * trace_product(a, b); }

double hs_norm(const HermitianOp& a) { return std::sqrt(std::max(0.0, inner(a, a))); }

HermitianOp commutator(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a.dim(), b.dim(), "commutator");
  const Matrix ab = a.matrix() * b.matrix();
  // -i(AB - BA) = -i(AB - (AB)^dagger)
  return HermitianOp::hermitian_part(Complex(0.0, -1.0) * (ab - ab.adjoint()));
}

Eigen::VectorXd expand(const HermitianOp& a, const BasisSet& basis) {
  require_same_dim(a.dim(), basis.dim, "expand");
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) c(static_cast<Eigen::Index>(j)) = inner(a, basis[j]);
  return c;
}

HermitianOp reconstruct(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const BasisSet& basis) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size()) {
    throw Error(ErrorCode::dimension_mismatch, "reconstruct: coefficient count does not match basis");
  }
  Matrix m = Matrix::Zero(basis.dim, basis.dim);
  for (std::size_t j = 0; j < basis.size(); ++j) m += coeffs(static_cast<Eigen::Index>(j)) * basis[j].matrix();
  return HermitianOp::hermitian_part(m);
}

Eigen::MatrixXd gram_matrix(std::span<const HermitianOp> ops) {
  const auto n = static_cast<Eigen::Index>(ops.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      g(i, j) = inner(ops[i], ops[j]);
      g(j, i) = g(i, j);
    }
  }
  return g;
}

HermitianOp project(const HermitianOp& a, std::span<const HermitianOp> subspace, const Tolerances& tol) {
  if (subspace.empty()) return HermitianOp::zero(a.dim());
  const Eigen::MatrixXd g = gram_matrix(subspace);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(g.rows(), g.cols());
  if ((g - id).cwiseAbs().maxCoeff() > tol.subspace_gram) {
    throw Error(ErrorCode::invalid_subspace, "projection subspace is not orthonormal");
  }
  HermitianOp p = HermitianOp::zero(a.dim());
  for (const auto& c : subspace) p += inner(a, c) * c;
  return p;
}

std::vector<HermitianOp> orthonormalize(std::span<const HermitianOp> ops, double rank_tol) {
  std::vector<HermitianOp> out;
  if (ops.empty()) return out;
  const Eigen::MatrixXd g = gram_matrix(ops);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const double top = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
  for (Eigen::Index k = g.rows() - 1; k >= 0; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= rank_tol * top || lam <= 0.0) continue;
    HermitianOp e = HermitianOp::zero(ops[0].dim());
    for (Eigen::Index i = 0; i < g.rows(); ++i) e += es.eigenvectors()(i, k) * ops[i];
    out.push_back(e / std::sqrt(lam));
  }
  return out;
}

HermitianOp conjugate(const UnitaryOp& u, const HermitianOp& a) {
  require_same_dim(u.dim(), a.dim(), "conjugate");
  return HermitianOp::hermitian_part(u.matrix() * a.matrix() * u.matrix().adjoint());
}

UnitaryOp exp_op(const HermitianOp& a, double s) { return UnitaryOp(detail::expm_hermitian(a.matrix(), s)); }

namespace {

HermitianOp log_impl(const UnitaryOp& u, const Tolerances* tol) {
  const int n = u.dim();
  const Matrix& m = u.matrix();
  if (n == 2) {
    const double theta = std::acos(std::clamp(0.5 * m.trace().real(), -1.0, 1.0));
    if (theta < 3.0) {
      // U = cos(theta) I - i sin(theta) n.sigma and L = theta n.sigma
      const Matrix anti = Complex(0.0, 0.5) * (m - m.adjoint());
      const double scale = theta < 1e-8 ? 1.0 + theta * theta / 6.0 : theta / std::sin(theta);
      return HermitianOp::hermitian_part(scale * anti);
    }
  }
  const Spectral sp = unitary_spectrum(m);
  if (tol) {
    for (int k = 0; k < n; ++k) {
      if (std::abs(sp.lambda(k) + 1.0) < tol->branch_cut) {
        throw Error(ErrorCode::branch_ambiguity, "log_op: eigenvalue on the branch cut at -1");
      }
    }
  }
  const Eigen::VectorXd phi = balanced_phases(sp.lambda);
  return HermitianOp::hermitian_part(sp.vectors * phi.cast<Complex>().asDiagonal() * sp.vectors.adjoint());
}

}  // namespace

HermitianOp log_op(const UnitaryOp& u, const Tolerances& tol) { return log_impl(u, &tol); }

HermitianOp principal_log(const UnitaryOp& u) { return log_impl(u, nullptr); }

double log_norm(const UnitaryOp& u) {
  const Matrix& m = u.matrix();
  if (u.dim() == 2) return std::acos(std::clamp(0.5 * m.trace().real(), -1.0, 1.0));
  const Spectral sp = unitary_spectrum(m);
  const Eigen::VectorXd phi = balanced_phases(sp.lambda);
  return std::sqrt(0.5 * phi.squaredNorm());
}

HermitianOp random_hermitian(int n, std::mt19937_64& rng) {
  const BasisSet& basis = standard_basis(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
  for (Eigen::Index j = 0; j < c.size(); ++j) c(j) = normal(rng);
  return reconstruct(c, basis);
}

UnitaryOp random_unitary(int n, std::mt19937_64& rng) {
  if (n < 1) throw Error(ErrorCode::invalid_dimension, "unitary dimension must be positive");
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) z(r, c) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) q.col(k) *= r(k, k) / mag;
  }
  const Complex det = q.determinant();
  q *= std::pow(det, -1.0 / n);
  return UnitaryOp::from_matrix(q, Tolerances{.unitary = 1e-9});
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace qbrach
