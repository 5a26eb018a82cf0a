#pragma once

// Linear algebra over su(N): traceless Hermitian operators, special-unitary
// operators, orthonormal bases and the exponential/logarithm maps between
// them. Conventions: hbar = 1, SU(N) = exp(-i su(N)), and the inner product
// on su(N) is (1/2) Re tr[AB] so that tr[tau_i tau_j] = 2 delta_ij bases are
// orthonormal.

#include <complex>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qbrach/error.hpp"
#include "qbrach/tolerances.hpp"

namespace qbrach {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Traceless Hermitian N x N operator (an element of su(N) in the physics
/// convention). Instances are always Hermitian and traceless to rounding.
class HermitianOp {
 public:
  HermitianOp() = default;

  static HermitianOp zero(int dim);

  /// Validates Hermiticity and tracelessness against `tol`.
  static HermitianOp from_matrix(const Matrix& m, const Tolerances& tol = kTolerances);

  /// Takes the traceless Hermitian part (M + M^dagger)/2 - tr(M)/N. Used for
  /// results that are Hermitian by construction up to rounding.
  static HermitianOp hermitian_part(const Matrix& m);

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }
  Complex operator()(int r, int c) const { return m_(r, c); }

  HermitianOp operator-() const;
  HermitianOp& operator+=(const HermitianOp& other);
  HermitianOp& operator-=(const HermitianOp& other);
  HermitianOp& operator*=(double s);

  friend HermitianOp operator+(HermitianOp a, const HermitianOp& b) { return a += b; }
  friend HermitianOp operator-(HermitianOp a, const HermitianOp& b) { return a -= b; }
  friend HermitianOp operator*(HermitianOp a, double s) { return a *= s; }
  friend HermitianOp operator*(double s, HermitianOp a) { return a *= s; }
  friend HermitianOp operator/(HermitianOp a, double s) { return a *= 1.0 / s; }

 private:
  explicit HermitianOp(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Special-unitary N x N operator.
class UnitaryOp {
 public:
  UnitaryOp() = default;

  static UnitaryOp identity(int dim);

  /// Validates U^dagger U = I and det U = 1 against `tol.unitary`.
  static UnitaryOp from_matrix(const Matrix& m, const Tolerances& tol = kTolerances);

  /// No validation; for products of exponentials computed internally.
  static UnitaryOp assume_unitary(Matrix m) { return UnitaryOp(std::move(m)); }

  int dim() const noexcept { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const noexcept { return m_; }

  UnitaryOp adjoint() const { return UnitaryOp(m_.adjoint()); }

  friend UnitaryOp operator*(const UnitaryOp& a, const UnitaryOp& b);

 private:
  friend UnitaryOp exp_op(const HermitianOp& a, double s);
  explicit UnitaryOp(Matrix m) : m_(std::move(m)) {}
  Matrix m_;
};

/// Ordered list of N^2 - 1 operators with tr[tau_i tau_j] = 2 delta_ij.
struct BasisSet {
  int dim = 0;
  std::vector<HermitianOp> elements;

  std::size_t size() const noexcept { return elements.size(); }
  const HermitianOp& operator[](std::size_t i) const { return elements[i]; }
};

BasisSet pauli_basis();
BasisSet gellmann_basis();

/// Generalized Gell-Mann basis. For each k = 1..N-1 it lists the symmetric
/// and antisymmetric off-diagonal pairs (j, k), j < k, followed by the k-th
/// diagonal element, so N = 2 gives (sx, sy, sz) and N = 3 gives lambda_1..8.
BasisSet generalized_gellmann(int n);

/// Cached generalized Gell-Mann basis (thread-safe, immutable after creation).
const BasisSet& standard_basis(int n);

/// (1/2) Re tr[AB].
double inner(const HermitianOp& a, const HermitianOp& b);

/// Re tr[AB] (the full trace used by the Pontryagin Hamiltonian).
double trace_product(const HermitianOp& a, const HermitianOp& b);

/// sqrt(inner(A, A)).
double hs_norm(const HermitianOp& a);

/// -i[A, B], which is Hermitian for Hermitian A and B.
HermitianOp commutator(const HermitianOp& a, const HermitianOp& b);

/// Coefficients a^j = inner(A, tau_j).
Eigen::VectorXd expand(const HermitianOp& a, const BasisSet& basis);

HermitianOp reconstruct(const Eigen::Ref<const Eigen::VectorXd>& coeffs, const BasisSet& basis);

/// Orthogonal projection onto span(subspace). The subspace must be
/// orthonormal under inner() to `tol.subspace_gram`.
HermitianOp project(const HermitianOp& a, std::span<const HermitianOp> subspace,
                    const Tolerances& tol = kTolerances);

/// Gram matrix G_ij = inner(c_i, c_j).
Eigen::MatrixXd gram_matrix(std::span<const HermitianOp> ops);

/// Orthonormal basis (under inner()) of span(ops), via SVD of the Gram matrix.
std::vector<HermitianOp> orthonormalize(std::span<const HermitianOp> ops, double rank_tol = 1e-12);

/// U A U^dagger.
HermitianOp conjugate(const UnitaryOp& u, const HermitianOp& a);

/// exp(-i s A), computed from the eigendecomposition of A.
UnitaryOp exp_op(const HermitianOp& a, double s);

/// Principal generator: traceless Hermitian L with exp(-iL) = U and
/// eigenphases in (-pi, pi], shifted by multiples of 2 pi with minimal
/// Hilbert-Schmidt norm when the principal phases do not sum to zero.
/// Throws ErrorCode::branch_ambiguity if an eigenvalue sits on -1.
HermitianOp log_op(const UnitaryOp& u, const Tolerances& tol = kTolerances);

/// Same generator as log_op without the branch-cut check; on the cut the
/// choice between the two candidate phases is arbitrary but deterministic.
HermitianOp principal_log(const UnitaryOp& u);

/// hs_norm of the principal generator, without the branch-cut check. The
/// norm is continuous across the cut, so it is safe inside root finders.
double log_norm(const UnitaryOp& u);

/// Random traceless Hermitian operator with i.i.d. standard normal
/// coefficients in the standard basis.
HermitianOp random_hermitian(int n, std::mt19937_64& rng);

/// Haar-random element of SU(N).
UnitaryOp random_unitary(int n, std::mt19937_64& rng);

double max_abs(const Matrix& m);

}  // namespace qbrach
