#pragma once

// The admissible set of Hamiltonians: drift + control subspace + bound.

#include <string>
#include <variant>
#include <vector>

#include "qbrach/sun_algebra.hpp"

namespace qbrach {

/// (1/2) tr[H_c^2] <= omega^2 over the whole control subspace.
struct TypicalBound {
  double omega = 1.0;
};

/// lo_j <= u^j <= hi_j per coordinate.
struct BoxBound {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// u^T G u <= radius^2 in control coordinates.
struct BallBound {
  double radius = 1.0;
  Eigen::MatrixXd metric;
};

using Bound = std::variant<TypicalBound, BoxBound, BallBound>;

enum class ConstraintKind { typical, box, ball };

const char* to_string(ConstraintKind kind) noexcept;

class ConstraintSet {
 public:
  ConstraintSet() = default;

  /// Validates dimensions, tracelessness, the bound and (for typical) an
  /// orthonormal control basis. Box and ball bases only need to be linearly
  /// independent.
  ConstraintSet(HermitianOp drift, std::vector<HermitianOp> control_basis, Bound bound,
                const Tolerances& tol = kTolerances);

  int dim() const noexcept { return drift_.dim(); }
  int controls() const noexcept { return static_cast<int>(basis_.size()); }
  const HermitianOp& drift() const noexcept { return drift_; }
  const std::vector<HermitianOp>& control_basis() const noexcept { return basis_; }
  const std::vector<HermitianOp>& orthonormal_basis() const noexcept { return ortho_; }
  const Bound& bound() const noexcept { return bound_; }
  ConstraintKind kind() const noexcept { return static_cast<ConstraintKind>(bound_.index()); }

  /// H_d + sum_j u^j c_j.
  HermitianOp hamiltonian(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// Least-squares control coordinates of H - H_d in the control basis.
  Eigen::VectorXd coordinates(const HermitianOp& h) const;

  /// Amount by which u exceeds the bound (0 when admissible).
  double bound_violation(const Eigen::Ref<const Eigen::VectorXd>& u) const;

  /// P_C(A) in the Hilbert-Schmidt sense.
  HermitianOp project(const HermitianOp& a) const;

  /// g_j = inner(F, c_j).
  Eigen::VectorXd pairings(const HermitianOp& f) const;

  /// Random admissible control vector (uniform direction, radius^(1/l)
  /// scaling for balls, uniform per coordinate for boxes).
  Eigen::VectorXd random_admissible(std::mt19937_64& rng) const;

 private:
  HermitianOp drift_;
  std::vector<HermitianOp> basis_;
  std::vector<HermitianOp> ortho_;
  Eigen::MatrixXd gram_;
  Bound bound_;
};

struct ClassificationReport {
  bool drift_in_subspace = false;
  std::string type_label;  // "lollipop" or "lotus_leaf"
  bool planar = true;
  bool typical = false;
  bool drift_in_bracket = false;
  std::vector<std::string> notes;
};

ClassificationReport classify(const ConstraintSet& c, const Tolerances& tol = kTolerances);

struct MaximizerResult {
  bool singular = false;
  HermitianOp hamiltonian;
  Eigen::VectorXd controls;
  std::vector<int> partially_singular;  // box coordinates with vanishing pairing
  bool non_unique = false;
};

/// Pointwise maximizer of tr[HF] over the admissible set.
MaximizerResult maximizer(const HermitianOp& f, const ConstraintSet& c, const Tolerances& tol = kTolerances);

/// max_j |inner(F, c_j)| < tol.
bool is_singular(const HermitianOp& f, const ConstraintSet& c, double tol = kTolerances.singular);

/// -1 + tr[HF].
double pontryagin_h(const HermitianOp& h, const HermitianOp& f);

}  // namespace qbrach
