#include "qbrach/constraint_model.hpp"

#include <cmath>

namespace qbrach {

const char* to_string(ConstraintKind kind) noexcept {
  switch (kind) {
    case ConstraintKind::typical: return "typical";
    case ConstraintKind::box: return "box";
    case ConstraintKind::ball: return "ball";
  }
  return "unknown";
}

ConstraintSet::ConstraintSet(HermitianOp drift, std::vector<HermitianOp> control_basis, Bound bound,
                             const Tolerances& tol)
    : drift_(std::move(drift)), basis_(std::move(control_basis)), bound_(std::move(bound)) {
  const int n = drift_.dim();
  if (n < 2) throw Error(ErrorCode::invalid_dimension, "constraint dimension must be >= 2");
  if (basis_.size() > static_cast<std::size_t>(n * n - 1)) {
    throw Error(ErrorCode::invalid_subspace, "control basis has more than N^2-1 elements");
  }
  for (const auto& c : basis_) {
    if (c.dim() != n) throw Error(ErrorCode::dimension_mismatch, "control basis element has wrong dimension");
  }
  gram_ = gram_matrix(basis_);
  const auto l = static_cast<Eigen::Index>(basis_.size());
  if (l > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram_);
    if (es.eigenvalues()(0) < tol.subspace_gram) {
      throw Error(ErrorCode::invalid_subspace, "control basis is linearly dependent");
    }
  }
  ortho_ = orthonormalize(basis_);

  if (const auto* t = std::get_if<TypicalBound>(&bound_)) {
    if (!(t->omega > 0.0)) throw Error(ErrorCode::invalid_argument, "typical bound omega must be positive");
    if (l > 0 && (gram_ - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff() > tol.subspace_gram) {
      throw Error(ErrorCode::invalid_subspace, "typical constraint needs an orthonormal control basis");
    }
  } else if (const auto* b = std::get_if<BoxBound>(&bound_)) {
    if (b->lo.size() != basis_.size() || b->hi.size() != basis_.size()) {
      throw Error(ErrorCode::dimension_mismatch, "box bounds must have one entry per control");
    }
    for (std::size_t j = 0; j < basis_.size(); ++j) {
      if (!(b->lo[j] <= b->hi[j])) throw Error(ErrorCode::invalid_argument, "box bound has lo > hi");
    }
  } else if (const auto* ball = std::get_if<BallBound>(&bound_)) {
    if (!(ball->radius > 0.0)) throw Error(ErrorCode::invalid_argument, "ball radius must be positive");
    if (ball->metric.rows() != l || ball->metric.cols() != l) {
      throw Error(ErrorCode::dimension_mismatch, "ball metric must be l x l");
    }
    if ((ball->metric - ball->metric.transpose()).cwiseAbs().maxCoeff() > tol.symmetry) {
      throw Error(ErrorCode::invalid_argument, "ball metric must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ball->metric);
    if (l > 0 && es.eigenvalues()(0) <= 0.0) {
      throw Error(ErrorCode::invalid_argument, "ball metric must be positive definite");
    }
  }
}

HermitianOp ConstraintSet::hamiltonian(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != controls()) throw Error(ErrorCode::dimension_mismatch, "control vector has wrong length");
  HermitianOp h = drift_;
  for (int j = 0; j < controls(); ++j) h += u(j) * basis_[static_cast<std::size_t>(j)];
  return h;
}

Eigen::VectorXd ConstraintSet::coordinates(const HermitianOp& h) const {
  if (controls() == 0) return Eigen::VectorXd(0);
  const Eigen::VectorXd rhs = pairings(h - drift_);
  return gram_.ldlt().solve(rhs);
}

double ConstraintSet::bound_violation(const Eigen::Ref<const Eigen::VectorXd>& u) const {
  if (u.size() != controls()) throw Error(ErrorCode::dimension_mismatch, "control vector has wrong length");
  if (const auto* t = std::get_if<TypicalBound>(&bound_)) {
    return std::max(0.0, u.norm() - t->omega);
  }
  if (const auto* b = std::get_if<BoxBound>(&bound_)) {
    double v = 0.0;
    for (int j = 0; j < controls(); ++j) {
      v = std::max(v, b->lo[static_cast<std::size_t>(j)] - u(j));
      v = std::max(v, u(j) - b->hi[static_cast<std::size_t>(j)]);
    }
    return v;
  }
  const auto& ball = std::get<BallBound>(bound_);
  return std::max(0.0, std::sqrt(std::max(0.0, u.dot(ball.metric * u))) - ball.radius);
}

HermitianOp ConstraintSet::project(const HermitianOp& a) const { return qbrach::project(a, ortho_); }

Eigen::VectorXd ConstraintSet::pairings(const HermitianOp& f) const {
  Eigen::VectorXd g(controls());
  for (int j = 0; j < controls(); ++j) g(j) = inner(f, basis_[static_cast<std::size_t>(j)]);
  return g;
}

Eigen::VectorXd ConstraintSet::random_admissible(std::mt19937_64& rng) const {
  const int l = controls();
  Eigen::VectorXd u(l);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (const auto* b = std::get_if<BoxBound>(&bound_)) {
    for (int j = 0; j < l; ++j) {
      const auto k = static_cast<std::size_t>(j);
      u(j) = b->lo[k] + (b->hi[k] - b->lo[k]) * unit(rng);
    }
    return u;
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int j = 0; j < l; ++j) u(j) = normal(rng);
  const double nrm = u.norm();
  if (nrm > 0.0) u /= nrm;
  const double radial = std::pow(unit(rng), 1.0 / std::max(1, l));
  if (const auto* t = std::get_if<TypicalBound>(&bound_)) return t->omega * radial * u;
  const auto& ball = std::get<BallBound>(bound_);
  const double scale = std::sqrt(u.dot(ball.metric * u));
  return ball.radius * radial * u / scale;
}

ClassificationReport classify(const ConstraintSet& c, const Tolerances& tol) {
  ClassificationReport r;
  const HermitianOp& hd = c.drift();
  r.drift_in_subspace = hs_norm(hd - c.project(hd)) < tol.membership;
  r.type_label = r.drift_in_subspace ? "lollipop" : "lotus_leaf";
  r.planar = true;
  r.typical = c.kind() == ConstraintKind::typical;

  std::vector<HermitianOp> brackets;
  const auto& basis = c.orthonormal_basis();
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) brackets.push_back(commutator(basis[i], basis[j]));
  const auto span = orthonormalize(brackets, 1e-10);
  r.drift_in_bracket = hs_norm(hd - qbrach::project(hd, span)) < tol.membership;

  if (const auto* b = std::get_if<BoxBound>(&c.bound())) {
    if (c.controls() == 1 && std::abs(b->lo[0] + b->hi[0]) < tol.membership &&
        std::abs(inner(c.control_basis()[0], c.control_basis()[0]) - 1.0) < tol.subspace_gram) {
      r.notes.push_back("one-dimensional symmetric box coincides with the typical bound omega=" +
                        std::to_string(b->hi[0]));
    }
  } else if (const auto* ball = std::get_if<BallBound>(&c.bound())) {
    const Eigen::MatrixXd g = gram_matrix(c.control_basis());
    if ((ball->metric - g).cwiseAbs().maxCoeff() < tol.subspace_gram) {
      r.notes.push_back("ball metric equals the Hilbert-Schmidt Gram matrix, so the bound is typical");
    }
  }
  return r;
}

MaximizerResult maximizer(const HermitianOp& f, const ConstraintSet& c, const Tolerances& tol) {
  if (f.dim() != c.dim()) throw Error(ErrorCode::dimension_mismatch, "maximizer: costate dimension mismatch");
  MaximizerResult out;
  const HermitianOp pf = c.project(f);
  if (hs_norm(pf) < tol.singular) {
    out.singular = true;
    out.hamiltonian = c.drift();
    return out;
  }
  const Eigen::VectorXd g = c.pairings(f);
  const int l = c.controls();
  Eigen::VectorXd u(l);
  if (const auto* t = std::get_if<TypicalBound>(&c.bound())) {
    u = t->omega * g / g.norm();
  } else if (const auto* b = std::get_if<BoxBound>(&c.bound())) {
    for (int j = 0; j < l; ++j) {
      const auto k = static_cast<std::size_t>(j);
      if (std::abs(g(j)) < tol.singular) {
        out.partially_singular.push_back(j);
        out.non_unique = out.non_unique || b->lo[k] != b->hi[k];
        u(j) = b->lo[k];
      } else {
        u(j) = g(j) > 0.0 ? b->hi[k] : b->lo[k];
      }
    }
  } else {
    const auto& ball = std::get<BallBound>(c.bound());
    const Eigen::VectorXd w = ball.metric.ldlt().solve(g);
    u = ball.radius * w / std::sqrt(g.dot(w));
  }
  out.controls = u;
  out.hamiltonian = c.hamiltonian(u);
  return out;
}

bool is_singular(const HermitianOp& f, const ConstraintSet& c, double tol) {
  if (c.controls() == 0) return true;
  return c.pairings(f).cwiseAbs().maxCoeff() < tol;
}

double pontryagin_h(const HermitianOp& h, const HermitianOp& f) { return -1.0 + trace_product(h, f); }

}  // namespace qbrach
