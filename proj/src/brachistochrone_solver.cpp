#include "qbrach/brachistochrone_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "qbrach/detail/linalg.hpp"

namespace qbrach {

using detail::commutator_raw;
using detail::expm_hermitian;
using detail::inner_raw;

namespace {

template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next++; i < count; i = next++) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// Raw-matrix form of the pointwise maximizer used inside the flow.
class ControlLaw {
 public:
  ControlLaw(const ConstraintSet& c, double singular_tol) : c_(c), tol_(singular_tol) {
    drift_ = c.drift().matrix();
    for (const auto& b : c.control_basis()) basis_.push_back(b.matrix());
    const Eigen::MatrixXd g = gram_matrix(c.control_basis());
    gram_inv_ = g.size() ? Eigen::MatrixXd(g.inverse()) : Eigen::MatrixXd(0, 0);
    if (const auto* ball = std::get_if<BallBound>(&c.bound())) metric_inv_ = ball->metric.inverse();
  }

  int controls() const { return static_cast<int>(basis_.size()); }

  // Returns false (and leaves u untouched) when F is singular.
  bool evaluate(const Matrix& f, Eigen::VectorXd& u) const {
    const int l = controls();
    if (l == 0) return false;
    Eigen::VectorXd g(l);
    for (int j = 0; j < l; ++j) g(j) = inner_raw(f, basis_[static_cast<std::size_t>(j)]);
    const double pnorm = std::sqrt(std::max(0.0, g.dot(gram_inv_ * g)));
    if (pnorm < tol_) return false;
    if (const auto* t = std::get_if<TypicalBound>(&c_.bound())) {
      u = t->omega * g / g.norm();
    } else if (const auto* b = std::get_if<BoxBound>(&c_.bound())) {
      u.resize(l);
      for (int j = 0; j < l; ++j) {
        const auto k = static_cast<std::size_t>(j);
        u(j) = (std::abs(g(j)) >= tol_ && g(j) > 0.0) ? b->hi[k] : b->lo[k];
      }
    } else {
      const auto& ball = std::get<BallBound>(c_.bound());
      const Eigen::VectorXd w = metric_inv_ * g;
      u = ball.radius * w / std::sqrt(g.dot(w));
    }
    return true;
  }

  Matrix hamiltonian(const Eigen::VectorXd& u) const {
    Matrix h = drift_;
    for (int j = 0; j < u.size(); ++j) h += u(j) * basis_[static_cast<std::size_t>(j)];
    return h;
  }

  const Matrix& drift() const { return drift_; }

 private:
  const ConstraintSet& c_;
  double tol_;
  Matrix drift_;
  std::vector<Matrix> basis_;
  Eigen::MatrixXd gram_inv_;
  Eigen::MatrixXd metric_inv_;
};

struct FlowRecord {
  std::vector<Matrix> unitaries;
  std::vector<Matrix> costates;
  std::vector<Matrix> hamiltonians;
  Eigen::MatrixXd node_controls;
  Eigen::MatrixXd mid_controls;
  std::vector<char> singular;
};

struct FlowOutcome {
  Matrix u_final;
  Matrix h_final;
  Matrix f_final;
  int singular_cells = 0;
  bool ok = true;
};

Matrix dexpinv(const Matrix& phi, const Matrix& w) {
  const Matrix c1 = commutator_raw(phi, w);
  return w - 0.5 * c1 + (1.0 / 12.0) * commutator_raw(phi, c1);
}

// Integrates iU' = H(F) U with F = U F0 U^dagger and H the maximizer, by a
// fourth-order Runge-Kutta-Munthe-Kaas scheme with exact exponentials.
FlowOutcome run_flow(const ControlLaw& law, const Matrix& f0, double duration, int cells, FlowRecord* rec) {
  const auto n = f0.rows();
  const double h = duration / cells;
  Matrix y = Matrix::Identity(n, n);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(law.controls());
  FlowOutcome out;
  if (rec) {
    rec->unitaries.clear();
    rec->costates.clear();
    rec->hamiltonians.clear();
    rec->node_controls.resize(cells + 1, law.controls());
    rec->mid_controls.resize(cells, law.controls());
    rec->singular.assign(static_cast<std::size_t>(cells), 0);
  }
  auto stage = [&](const Matrix& yy) -> Matrix {
    const Matrix f = yy * f0 * yy.adjoint();
    law.evaluate(f, u);
    return law.hamiltonian(u);
  };
  for (int k = 0; k < cells; ++k) {
    const Matrix f = y * f0 * y.adjoint();
    const bool regular = law.evaluate(f, u);
    if (!regular) ++out.singular_cells;
    const Matrix h0 = law.hamiltonian(u);
    if (rec) {
      rec->unitaries.push_back(y);
      rec->costates.push_back(f);
      rec->hamiltonians.push_back(h0);
      rec->node_controls.row(k) = u.transpose();
      rec->singular[static_cast<std::size_t>(k)] = regular ? 0 : 1;
    }
    const Matrix k1 = h * h0;
    const Matrix p2 = 0.5 * k1;
    const Matrix k2 = dexpinv(p2, h * stage(expm_hermitian(p2, 1.0) * y));
    const Matrix p3 = 0.5 * k2;
    const Matrix k3 = dexpinv(p3, h * stage(expm_hermitian(p3, 1.0) * y));
    const Matrix k4 = dexpinv(k3, h * stage(expm_hermitian(k3, 1.0) * y));
    const Matrix phi = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    if (rec) {
      Eigen::VectorXd um = rec->node_controls.row(k).transpose();
      const Matrix ym = expm_hermitian(phi, 0.5) * y;
      law.evaluate(ym * f0 * ym.adjoint(), um);
      rec->mid_controls.row(k) = um.transpose();
    }
    y = expm_hermitian(phi, 1.0) * y;
    if (!y.allFinite()) {
      out.ok = false;
      return out;
    }
  }
  out.f_final = y * f0 * y.adjoint();
  law.evaluate(out.f_final, u);
  out.h_final = law.hamiltonian(u);
  out.u_final = y;
  if (rec) {
    rec->unitaries.push_back(y);
    rec->costates.push_back(out.f_final);
    rec->hamiltonians.push_back(out.h_final);
    rec->node_controls.row(cells) = u.transpose();
  }
  return out;
}

class ShootingSystem {
 public:
  ShootingSystem(const ShootingProblem& prob)
      : prob_(prob),
        law_(prob.constraint, kTolerances.singular),
        basis_(standard_basis(prob.constraint.dim())),
        target_adj_(prob.target.matrix().adjoint()) {}

  int unknowns() const { return static_cast<int>(basis_.size()) + 1; }
  const BasisSet& basis() const { return basis_; }
  const ControlLaw& law() const { return law_; }

  Matrix costate(const Eigen::VectorXd& f) const { return reconstruct(f, basis_).matrix(); }

  // Rescales the costate so that tr[H(0)F(0)] = 1. Returns false when the
  // seed is singular or the Pontryagin value is not positive.
  bool normalize(Eigen::VectorXd& f) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(law_.controls());
    const Matrix fm = costate(f);
    if (!law_.evaluate(fm, u)) return false;
    const double s = 2.0 * inner_raw(law_.hamiltonian(u), fm);
    if (!(s > 1e-12 * std::max(1.0, f.norm()))) return false;
    f /= s;
    return true;
  }

  struct Eval {
    Eigen::VectorXd r;
    int singular_cells = 0;
    bool ok = false;
  };

  Eval residual(const Eigen::VectorXd& x, int cells) const {
    Eval e;
    Eigen::VectorXd f = x.head(unknowns() - 1);
    const double duration = x(unknowns() - 1);
    const double t_max = prob_.options.t_max.value_or(std::numeric_limits<double>::infinity());
    if (!(duration > 0.0) || duration > t_max || !normalize(f)) return e;
    const FlowOutcome fo = run_flow(law_, costate(f), duration, cells, nullptr);
    if (!fo.ok) return e;
    const UnitaryOp mismatch = UnitaryOp::assume_unitary(target_adj_ * fo.u_final);
    e.r.resize(unknowns());
    e.r.head(unknowns() - 1) = expand(principal_log(mismatch), basis_);
    e.r(unknowns() - 1) = 2.0 * inner_raw(fo.h_final, fo.f_final) - 1.0;
    e.singular_cells = fo.singular_cells;
    e.ok = e.r.allFinite();
    return e;
  }

 private:
  const ShootingProblem& prob_;
  ControlLaw law_;
  const BasisSet& basis_;
  Matrix target_adj_;
};

struct LmOutcome {
  Eigen::VectorXd x;
  double residual = std::numeric_limits<double>::infinity();
  int singular_cells = 0;
  bool ok = false;
};

// Levenberg-Marquardt with forward-difference Jacobian. The costate part of
// x is kept normalized after every accepted step.
LmOutcome levenberg_marquardt(const ShootingSystem& sys, Eigen::VectorXd x, int cells, int max_iter, double stop) {
  LmOutcome best;
  const int n = sys.unknowns();
  {
    Eigen::VectorXd f = x.head(n - 1);
    if (!sys.normalize(f)) return best;
    x.head(n - 1) = f;
  }
  auto cur = sys.residual(x, cells);
  if (!cur.ok) return best;
  double mu = 1e-3;
  for (int it = 0; it < max_iter; ++it) {
    const double rn = cur.r.norm();
    if (rn < stop) break;
    Eigen::MatrixXd jac(n, n);
    bool jac_ok = true;
    for (int i = 0; i < n && jac_ok; ++i) {
      const double step = 1e-7 * std::max(1.0, std::abs(x(i)));
      Eigen::VectorXd xp = x;
      xp(i) += step;
      auto ep = sys.residual(xp, cells);
      if (!ep.ok) {
        xp(i) = x(i) - step;
        ep = sys.residual(xp, cells);
        if (!ep.ok) {
          jac_ok = false;
          break;
        }
        jac.col(i) = (cur.r - ep.r) / step;
      } else {
        jac.col(i) = (ep.r - cur.r) / step;
      }
    }
    if (!jac_ok) break;
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * cur.r;
    const double scale_floor = 1e-12 * std::max(1.0, a.diagonal().maxCoeff());
    bool accepted = false;
    while (mu < 1e16) {
      Eigen::MatrixXd damped = a;
      for (int i = 0; i < n; ++i) damped(i, i) += mu * (a(i, i) + scale_floor);
      const Eigen::VectorXd delta = damped.ldlt().solve(-g);
      Eigen::VectorXd xn = x + delta;
      Eigen::VectorXd f = xn.head(n - 1);
      if (delta.allFinite() && sys.normalize(f)) {
        xn.head(n - 1) = f;
        auto en = sys.residual(xn, cells);
        if (en.ok && en.r.norm() < rn) {
          x = xn;
          cur = en;
          mu = std::max(mu / 3.0, 1e-12);
          accepted = true;
          break;
        }
      }
      mu *= 4.0;
    }
    if (!accepted) break;
    if (std::abs(rn - cur.r.norm()) < 1e-15 * std::max(1.0, rn) && cur.r.norm() > stop) break;
  }
  best.x = x;
  best.residual = cur.r.norm();
  best.singular_cells = cur.singular_cells;
  best.ok = true;
  return best;
}

double effective_amplitude(const ConstraintSet& c) {
  double basis_norm = 0.0;
  for (const auto& b : c.control_basis()) basis_norm = std::max(basis_norm, hs_norm(b));
  if (const auto* t = std::get_if<TypicalBound>(&c.bound())) return t->omega;
  if (const auto* b = std::get_if<BoxBound>(&c.bound())) {
    double m = 0.0;
    for (std::size_t j = 0; j < b->lo.size(); ++j) m = std::max({m, std::abs(b->lo[j]), std::abs(b->hi[j])});
    return std::max(1e-12, m * basis_norm);
  }
  const auto& ball = std::get<BallBound>(c.bound());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ball.metric);
  return std::max(1e-12, ball.radius * basis_norm / std::sqrt(es.eigenvalues()(0)));
}

std::vector<std::pair<double, double>> merge_intervals(const std::vector<char>& flags, const std::vector<double>& grid) {
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!flags[k]) continue;
    if (!out.empty() && out.back().second == grid[k]) {
      out.back().second = grid[k + 1];
    } else {
      out.emplace_back(grid[k], grid[k + 1]);
    }
  }
  return out;
}

ConstraintSet full_typical(const HermitianOp& drift, double omega) {
  const BasisSet& b = standard_basis(drift.dim());
  return ConstraintSet(drift, b.elements, TypicalBound{omega});
}

}  // namespace

GeodesicSolution drift_free_geodesic(const UnitaryOp& target, double omega, const Tolerances& tol) {
  if (!(omega > 0.0)) throw Error(ErrorCode::invalid_argument, "geodesic: omega must be positive");
  const HermitianOp l = log_op(target, tol);
  const double norm = hs_norm(l);
  if (norm < 1e-14) return {HermitianOp::zero(target.dim()), 0.0};
  return {l * (omega / norm), norm / omega};
}

ZermeloPoint zermelo_solution(const HermitianOp& drift, const HermitianOp& hc0, double t) {
  const UnitaryOp rot = exp_op(drift, t);
  return {drift + conjugate(rot, hc0), rot * exp_op(hc0, t)};
}

SolveResult zermelo_solve(const HermitianOp& drift, double omega, const UnitaryOp& target, int grid) {
  if (!(omega > 0.0)) throw Error(ErrorCode::invalid_argument, "zermelo: omega must be positive");
  if (drift.dim() != target.dim()) throw Error(ErrorCode::dimension_mismatch, "zermelo: drift and target differ in dimension");
  if (grid < 1) throw Error(ErrorCode::invalid_argument, "zermelo: grid must be positive");
  SolveResult res;
  res.method = "zermelo";
  const int n = drift.dim();
  auto lifted = [&](double t) { return exp_op(drift, -t) * target; };
  auto g = [&](double t) { return log_norm(lifted(t)) - omega * t; };

  const ConstraintSet cset = full_typical(drift, omega);
  if (log_norm(target) < 1e-14) {
    res.converged = true;
    res.duration = 0.0;
    res.f0 = HermitianOp::zero(n);
    res.message = "target is the identity";
    res.protocol.constraint = cset;
    return res;
  }
  const double t_max = std::numbers::pi * std::sqrt(static_cast<double>(n)) / omega * 1.01;
  const int scan = 4096;
  double lo = 0.0, hi = -1.0;
  double g_lo = g(0.0);
  for (int i = 1; i <= scan; ++i) {
    const double t = t_max * i / scan;
    const double gt = g(t);
    if (gt <= 0.0) {
      hi = t;
      break;
    }
    lo = t;
    g_lo = gt;
  }
  (void)g_lo;
  if (hi < 0.0) {
    res.converged = false;
    res.message = "no root of ||log(e^{iH_d T} U_f)|| = omega T below T_max";
    res.protocol.constraint = cset;
    return res;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  const double duration = 0.5 * (lo + hi);
  const HermitianOp l = principal_log(lifted(duration));
  const HermitianOp hc0 = l * (omega / hs_norm(l));

  res.duration = duration;
  res.protocol = sample_protocol(
      cset, duration, grid,
      [&](double t) { return cset.coordinates(zermelo_solution(drift, hc0, t).hamiltonian); }, Sampling::midpoint);
  const double lambda = 1.0 / trace_product(drift + hc0, hc0);
  Trajectory& tr = res.trajectory;
  tr.grid = res.protocol.grid;
  tr.controls.resize(grid + 1, cset.controls());
  for (int k = 0; k <= grid; ++k) {
    const double t = tr.grid[static_cast<std::size_t>(k)];
    const ZermeloPoint zp = zermelo_solution(drift, hc0, t);
    tr.unitaries.push_back(zp.unitary);
    tr.hamiltonians.push_back(zp.hamiltonian);
    tr.costates.push_back((zp.hamiltonian - drift) * lambda);
    tr.controls.row(k) = cset.coordinates(zp.hamiltonian).transpose();
  }
  res.f0 = tr.costates.front();
  res.conservation = conservation_report(tr);
  res.boundary = boundary_residual(tr, target);
  res.residual = res.boundary.phase;
  res.converged = res.residual < 1e-8 && lambda > 0.0;
  res.starts = 0;
  if (lambda <= 0.0) res.message = "Zermelo costate normalization is not positive (abnormal extremal)";
  res.extremals.push_back({duration, res.residual, -1});
  return res;
}

ReductionResult interaction_picture_reduce(const ConstraintSet& c, const Tolerances& tol) {
  ReductionResult out;
  out.reduced = c;
  if (c.kind() != ConstraintKind::typical) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> es(c.drift().matrix());
  const double op_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  if (op_norm > 0.0) {
    const auto& basis = c.orthonormal_basis();
    for (int k = 1; k <= 16; ++k) {
      const double s = k * std::numbers::pi / (8.0 * op_norm);
      const UnitaryOp rot = exp_op(c.drift(), -s);
      for (const auto& b : basis) {
        const HermitianOp moved = conjugate(rot, b);
        if (hs_norm(moved - c.project(moved)) > tol.symmetry) return out;
      }
    }
  }
  out.reducible = true;
  out.reduced = ConstraintSet(HermitianOp::zero(c.dim()), c.control_basis(), c.bound());
  return out;
}

SolveResult solve_shooting(const ShootingProblem& prob) {
  const ShootingOptions& opt = prob.options;
  if (opt.grid < 16) throw Error(ErrorCode::invalid_argument, "shooting grid must have at least 16 cells");
  if (opt.multistarts < 1) throw Error(ErrorCode::invalid_argument, "shooting needs at least one start");
  if (prob.target.dim() != prob.constraint.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "target and constraint differ in dimension");
  }
  const ShootingSystem sys(prob);
  const int n = sys.unknowns();
  const int coarse = std::max(16, opt.grid / 8);
  const double t_est = std::max(log_norm(prob.target), 0.05) / effective_amplitude(prob.constraint);

  struct Start {
    LmOutcome coarse;
    LmOutcome fine;
    bool degenerate = false;
    bool refine = false;
  };
  std::vector<Start> starts(static_cast<std::size_t>(opt.multistarts));

  parallel_for(opt.multistarts, opt.threads, [&](int s) {
    std::seed_seq seq{static_cast<std::uint32_t>(opt.seed & 0xffffffffu), static_cast<std::uint32_t>(opt.seed >> 32),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n - 1; ++i) x(i) = normal(rng);
    x(n - 1) = t_est * (0.5 + unit(rng));
    Eigen::VectorXd f = x.head(n - 1);
    if (!sys.normalize(f)) {
      f = -x.head(n - 1);
      if (!sys.normalize(f)) return;
    }
    x.head(n - 1) = f;
    auto& st = starts[static_cast<std::size_t>(s)];
    st.coarse = levenberg_marquardt(sys, x, coarse, opt.max_iterations, 1e-12);
    if (st.coarse.ok) st.degenerate = st.coarse.singular_cells * 2 > coarse;
  });

  bool any_flow = false, all_degenerate = true;
  for (const auto& st : starts) {
    if (!st.coarse.ok) continue;
    any_flow = true;
    all_degenerate = all_degenerate && st.degenerate;
  }
  if (any_flow && all_degenerate) {
    throw Error(ErrorCode::degenerate_problem,
                "maximizer is singular on more than half of the grid for every start; use the singular-arc (GLC) analysis");
  }

  // Refine distinct coarse solutions on the full grid.
  std::vector<int> refine_of(starts.size(), -1);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const auto& c = starts[s].coarse;
    if (!c.ok || c.residual > 1e-2) continue;
    for (std::size_t p = 0; p < s; ++p) {
      const auto& q = starts[p];
      if (q.refine && (q.coarse.x - c.x).norm() < 1e-7 * std::max(1.0, c.x.norm())) {
        refine_of[s] = static_cast<int>(p);
        break;
      }
    }
    if (refine_of[s] < 0) starts[s].refine = true;
  }
  parallel_for(opt.multistarts, opt.threads, [&](int s) {
    auto& st = starts[static_cast<std::size_t>(s)];
    if (st.refine) st.fine = levenberg_marquardt(sys, st.coarse.x, opt.grid, 40, opt.tol * 1e-3);
  });

  SolveResult res;
  res.method = "shooting";
  res.seed = opt.seed;
  res.starts = opt.multistarts;
  int best = -1;
  bool best_conv = false;
  for (int s = 0; s < opt.multistarts; ++s) {
    const auto& st = starts[static_cast<std::size_t>(s)];
    if (!st.refine || !st.fine.ok) continue;
    const bool conv = st.fine.residual < opt.tol;
    const double t = st.fine.x(n - 1);
    if (conv) {
      bool dup = false;
      for (const auto& e : res.extremals) dup = dup || std::abs(e.duration - t) <= 1e-7 * t;
      if (!dup) res.extremals.push_back({t, st.fine.residual, s});
    }
    if (best < 0) {
      best = s;
      best_conv = conv;
      continue;
    }
    const auto& b = starts[static_cast<std::size_t>(best)].fine;
    const double tb = b.x(n - 1);
    bool better;
    if (conv != best_conv) {
      better = conv;
    } else if (conv) {
      better = t < tb - 1e-9 * tb || (std::abs(t - tb) <= 1e-9 * tb && st.fine.residual < b.residual);
    } else {
      better = st.fine.residual < b.residual;
    }
    if (better) {
      best = s;
      best_conv = conv;
    }
  }
  std::sort(res.extremals.begin(), res.extremals.end(),
            [](const Extremal& a, const Extremal& b) { return a.duration < b.duration || (a.duration == b.duration && a.start < b.start); });

  LmOutcome chosen;
  if (best >= 0) {
    chosen = starts[static_cast<std::size_t>(best)].fine;
  } else {
    for (int s = 0; s < opt.multistarts; ++s) {
      const auto& c = starts[static_cast<std::size_t>(s)].coarse;
      if (c.ok && (best < 0 || c.residual < chosen.residual)) {
        best = s;
        chosen = c;
      }
    }
  }
  res.best_start = best;
  res.protocol.constraint = prob.constraint;
  if (best < 0) {
    res.converged = false;
    res.residual = std::numeric_limits<double>::infinity();
    res.message = "no start produced a normalizable costate";
    return res;
  }

  Eigen::VectorXd f = chosen.x.head(n - 1);
  sys.normalize(f);
  const double duration = chosen.x(n - 1);
  const auto final_eval = sys.residual(chosen.x, opt.grid);
  FlowRecord rec;
  run_flow(sys.law(), sys.costate(f), duration, opt.grid, &rec);

  res.duration = duration;
  res.residual = final_eval.ok ? final_eval.r.norm() : chosen.residual;
  res.converged = best_conv && res.residual < opt.tol;
  res.f0 = reconstruct(f, sys.basis());
  res.protocol.grid = uniform_grid(duration, opt.grid);
  res.protocol.controls = rec.mid_controls;
  res.protocol.sampling = Sampling::midpoint;
  Trajectory& tr = res.trajectory;
  tr.grid = res.protocol.grid;
  tr.controls = rec.node_controls;
  for (std::size_t k = 0; k < rec.unitaries.size(); ++k) {
    tr.unitaries.push_back(UnitaryOp::assume_unitary(rec.unitaries[k]));
    tr.hamiltonians.push_back(HermitianOp::hermitian_part(rec.hamiltonians[k]));
    tr.costates.push_back(HermitianOp::hermitian_part(rec.costates[k]));
  }
  res.singular_intervals = merge_intervals(rec.singular, tr.grid);
  res.conservation = conservation_report(tr);
  res.boundary = boundary_residual(tr, prob.target);
  if (!res.singular_intervals.empty()) {
    res.message = "protocol contains singular cells (previous control held); audit with glc";
  } else if (!res.converged) {
    res.message = "no start converged below the residual tolerance";
  }
  return res;
}

AuditReport qb_consistency_audit(const SolveResult& result, int samples, std::uint64_t seed, const Tolerances& tol) {
  const Trajectory& tr = result.trajectory;
  if (!tr.has_costates()) throw Error(ErrorCode::missing_costate, "audit needs costates");
  AuditReport rep;
  std::mt19937_64 rng(seed);
  const ConstraintSet& c = result.protocol.constraint;
  const HermitianOp& f0 = tr.costates.front();
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < tr.costates.size(); ++k) {
    const HermitianOp& f = tr.costates[k];
    const double hf = trace_product(tr.hamiltonians[k], f);
    for (int s = 0; s < samples; ++s) {
      const double v = trace_product(c.hamiltonian(c.random_admissible(rng)), f) - hf;
      if (v > worst) {
        worst = v;
        rep.worst_node = static_cast<int>(k);
      }
    }
    rep.normalization_violation = std::max(rep.normalization_violation, std::abs(hf - 1.0));
    rep.flow_violation = std::max(rep.flow_violation, max_abs((f - conjugate(tr.unitaries[k], f0)).matrix()));
  }
  rep.max_condition_violation = std::max(0.0, worst);
  rep.passed = rep.max_condition_violation <= 1e-8 && rep.normalization_violation <= tol.conservation &&
               rep.flow_violation <= 1e-10;
  return rep;
}

}  // namespace qbrach
