#include "qbrach/dynamics.hpp"

#include <cmath>
#include <string>

namespace qbrach {

HermitianOp Protocol::hamiltonian(int cell) const { return constraint.hamiltonian(controls.row(cell).transpose()); }

void Protocol::validate(double bound_tol) const {
  if (grid.size() < 2) throw Error(ErrorCode::invalid_argument, "protocol grid needs at least two points");
  if (grid.front() != 0.0) throw Error(ErrorCode::invalid_argument, "protocol grid must start at 0");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw Error(ErrorCode::invalid_argument, "protocol grid must be strictly increasing");
  }
  if (controls.rows() != cells() || controls.cols() != constraint.controls()) {
    throw Error(ErrorCode::dimension_mismatch, "protocol controls must be (grid-1) x l");
  }
  for (int k = 0; k < cells(); ++k) {
    const double v = constraint.bound_violation(controls.row(k).transpose());
    if (v > bound_tol) {
      throw Error(ErrorCode::invalid_argument,
                  "protocol sample " + std::to_string(k) + " violates the control bound by " + std::to_string(v));
    }
  }
}

Protocol make_protocol(std::vector<double> grid, Eigen::MatrixXd controls, ConstraintSet constraint, Sampling sampling) {
  Protocol p{std::move(grid), std::move(controls), std::move(constraint), sampling};
  p.validate();
  return p;
}

std::vector<double> uniform_grid(double duration, int cells) {
  if (cells < 1) throw Error(ErrorCode::invalid_argument, "grid needs at least one cell");
  std::vector<double> grid(static_cast<std::size_t>(cells) + 1);
  for (int k = 0; k <= cells; ++k) grid[static_cast<std::size_t>(k)] = duration * k / cells;
  grid.back() = duration;
  return grid;
}

Protocol sample_protocol(const ConstraintSet& c, double duration, int cells,
                         const std::function<Eigen::VectorXd(double)>& control, Sampling sampling) {
  Protocol p;
  p.grid = uniform_grid(duration, cells);
  p.constraint = c;
  p.sampling = sampling;
  p.controls.resize(cells, c.controls());
  for (int k = 0; k < cells; ++k) {
    const double t0 = p.grid[static_cast<std::size_t>(k)];
    const double t1 = p.grid[static_cast<std::size_t>(k) + 1];
    p.controls.row(k) = control(sampling == Sampling::left ? t0 : 0.5 * (t0 + t1)).transpose();
  }
  return p;
}

Trajectory evolve_unitary(const Protocol& p) {
  p.validate(1e-8);
  const int cells = p.cells();
  Trajectory traj;
  traj.grid = p.grid;
  traj.unitaries.reserve(p.grid.size());
  traj.hamiltonians.reserve(p.grid.size());
  traj.controls.resize(cells + 1, p.constraint.controls());
  traj.unitaries.push_back(UnitaryOp::identity(p.constraint.dim()));
  for (int k = 0; k < cells; ++k) {
    const HermitianOp h = p.hamiltonian(k);
    const double dt = p.grid[static_cast<std::size_t>(k) + 1] - p.grid[static_cast<std::size_t>(k)];
    traj.unitaries.push_back(exp_op(h, dt) * traj.unitaries.back());
    traj.hamiltonians.push_back(h);
    traj.controls.row(k) = p.controls.row(k);
  }
  traj.hamiltonians.push_back(traj.hamiltonians.back());
  traj.controls.row(cells) = p.controls.row(cells - 1);
  return traj;
}

Trajectory evolve_costate(const HermitianOp& f0, Trajectory traj) {
  if (traj.unitaries.empty()) throw Error(ErrorCode::invalid_argument, "trajectory has no unitaries");
  if (f0.dim() != traj.unitaries.front().dim()) {
    throw Error(ErrorCode::dimension_mismatch, "costate dimension does not match the trajectory");
  }
  traj.costates.clear();
  traj.costates.reserve(traj.unitaries.size());
  for (const auto& u : traj.unitaries) traj.costates.push_back(conjugate(u, f0));
  return traj;
}

ConservationReport conservation_report(const Trajectory& traj) {
  if (!traj.has_costates()) throw Error(ErrorCode::missing_costate, "conservation report needs costates");
  ConservationReport r;
  const std::size_t n = traj.unitaries.size();
  const double hf0 = trace_product(traj.hamiltonians[0], traj.costates[0]);
  const double f20 = trace_product(traj.costates[0], traj.costates[0]);
  r.hf_initial = hf0;
  const int dim = traj.unitaries[0].dim();
  const Matrix id = Matrix::Identity(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    r.hf_drift = std::max(r.hf_drift, std::abs(trace_product(traj.hamiltonians[k], traj.costates[k]) - hf0));
    r.f2_drift = std::max(r.f2_drift, std::abs(trace_product(traj.costates[k], traj.costates[k]) - f20));
    const Matrix& u = traj.unitaries[k].matrix();
    r.unitarity_drift = std::max(r.unitarity_drift, max_abs(u.adjoint() * u - id));
  }
  return r;
}

BoundaryResidual boundary_residual(const UnitaryOp& u, const UnitaryOp& target) {
  if (u.dim() != target.dim()) throw Error(ErrorCode::dimension_mismatch, "boundary residual dimension mismatch");
  BoundaryResidual r;
  const Complex overlap = (target.matrix().adjoint() * u.matrix()).trace();
  r.fidelity = std::max(0.0, 1.0 - std::abs(overlap) / u.dim());
  r.phase = (u.matrix() - target.matrix()).norm();
  return r;
}

BoundaryResidual boundary_residual(const Trajectory& traj, const UnitaryOp& target) {
  if (traj.unitaries.empty()) throw Error(ErrorCode::invalid_argument, "trajectory has no unitaries");
  return boundary_residual(traj.final_unitary(), target);
}

}  // namespace qbrach
