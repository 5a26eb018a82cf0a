#pragma once

// Schrodinger and costate propagation for piecewise-constant protocols.

#include <functional>
#include <vector>

#include "qbrach/constraint_model.hpp"

namespace qbrach {

enum class Sampling { left, midpoint };

/// Piecewise-constant control history. controls.row(k) acts on
/// [grid[k], grid[k+1]).
struct Protocol {
  std::vector<double> grid;
  Eigen::MatrixXd controls;
  ConstraintSet constraint;
  Sampling sampling = Sampling::left;

  int cells() const noexcept { return static_cast<int>(grid.size()) - 1; }
  double duration() const { return grid.empty() ? 0.0 : grid.back() - grid.front(); }
  HermitianOp hamiltonian(int cell) const;

  /// Throws invalid_argument when the grid or the samples violate the
  /// protocol invariants.
  void validate(double bound_tol = 1e-10) const;
};

Protocol make_protocol(std::vector<double> grid, Eigen::MatrixXd controls, ConstraintSet constraint,
                       Sampling sampling = Sampling::left);

/// Samples u(t) on each cell of a uniform grid with `cells` cells on [0, T].
Protocol sample_protocol(const ConstraintSet& c, double duration, int cells,
                         const std::function<Eigen::VectorXd(double)>& control, Sampling sampling);

std::vector<double> uniform_grid(double duration, int cells);

struct Trajectory {
  std::vector<double> grid;
  std::vector<UnitaryOp> unitaries;
  std::vector<HermitianOp> hamiltonians;  // H at each node
  Eigen::MatrixXd controls;               // node controls, one row per grid point
  std::vector<HermitianOp> costates;      // empty or one per grid point

  bool has_costates() const noexcept { return !costates.empty(); }
  const UnitaryOp& final_unitary() const { return unitaries.back(); }
};

/// U(t_{k+1}) = exp(-i H_k dt) U(t_k) on every cell.
Trajectory evolve_unitary(const Protocol& p);

/// F(t_k) = U(t_k) F0 U(t_k)^dagger.
Trajectory evolve_costate(const HermitianOp& f0, Trajectory traj);

struct ConservationReport {
  double hf_drift = 0.0;
  double f2_drift = 0.0;
  double unitarity_drift = 0.0;
  double hf_initial = 0.0;
};

ConservationReport conservation_report(const Trajectory& traj);

struct BoundaryResidual {
  double fidelity = 0.0;  // 1 - |tr[target^dagger U]| / N
  double phase = 0.0;     // Frobenius norm of U - target
};

BoundaryResidual boundary_residual(const Trajectory& traj, const UnitaryOp& target);
BoundaryResidual boundary_residual(const UnitaryOp& u, const UnitaryOp& target);

}  // namespace qbrach
