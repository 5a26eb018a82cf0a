#pragma once

// Regular time-optimal protocols: closed forms (drift-free geodesic, quantum
// Zermelo navigation) and multistart single shooting for the general
// maximum-principle boundary-value problem.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qbrach/dynamics.hpp"

namespace qbrach {

struct GeodesicSolution {
  HermitianOp hamiltonian;
  double duration = 0.0;
};

GeodesicSolution drift_free_geodesic(const UnitaryOp& target, double omega, const Tolerances& tol = kTolerances);

struct ZermeloPoint {
  HermitianOp hamiltonian;
  UnitaryOp unitary;
};

/// H(t) = H_d + e^{-iH_d t} H_c(0) e^{iH_d t}, U(t) = e^{-iH_d t} e^{-iH_c(0) t}.
ZermeloPoint zermelo_solution(const HermitianOp& drift, const HermitianOp& hc0, double t);

struct ShootingOptions {
  int grid = 256;
  int multistarts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  int max_iterations = 100;
  std::optional<double> t_max;
  int threads = 0;  // 0 = hardware concurrency
};

struct ShootingProblem {
  ConstraintSet constraint;
  UnitaryOp target;
  ShootingOptions options;
};

struct Extremal {
  double duration = 0.0;
  double residual = 0.0;
  int start = -1;
};

struct SolveResult {
  std::string method;  // "shooting", "zermelo", "geodesic"
  std::string label = "extremal";
  Protocol protocol;
  Trajectory trajectory;
  double residual = 0.0;
  double duration = 0.0;
  bool converged = false;
  std::vector<std::pair<double, double>> singular_intervals;
  std::uint64_t seed = 0;
  int starts = 0;
  int best_start = -1;
  std::vector<Extremal> extremals;
  HermitianOp f0;
  ConservationReport conservation;
  BoundaryResidual boundary;
  std::string message;
};

/// Smallest T with ||log(e^{iH_d T} U_f)|| = omega T, then
/// H_c(0) = omega L / ||L||. Requires a typical full-subspace constraint.
SolveResult zermelo_solve(const HermitianOp& drift, double omega, const UnitaryOp& target, int grid = 256);

struct ReductionResult {
  bool reducible = false;
  ConstraintSet reduced;
};

ReductionResult interaction_picture_reduce(const ConstraintSet& c, const Tolerances& tol = kTolerances);

SolveResult solve_shooting(const ShootingProblem& prob);

struct AuditReport {
  double max_condition_violation = 0.0;  // max over nodes and samples of tr[KF] - tr[HF]
  double normalization_violation = 0.0;  // max |tr[HF] - 1|
  double flow_violation = 0.0;           // central-difference residual of iF' = [H, F]
  int worst_node = -1;
  bool passed = false;
};

/// Checks the maximum condition against `samples` random admissible
/// Hamiltonians per node, the normalization and the costate flow.
AuditReport qb_consistency_audit(const SolveResult& result, int samples = 64, std::uint64_t seed = 0,
                                 const Tolerances& tol = kTolerances);

}  // namespace qbrach
