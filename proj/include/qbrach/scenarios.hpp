#pragma once

// Built-in worked examples: Landau-Zener, the one-qubit xy problem and the
// symmetric-subspace two-qubit problem, plus their singular-arc charts.

#include <string>
#include <utility>
#include <vector>

#include "qbrach/dynamics.hpp"
#include "qbrach/singular_glc.hpp"

namespace qbrach {

struct Scenario {
  std::string name;
  ConstraintSet constraint;
  std::vector<std::pair<std::string, double>> parameters;
  std::vector<std::string> control_names;
  UnitaryOp target;
  std::vector<std::string> arcs;  // chart names accepted by scenario_chart
  std::vector<std::pair<std::string, std::string>> reference_facts;

  double parameter(const std::string& key) const;
};

struct ScenarioOptions {
  double omega0 = 0.5;
  double Omega = 1.0;
  double alpha = 0.7853981633974483;  // pi / 4
  bool hs_metric = false;             // symmetric_two_qubit: J weight 8/3 instead of 1
};

Scenario landau_zener(double omega0, double Omega, double alpha = 0.7853981633974483);
Scenario one_qubit_xy(double omega0, double Omega, double alpha = 0.7853981633974483);
Scenario symmetric_two_qubit(double omega0, double Omega, double alpha = 0.7853981633974483, bool hs_metric = false);

std::vector<std::string> scenario_names();

/// Throws invalid_argument for an unknown name.
Scenario make_scenario(const std::string& name, const ScenarioOptions& options = {});

/// Operators on the symmetric two-qubit subspace in the Gell-Mann basis.
struct SymmetricOperators {
  HermitianOp sigma_x;  // lambda4 - lambda3/2 + lambda8/(2 sqrt3)
  HermitianOp sigma_z;  // lambda3 - lambda8/sqrt3
  HermitianOp s1;       // (lambda1 + lambda6)/sqrt2
  HermitianOp s2;       // (lambda2 + lambda7)/sqrt2
  HermitianOp s3;       // (lambda3 + sqrt3 lambda8)/2
};

const SymmetricOperators& symmetric_operators();

/// Chart at a representative point of the named arc. Arcs: "interior" for
/// every scenario; "boundary_b3", "boundary_b1", "boundary_b2" and
/// "boundary_j" for symmetric_two_qubit.
ControlChart scenario_chart(const Scenario& s, const std::string& arc);

struct ReplacementResult {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double integral = 0.0;  // int J dt (trapezoid rule)
  Protocol protocol;      // J = Omega on [t1, t3], J = 0 on [t3, t2]
  UnitaryOp arc_unitary;  // exp(-i omega0 Sx (t2 - t1)) exp(-i (int J) Sz)
  UnitaryOp replacement_unitary;
};

/// Bang-off replacement of a singular arc J(t) with b = 0 on the symmetric
/// subspace. Throws infeasible_replacement when int J dt >= (t2 - t1) Omega.
ReplacementResult singular_replacement(const std::vector<double>& times, const std::vector<double>& j_values,
                                       double omega0, double Omega);

}  // namespace qbrach
