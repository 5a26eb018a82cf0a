#pragma once

// Singular arcs: the singularity chain, the generalized Legendre-Clebsch
// matrices Q^(m), the staged GLC test, boundary reduction of control charts
// and reparametrization checks.
//
// Index convention: Q^(m)_ij = -i tr([h_j, F] R^(m-1)_i) with
// R^(0)_i = h_i and R^(m)_i = dR^(m-1)_i/dt - i[R^(m-1)_i, H]. With this
// ordering Q^(1)_12 = 2 tr[sz F] for h = (sx, sy).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qbrach/constraint_model.hpp"

namespace qbrach {

/// Quadratic bound sum_k w_k (v^k)^2 = radius^2 used to eliminate one
/// coordinate near the boundary of the control region.
struct Elimination {
  int index = -1;
  double radius = 1.0;
  Eigen::VectorXd weights;  // one per original coordinate
  int sign = 1;
};

/// H(v) = H_d + sum_k v^k g_k over L original coordinates v. The chart
/// parameters are the coordinates listed in `free`; an optional eliminated
/// coordinate is solved from the quadratic bound; the rest stay at `point`.
struct ControlChart {
  HermitianOp drift;
  std::vector<HermitianOp> generators;
  std::vector<std::string> names;
  std::vector<int> free;
  std::optional<Elimination> elimination;
  Eigen::VectorXd point;            // all L coordinates at the evaluation time
  std::vector<Eigen::VectorXd> arc;  // arc[k] = d^{k+1} u / dt^{k+1} of the free parameters
  bool time_varying = false;         // set when the arc moves but derivatives are not supplied

  int parameters() const noexcept { return static_cast<int>(free.size()); }
  int dim() const noexcept { return drift.dim(); }
};

/// Planar chart H_d + sum_j u^j c_j of a constraint set at control point u.
ControlChart planar_chart(const ConstraintSet& c, const Eigen::VectorXd& u, std::vector<std::string> names = {});

/// H at the chart point.
HermitianOp chart_hamiltonian(const ControlChart& chart);

/// h_j = dH/du^j at the chart point, including chain-rule terms.
std::vector<HermitianOp> chart_partials(const ControlChart& chart);

/// Eliminates coordinate `eliminate` using the active bound
/// sum_k w_k v_k^2 = radius^2. Throws implicit_function_violation when the
/// eliminated coordinate is (numerically) zero at the chart point.
ControlChart boundary_reduce(const ControlChart& chart, double radius, const Eigen::VectorXd& weights, int eliminate);

/// New planar chart with parameters u related by v = J u.
ControlChart linear_reparametrize(const ControlChart& chart, const Eigen::MatrixXd& jacobian);

struct ChainResiduals {
  std::vector<Eigen::VectorXd> orders;  // orders[n](j) = d^n/dt^n tr[tau_j F]
  double normalization = 0.0;           // tr[H_d F] - 1
};

/// Residuals of the singularity conditions and their time derivatives up to
/// `depth` for the chart generators, plus the normalization residual.
ChainResiduals singular_chain(const HermitianOp& f, const ControlChart& chart, int depth);

/// Planar version at control point coordinates(H) with constant controls.
ChainResiduals singular_chain(const HermitianOp& f, const ConstraintSet& c, const HermitianOp& h, int depth);

/// Q^(1)..Q^(m_max) at the chart point and costate F.
std::vector<Eigen::MatrixXd> glc_matrices(const ControlChart& chart, const HermitianOp& f, int m_max);

/// Same, after checking that H matches the chart Hamiltonian.
std::vector<Eigen::MatrixXd> glc_matrices(const ControlChart& chart, const HermitianOp& h, const HermitianOp& f,
                                          int m_max);

enum class Verdict { consistent, excluded, inconclusive };
const char* to_string(Verdict v) noexcept;

struct GLCOptions {
  int m_max = 4;
  bool family = true;  // treat planar chart parameters as unknowns
  std::uint64_t seed = 0;
  double tol = 1e-9;
};

struct GLCReport {
  std::vector<Eigen::MatrixXd> matrices;
  int M = 0;  // 0 when no nonzero order was found
  bool parity_ok = false;
  bool sign_ok = false;
  Verdict verdict = Verdict::inconclusive;
  std::vector<std::string> derived_conditions;
  std::vector<std::string> open_conditions;
  std::vector<std::string> notes;
  Eigen::VectorXd eigenvalues_at_M;
  double margin = 0.0;  // largest eigenvalue of (-1)^{M/2} Q^(M) at the representative point
  Eigen::VectorXd costate;  // representative F in the standard basis
  Eigen::VectorXd controls;  // representative chart coordinates (all L)
  std::optional<std::pair<double, double>> interval;  // admissible range of a single free parameter
};

/// Staged GLC test: closes the singularity conditions under time
/// differentiation, imposes odd orders, and checks the sign of the first
/// even nonzero order. When F is given it is used as the representative
/// costate if it satisfies the derived conditions.
GLCReport glc_test(const ControlChart& chart, const std::optional<HermitianOp>& f, const GLCOptions& options = {});

/// Q^(M)(u) = J^T Q^(M)(v) J for v = J u, plus matching verdicts.
struct ReparametrizationReport {
  bool congruent = false;
  bool verdict_match = false;
  double max_error = 0.0;
  int M = 0;
};

ReparametrizationReport reparametrization_report(const ControlChart& chart_u, const ControlChart& chart_v,
                                                 const Eigen::MatrixXd& jacobian, const HermitianOp& f,
                                                 int m_max = 4, double tol = 1e-8);

bool reparametrization_check(const ControlChart& chart_u, const ControlChart& chart_v, const Eigen::MatrixXd& jacobian,
                             const HermitianOp& h, const HermitianOp& f);

/// True when H_d lies in span{-i[c_i, c_j]}.
bool bracket_obstruction(const ConstraintSet& c, const Tolerances& tol = kTolerances);

struct LollipopCertificate {
  bool infeasible = false;  // no F with tr[C F] = 0 and tr[H_d F] = 1
  double distance = 0.0;    // distance of H_d from the control subspace
};

LollipopCertificate lollipop_certificate(const ConstraintSet& c, const Tolerances& tol = kTolerances);

}  // namespace qbrach
