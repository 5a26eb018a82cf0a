#include "qbrach/scenarios.hpp"

#include <cmath>

#include "qbrach/detail/linalg.hpp"

namespace qbrach {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorCode::invalid_argument, std::string(name) + " must be positive, got " + detail::format_number(v));
}

std::string num(double v) { return detail::format_number(v); }

}  // namespace

double Scenario::parameter(const std::string& key) const {
  for (const auto& [k, v] : parameters)
    if (k == key) return v;
  throw Error(ErrorCode::invalid_argument, "scenario " + name + " has no parameter " + key);
}

Scenario landau_zener(double omega0, double Omega, double alpha) {
  require_positive(omega0, "omega0");
  require_positive(Omega, "Omega");
  const BasisSet p = pauli_basis();
  Scenario s;
  s.name = "landau_zener";
  s.constraint = ConstraintSet(omega0 * p[2], {p[0]}, BoxBound{{-Omega}, {Omega}});
  s.parameters = {{"omega0", omega0}, {"Omega", Omega}, {"alpha", alpha}};
  s.control_names = {"u"};
  s.target = exp_op(p[2], alpha);
  s.arcs = {"interior"};
  s.reference_facts = {
      {"classification", "lotus_leaf"},
      {"kind", "box (coincides with the typical bound for one control)"},
      {"singular_arc", "u=0"},
      {"singular_normalization", "omega0 tr[sz F]=1"},
      {"glc_interior", "consistent"},
      {"structure", "bang-off-bang"},
      {"optimal_for_default_target", "u=0, H=omega0 sz, T=alpha/omega0"},
  };
  return s;
}

Scenario one_qubit_xy(double omega0, double Omega, double alpha) {
  require_positive(omega0, "omega0");
  require_positive(Omega, "Omega");
  const BasisSet p = pauli_basis();
  Scenario s;
  s.name = "one_qubit_xy";
  s.constraint = ConstraintSet(omega0 * p[2], {p[0], p[1]}, TypicalBound{Omega});
  s.parameters = {{"omega0", omega0}, {"Omega", Omega}, {"alpha", alpha}};
  s.control_names = {"ux", "uy"};
  s.target = exp_op(p[0], alpha);
  s.arcs = {"interior"};
  // The singular normalization appears in two forms; the exclusion does not
  // depend on the positive scale of F.
  s.reference_facts = {
      {"classification", "lotus_leaf"},
      {"bracket_obstruction", "true"},
      {"singular_arc", "ux=uy=0"},
      {"singular_normalization_unit_scale", "tr[sz F]=1"},
      {"singular_normalization", "omega0 tr[sz F]=1"},
      {"glc_interior", "excluded"},
  };
  return s;
}

const SymmetricOperators& symmetric_operators() {
  static const SymmetricOperators ops = [] {
    const BasisSet g = gellmann_basis();
    auto l = [&](int k) { return g[static_cast<std::size_t>(k - 1)]; };
    const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
    SymmetricOperators o;
    o.sigma_x = l(4) - 0.5 * l(3) + (1.0 / (2.0 * r3)) * l(8);
    o.sigma_z = l(3) - (1.0 / r3) * l(8);
    o.s1 = (l(1) + l(6)) / r2;
    o.s2 = (l(2) + l(7)) / r2;
    o.s3 = 0.5 * (l(3) + r3 * l(8));
    return o;
  }();
  return ops;
}

Scenario symmetric_two_qubit(double omega0, double Omega, double alpha, bool hs_metric) {
  require_positive(omega0, "omega0");
  require_positive(Omega, "Omega");
  if (!(omega0 < Omega))
    throw Error(ErrorCode::invalid_argument, "symmetric_two_qubit requires omega0 < Omega (got omega0=" +
                                                 num(omega0) + ", Omega=" + num(Omega) + ")");
  const auto& o = symmetric_operators();
  Eigen::MatrixXd metric = Eigen::MatrixXd::Identity(4, 4);
  if (hs_metric) metric(3, 3) = 8.0 / 3.0;
  Scenario s;
  s.name = "symmetric_two_qubit";
  s.constraint = ConstraintSet(omega0 * o.sigma_x, {o.s1, o.s2, o.s3, o.sigma_z}, BallBound{Omega, metric});
  s.parameters = {{"omega0", omega0}, {"Omega", Omega}, {"alpha", alpha}, {"hs_metric", hs_metric ? 1.0 : 0.0}};
  s.control_names = {"b1", "b2", "b3", "J"};
  s.target = exp_op(o.sigma_x, alpha);
  s.arcs = {"interior", "boundary_b3", "boundary_b1", "boundary_b2", "boundary_j"};
  s.reference_facts = {
      {"classification", "lotus_leaf"},
      {"glc_interior", "consistent"},
      {"glc_interior_conditions", "f1=0,f2=0,f3=0,f5=0,f6=0,f7=0,f8=0,b1=0,b2=0,b3=0,f4>=0,0<=J<=" + num(omega0)},
      {"glc_boundary", "excluded"},
      {"singular_arc", "H=H_d"},
      {"singular_time_cost", num(alpha / omega0)},
  };
  return s;
}

std::vector<std::string> scenario_names() { return {"landau_zener", "one_qubit_xy", "symmetric_two_qubit"}; }

Scenario make_scenario(const std::string& name, const ScenarioOptions& o) {
  if (name == "landau_zener") return landau_zener(o.omega0, o.Omega, o.alpha);
  if (name == "one_qubit_xy") return one_qubit_xy(o.omega0, o.Omega, o.alpha);
  if (name == "symmetric_two_qubit") return symmetric_two_qubit(o.omega0, o.Omega, o.alpha, o.hs_metric);
  throw Error(ErrorCode::invalid_argument, "unknown scenario '" + name + "'");
}

ControlChart scenario_chart(const Scenario& s, const std::string& arc) {
  const int l = s.constraint.controls();
  if (arc == "interior") {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(l);
    if (s.name == "symmetric_two_qubit") u(3) = 0.5 * s.parameter("omega0");
    return planar_chart(s.constraint, u, s.control_names);
  }
  if (s.name != "symmetric_two_qubit")
    throw Error(ErrorCode::invalid_argument, "scenario " + s.name + " has no arc '" + arc + "'");

  // Representative boundary points; the weights follow the ball metric.
  const double om = s.parameter("Omega");
  const auto& bound = std::get<BallBound>(s.constraint.bound());
  const Eigen::VectorXd w = bound.metric.diagonal();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(4);
  int eliminate = -1;
  if (arc == "boundary_b3") {
    u << 0.3 * om, 0.2 * om, 0.0, 0.4 * om;
    eliminate = 2;
  } else if (arc == "boundary_b1") {
    u << 0.0, 0.2 * om, 0.0, 0.4 * om;
    eliminate = 0;
  } else if (arc == "boundary_b2") {
    u << 0.0, 0.0, 0.0, 0.4 * om;
    eliminate = 1;
  } else if (arc == "boundary_j") {
    eliminate = 3;
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown arc '" + arc + "'");
  }
  double rest = om * om;
  for (int k = 0; k < 4; ++k)
    if (k != eliminate) rest -= w(k) * u(k) * u(k);
  u(eliminate) = std::sqrt(rest / w(eliminate));
  return boundary_reduce(planar_chart(s.constraint, u, s.control_names), om, w, eliminate);
}

ReplacementResult singular_replacement(const std::vector<double>& times, const std::vector<double>& j_values,
                                       double omega0, double Omega) {
  require_positive(omega0, "omega0");
  require_positive(Omega, "Omega");
  if (times.size() < 2 || times.size() != j_values.size())
    throw Error(ErrorCode::invalid_argument, "need at least two (t, J) samples of equal length");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) throw Error(ErrorCode::invalid_argument, "times must increase");
    if (j_values[k] < 0.0 || j_values[k] > Omega)
      throw Error(ErrorCode::invalid_argument, "J samples must lie in [0, Omega]");
  }
  ReplacementResult r;
  r.t1 = times.front();
  r.t2 = times.back();
  for (std::size_t k = 1; k < times.size(); ++k)
    r.integral += 0.5 * (times[k] - times[k - 1]) * (j_values[k] + j_values[k - 1]);
  if (r.integral >= (r.t2 - r.t1) * Omega)
    throw Error(ErrorCode::infeasible_replacement, "int J dt >= (t2 - t1) Omega");
  r.t3 = r.t1 + r.integral / Omega;

  const Scenario s = symmetric_two_qubit(omega0, Omega);
  std::vector<double> grid{r.t1};
  std::vector<double> js;
  if (r.t3 > r.t1) {
    grid.push_back(r.t3);
    js.push_back(Omega);
  }
  if (r.t2 > r.t3) {
    grid.push_back(r.t2);
    js.push_back(0.0);
  }
  Eigen::MatrixXd controls = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(js.size()), 4);
  for (std::size_t k = 0; k < js.size(); ++k) controls(static_cast<Eigen::Index>(k), 3) = js[k];
  // Protocols start at t = 0; shift and evolve on [0, t2 - t1].
  for (double& t : grid) t -= r.t1;
  grid.back() = r.t2 - r.t1;
  r.protocol = make_protocol(grid, controls, s.constraint);
  r.replacement_unitary = evolve_unitary(r.protocol).final_unitary();

  const auto& o = symmetric_operators();
  r.arc_unitary = exp_op(o.sigma_x, omega0 * (r.t2 - r.t1)) * exp_op(o.sigma_z, r.integral);
  return r;
}

}  // namespace qbrach
