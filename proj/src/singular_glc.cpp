#include "qbrach/singular_glc.hpp"

#include <cmath>
#include <string>

#include "qbrach/detail/glc_internal.hpp"
#include "qbrach/detail/linalg.hpp"

namespace qbrach {

namespace detail {

namespace {

void validate_chart(const ControlChart& chart) {
  const int l = static_cast<int>(chart.generators.size());
  if (l == 0) throw Error(ErrorCode::invalid_argument, "chart has no generators");
  if (chart.point.size() != l)
    throw Error(ErrorCode::dimension_mismatch, "chart point has " + std::to_string(chart.point.size()) +
                                                   " coordinates, expected " + std::to_string(l));
  for (const auto& g : chart.generators)
    if (g.dim() != chart.dim()) throw Error(ErrorCode::dimension_mismatch, "generator dimension differs from drift");
  for (std::size_t p = 0; p < chart.free.size(); ++p) {
    const int k = chart.free[p];
    if (k < 0 || k >= l) throw Error(ErrorCode::invalid_argument, "free coordinate index out of range");
    for (std::size_t q = 0; q < p; ++q)
      if (chart.free[q] == k) throw Error(ErrorCode::invalid_argument, "free coordinate listed twice");
  }
  for (const auto& d : chart.arc)
    if (d.size() != chart.parameters())
      throw Error(ErrorCode::dimension_mismatch, "arc derivative has the wrong number of entries");
  if (chart.elimination) {
    const auto& e = *chart.elimination;
    if (e.index < 0 || e.index >= l) throw Error(ErrorCode::invalid_argument, "eliminated index out of range");
    for (int k : chart.free)
      if (k == e.index) throw Error(ErrorCode::invalid_argument, "eliminated coordinate cannot be free");
    if (e.weights.size() != l) throw Error(ErrorCode::dimension_mismatch, "elimination weights size mismatch");
    if (!(e.weights(e.index) > 0.0))
      throw Error(ErrorCode::invalid_argument, "eliminated coordinate needs a positive weight");
  }
}

double factorial(int k) {
  double out = 1.0;
  for (int i = 2; i <= k; ++i) out *= i;
  return out;
}

}  // namespace

Eigen::VectorXd free_values(const ControlChart& chart) {
  Eigen::VectorXd u(chart.parameters());
  for (int p = 0; p < chart.parameters(); ++p) u(p) = chart.point(chart.free[p]);
  return u;
}

ControlChart chart_at(const ControlChart& chart, const Eigen::VectorXd& u) {
  ControlChart out = chart;
  for (int p = 0; p < chart.parameters(); ++p) out.point(chart.free[p]) = u(p);
  if (out.elimination) {
    const auto& e = *out.elimination;
    double rest = e.radius * e.radius;
    for (int k = 0; k < out.point.size(); ++k)
      if (k != e.index) rest -= e.weights(k) * out.point(k) * out.point(k);
    if (rest <= 0.0) throw Error(ErrorCode::implicit_function_violation, "point lies outside the active bound");
    out.point(e.index) = e.sign * std::sqrt(rest / e.weights(e.index));
  }
  return out;
}

ChartJets chart_jets(const ControlChart& chart, int order, int needs_derivative_from) {
  validate_chart(chart);
  if (chart.time_varying && chart.arc.empty() && order >= needs_derivative_from)
    throw Error(ErrorCode::missing_derivative,
                "the arc is time-varying but no control derivatives were supplied");
  const int l = static_cast<int>(chart.generators.size());
  std::vector<ScalarJet> v;
  v.reserve(static_cast<std::size_t>(l));
  for (int k = 0; k < l; ++k) v.emplace_back(order, chart.point(k));
  for (int p = 0; p < chart.parameters(); ++p) {
    ScalarJet& x = v[static_cast<std::size_t>(chart.free[p])];
    for (int k = 0; k < static_cast<int>(chart.arc.size()) && k + 1 <= order; ++k)
      x[k + 1] += chart.arc[static_cast<std::size_t>(k)](p) / factorial(k + 1);
  }

  std::vector<ScalarJet> dedu;  // d v_e / d u_p
  if (chart.elimination) {
    const auto& e = *chart.elimination;
    if (std::abs(chart.point(e.index)) < 1e-10)
      throw Error(ErrorCode::implicit_function_violation, "eliminated coordinate vanishes at the chart point");
    ScalarJet rad(order, e.radius * e.radius);
    for (int k = 0; k < l; ++k)
      if (k != e.index) rad = rad - e.weights(k) * (v[k] * v[k]);
    rad = (1.0 / e.weights(e.index)) * rad;
    if (rad[0] <= 0.0) throw Error(ErrorCode::implicit_function_violation, "point lies outside the active bound");
    ScalarJet ve = static_cast<double>(e.sign) * sqrt(rad);
    v[static_cast<std::size_t>(e.index)] = ve;
    for (int p = 0; p < chart.parameters(); ++p) {
      const int k = chart.free[p];
      dedu.push_back((-e.weights(k) / e.weights(e.index)) * (v[k] / ve));
    }
  }

  ChartJets out;
  out.hamiltonian = MatrixJet(order, chart.drift.matrix());
  for (int k = 0; k < l; ++k) {
    out.hamiltonian.add_scaled(v[k], chart.generators[k].matrix());
    out.generators.emplace_back(order, chart.generators[k].matrix());
  }
  for (int p = 0; p < chart.parameters(); ++p) {
    MatrixJet h(order, chart.generators[chart.free[p]].matrix());
    if (chart.elimination) h.add_scaled(dedu[p], chart.generators[chart.elimination->index].matrix());
    out.partials.push_back(std::move(h));
  }
  return out;
}

std::vector<std::vector<Eigen::MatrixXcd>> glc_operators(const ControlChart& chart, int m) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "GLC order must be at least 1");
  // Reduced charts have u-dependent h_j, so dh/dt already enters R^(1).
  const int needs = chart.elimination ? 2 : 3;
  const ChartJets jets = chart_jets(chart, m, needs);
  std::vector<MatrixJet> r = jets.partials;
  for (int k = 1; k < m; ++k)
    for (auto& ri : r) ri = ri.derivative() + commutator(ri, jets.hamiltonian);
  const int l = chart.parameters();
  std::vector<std::vector<Eigen::MatrixXcd>> ops(static_cast<std::size_t>(l));
  for (int i = 0; i < l; ++i)
    for (int j = 0; j < l; ++j) ops[i].push_back(commutator_raw(r[i][0], jets.partials[j][0]));
  return ops;
}

}  // namespace detail

namespace {

std::vector<std::string> default_names(int l) {
  std::vector<std::string> names;
  for (int j = 0; j < l; ++j) names.push_back("u" + std::to_string(j + 1));
  return names;
}

double trace_with(const Eigen::MatrixXcd& a, const HermitianOp& f) { return 2.0 * detail::inner_raw(f.matrix(), a); }

void check_costate(const ControlChart& chart, const HermitianOp& f) {
  if (f.dim() != chart.dim()) throw Error(ErrorCode::dimension_mismatch, "costate dimension differs from chart");
}

}  // namespace

const char* to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::consistent:
      return "consistent";
    case Verdict::excluded:
      return "excluded";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

ControlChart planar_chart(const ConstraintSet& c, const Eigen::VectorXd& u, std::vector<std::string> names) {
  if (u.size() != c.controls())
    throw Error(ErrorCode::dimension_mismatch, "control point size differs from the number of controls");
  if (names.empty()) names = default_names(c.controls());
  if (static_cast<int>(names.size()) != c.controls())
    throw Error(ErrorCode::dimension_mismatch, "parameter names size mismatch");
  ControlChart chart{c.drift(), c.control_basis(), std::move(names), {}, std::nullopt, u, {}, false};
  for (int j = 0; j < c.controls(); ++j) chart.free.push_back(j);
  return chart;
}

HermitianOp chart_hamiltonian(const ControlChart& chart) {
  const auto jets = detail::chart_jets(chart, 0, 1);
  return HermitianOp::hermitian_part(jets.hamiltonian[0]);
}

std::vector<HermitianOp> chart_partials(const ControlChart& chart) {
  const auto jets = detail::chart_jets(chart, 0, 1);
  std::vector<HermitianOp> out;
  for (const auto& h : jets.partials) out.push_back(HermitianOp::hermitian_part(h[0]));
  return out;
}

ControlChart boundary_reduce(const ControlChart& chart, double radius, const Eigen::VectorXd& weights, int eliminate) {
  if (chart.elimination) throw Error(ErrorCode::invalid_argument, "chart already eliminates a coordinate");
  const int l = static_cast<int>(chart.generators.size());
  if (eliminate < 0 || eliminate >= l) throw Error(ErrorCode::invalid_argument, "eliminated index out of range");
  if (weights.size() != l) throw Error(ErrorCode::dimension_mismatch, "elimination weights size mismatch");
  if (!(radius > 0.0)) throw Error(ErrorCode::invalid_argument, "radius must be positive");
  if (std::abs(chart.point(eliminate)) < 1e-10)
    throw Error(ErrorCode::implicit_function_violation,
                "cannot solve for " + chart.names[static_cast<std::size_t>(eliminate)] + ": it vanishes at the point");
  const double q = chart.point.dot(weights.cwiseProduct(chart.point));
  if (std::abs(q - radius * radius) > 1e-8 * std::max(1.0, radius * radius))
    throw Error(ErrorCode::invalid_argument, "chart point is not on the active bound");

  ControlChart out = chart;
  out.free.clear();
  int p_removed = -1;
  for (int p = 0; p < chart.parameters(); ++p) {
    if (chart.free[p] == eliminate)
      p_removed = p;
    else
      out.free.push_back(chart.free[p]);
  }
  if (!chart.arc.empty() && p_removed >= 0) {
    for (auto& d : out.arc) {
      Eigen::VectorXd kept(out.parameters());
      for (int p = 0, q2 = 0; p < chart.parameters(); ++p)
        if (p != p_removed) kept(q2++) = d(p);
      d = kept;
    }
  }
  out.elimination = Elimination{eliminate, radius, weights, chart.point(eliminate) > 0 ? 1 : -1};
  return out;
}

ControlChart linear_reparametrize(const ControlChart& chart, const Eigen::MatrixXd& jacobian) {
  const int l = static_cast<int>(chart.generators.size());
  if (chart.elimination || chart.parameters() != l)
    throw Error(ErrorCode::invalid_argument, "linear reparametrization needs a planar chart with all coordinates free");
  if (jacobian.rows() != l || jacobian.cols() != l)
    throw Error(ErrorCode::dimension_mismatch, "Jacobian must be " + std::to_string(l) + "x" + std::to_string(l));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jacobian);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12)
    throw Error(ErrorCode::non_invertible_jacobian, "Jacobian is singular");

  ControlChart out = chart;
  out.generators.clear();
  out.names = default_names(l);
  out.free.clear();
  for (int j = 0; j < l; ++j) {
    HermitianOp g = HermitianOp::zero(chart.dim());
    for (int k = 0; k < l; ++k) g += jacobian(k, j) * chart.generators[chart.free[k]];
    out.generators.push_back(g);
    out.free.push_back(j);
  }
  Eigen::VectorXd vp(l);
  for (int p = 0; p < l; ++p) vp(p) = chart.point(chart.free[p]);
  out.point = lu.solve(vp);
  for (auto& d : out.arc) d = lu.solve(d);
  return out;
}

ChainResiduals singular_chain(const HermitianOp& f, const ControlChart& chart, int depth) {
  if (depth < 0) throw Error(ErrorCode::invalid_argument, "depth must be non-negative");
  check_costate(chart, f);
  const auto jets = detail::chart_jets(chart, depth, 2);
  ChainResiduals out;
  std::vector<detail::MatrixJet> a = jets.generators;
  for (int n = 0; n <= depth; ++n) {
    if (n > 0)
      for (auto& ak : a) ak = ak.derivative() + detail::commutator(ak, jets.hamiltonian);
    Eigen::VectorXd r(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) r(static_cast<Eigen::Index>(k)) = trace_with(a[k][0], f);
    out.orders.push_back(r);
  }
  out.normalization = trace_product(chart.drift, f) - 1.0;
  return out;
}

ChainResiduals singular_chain(const HermitianOp& f, const ConstraintSet& c, const HermitianOp& h, int depth) {
  const Eigen::VectorXd u = c.coordinates(h);
  if (hs_norm(c.hamiltonian(u) - h) > 1e-8 * std::max(1.0, hs_norm(h)))
    throw Error(ErrorCode::invalid_argument, "H is not of the form H_d + sum u^j c_j");
  return singular_chain(f, planar_chart(c, u), depth);
}

std::vector<Eigen::MatrixXd> glc_matrices(const ControlChart& chart, const HermitianOp& f, int m_max) {
  if (m_max < 1) throw Error(ErrorCode::invalid_argument, "m_max must be at least 1");
  check_costate(chart, f);
  std::vector<Eigen::MatrixXd> out;
  const int l = chart.parameters();
  for (int m = 1; m <= m_max; ++m) {
    const auto ops = detail::glc_operators(chart, m);
    Eigen::MatrixXd q(l, l);
    for (int i = 0; i < l; ++i)
      for (int j = 0; j < l; ++j) q(i, j) = trace_with(ops[i][j], f);
    out.push_back(q);
  }
  return out;
}

std::vector<Eigen::MatrixXd> glc_matrices(const ControlChart& chart, const HermitianOp& h, const HermitianOp& f,
                                          int m_max) {
  const HermitianOp hc = chart_hamiltonian(chart);
  if (h.dim() != hc.dim()) throw Error(ErrorCode::dimension_mismatch, "H dimension differs from chart");
  if (hs_norm(h - hc) > 1e-8 * std::max(1.0, hs_norm(hc)))
    throw Error(ErrorCode::invalid_argument, "H does not match the chart Hamiltonian");
  return glc_matrices(chart, f, m_max);
}

namespace {

// Sign class of the first nonzero order: +1/-1 for semidefinite
// (-1)^{M/2} Q with that sign, 0 for indefinite, 2 for an odd order.
int sign_class(const std::vector<Eigen::MatrixXd>& qs, double tol, int& m_out) {
  m_out = 0;
  for (std::size_t m = 0; m < qs.size(); ++m) {
    const double scale = std::max(1.0, qs[m].cwiseAbs().maxCoeff());
    if (qs[m].cwiseAbs().maxCoeff() <= tol * scale && qs[m].cwiseAbs().maxCoeff() <= tol) continue;
    m_out = static_cast<int>(m) + 1;
    if (m_out % 2 == 1) return 2;
    const double s = (m_out / 2) % 2 == 0 ? 1.0 : -1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * s * (qs[m] + qs[m].transpose()));
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    const double t = tol * scale;
    if (hi <= t) return -1;
    if (lo >= -t) return 1;
    return 0;
  }
  return 3;
}

}  // namespace

ReparametrizationReport reparametrization_report(const ControlChart& chart_u, const ControlChart& chart_v,
                                                 const Eigen::MatrixXd& jacobian, const HermitianOp& f, int m_max,
                                                 double tol) {
  const int lu = chart_u.parameters(), lv = chart_v.parameters();
  if (jacobian.rows() != lv || jacobian.cols() != lu)
    throw Error(ErrorCode::dimension_mismatch, "Jacobian shape must be (v parameters) x (u parameters)");
  if (lu == lv) {
    if (std::abs(jacobian.determinant()) < 1e-12) throw Error(ErrorCode::non_invertible_jacobian, "Jacobian is singular");
  } else {
    throw Error(ErrorCode::non_invertible_jacobian, "Jacobian is not square");
  }
  const auto qu = glc_matrices(chart_u, f, m_max);
  const auto qv = glc_matrices(chart_v, f, m_max);
  ReparametrizationReport out;
  int mu = 0, mv = 0;
  const int cu = sign_class(qu, tol, mu);
  const int cv = sign_class(qv, tol, mv);
  out.M = mv;
  const int upto = mv == 0 ? m_max : mv;
  double err = 0.0, scale = 1.0;
  for (int m = 0; m < upto; ++m) {
    const Eigen::MatrixXd pulled = jacobian.transpose() * qv[static_cast<std::size_t>(m)] * jacobian;
    err = std::max(err, (qu[static_cast<std::size_t>(m)] - pulled).cwiseAbs().maxCoeff());
    scale = std::max(scale, pulled.cwiseAbs().maxCoeff());
  }
  out.max_error = err;
  out.congruent = err <= tol * scale;
  out.verdict_match = cu == cv && mu == mv;
  return out;
}

bool reparametrization_check(const ControlChart& chart_u, const ControlChart& chart_v, const Eigen::MatrixXd& jacobian,
                             const HermitianOp& h, const HermitianOp& f) {
  for (const ControlChart* c : {&chart_u, &chart_v}) {
    const HermitianOp hc = chart_hamiltonian(*c);
    if (hs_norm(h - hc) > 1e-8 * std::max(1.0, hs_norm(hc)))
      throw Error(ErrorCode::invalid_argument, "H does not match both charts");
  }
  const auto r = reparametrization_report(chart_u, chart_v, jacobian, f);
  return r.congruent && r.verdict_match;
}

bool bracket_obstruction(const ConstraintSet& c, const Tolerances& tol) {
  const BasisSet& basis = standard_basis(c.dim());
  const auto& cs = c.control_basis();
  std::vector<Eigen::VectorXd> cols;
  for (std::size_t i = 0; i < cs.size(); ++i)
    for (std::size_t j = i + 1; j < cs.size(); ++j) cols.push_back(expand(commutator(cs[i], cs[j]), basis));
  const Eigen::VectorXd hd = expand(c.drift(), basis);
  if (hd.norm() <= tol.membership) return true;
  if (cols.empty()) return false;
  Eigen::MatrixXd a(hd.size(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = cols[k];
  const Eigen::MatrixXd r = detail::range_space(a);
  const Eigen::VectorXd rest = hd - r * (r.transpose() * hd);
  return rest.norm() <= tol.membership * std::max(1.0, hd.norm());
}

LollipopCertificate lollipop_certificate(const ConstraintSet& c, const Tolerances& tol) {
  LollipopCertificate out;
  out.distance = hs_norm(c.drift() - c.project(c.drift()));
  out.infeasible = out.distance <= tol.membership * std::max(1.0, hs_norm(c.drift()));
  return out;
}

}  // namespace qbrach
