#include "qbrach/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <variant>

namespace qbrach::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::parse_error, path + ": " + what);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

Eigen::MatrixXd real_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const auto row = numbers(j[r], path + "[" + std::to_string(r) + "]");
    if (row.size() != cols) fail(path + "[" + std::to_string(r) + "]", "ragged row");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
  }
  return m;
}

json real_matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

// Validation errors from the core become parse errors at `path`.
template <class F>
auto at_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::parse_error) throw;
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json parse(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, source + ": malformed JSON (" + e.what() + ")");
  }
}

json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::io_error, "write failed for " + path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(row);
  }
  return out;
}

json to_json(const HermitianOp& h) { return to_json(h.matrix()); }
json to_json(const UnitaryOp& u) { return to_json(u.matrix()); }

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array() || j[r].size() != n) fail(rp, "expected a row of " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      const std::string cp = rp + "[" + std::to_string(c) + "]";
      const json& e = j[r][c];
      Complex z;
      if (e.is_number()) {
        z = e.get<double>();
      } else if (e.is_array() && e.size() == 2) {
        z = Complex(number(e[0], cp + "[0]"), number(e[1], cp + "[1]"));
      } else {
        fail(cp, "expected a number or [re, im]");
      }
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z;
    }
  }
  return m;
}

HermitianOp hermitian_from_json(const json& j, int dim, const std::string& path) {
  if (j.is_object() && j.contains("coeffs")) {
    if (dim < 2) fail(path, "coefficient form needs a known dimension");
    const auto c = numbers(j["coeffs"], path + ".coeffs");
    const BasisSet& basis = standard_basis(dim);
    if (c.size() != basis.size())
      fail(path + ".coeffs", "expected " + std::to_string(basis.size()) + " coefficients");
    return reconstruct(Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size())), basis);
  }
  const Matrix m = matrix_from_json(j, path);
  if (dim > 0 && m.rows() != dim)
    fail(path, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  return at_path(path, [&] { return HermitianOp::from_matrix(m); });
}

UnitaryOp unitary_from_json(const json& j, const std::string& path) {
  if (j.is_array()) return at_path(path, [&] { return UnitaryOp::from_matrix(matrix_from_json(j, path)); });
  if (!j.is_object()) fail(path, "expected a matrix or an object");
  if (j.contains("matrix")) return unitary_from_json(j["matrix"], path + ".matrix");
  if (j.contains("generator")) {
    const int dim = j.contains("dim") ? integer(j["dim"], path + ".dim") : 0;
    const HermitianOp g = hermitian_from_json(j["generator"], dim, path + ".generator");
    const double angle = j.contains("angle") ? number(j["angle"], path + ".angle") : 1.0;
    return exp_op(g, angle);
  }
  fail(path, "expected \"matrix\" or \"generator\"");
}

json to_json(const ConstraintSet& c) {
  json out;
  out["dim"] = c.dim();
  out["drift"] = to_json(c.drift());
  json controls = json::array();
  for (const auto& b : c.control_basis()) controls.push_back(to_json(b));
  out["control_basis"] = controls;
  json kind;
  std::visit(
      [&](const auto& b) {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, TypicalBound>) {
          kind["typical"] = {{"omega", b.omega}};
        } else if constexpr (std::is_same_v<T, BoxBound>) {
          kind["box"] = {{"lo", b.lo}, {"hi", b.hi}};
        } else {
          kind["ball"] = {{"radius", b.radius}, {"metric", real_matrix_json(b.metric)}};
        }
      },
      c.bound());
  out["kind"] = kind;
  return out;
}

ConstraintSet constraint_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  // Scenario, chart and protocol artifacts carry the constraint one level down.
  if (!j.contains("drift") && j.contains("constraint")) return constraint_from_json(j["constraint"], path + ".constraint");
  int dim = j.contains("dim") ? integer(j["dim"], path + ".dim") : 0;
  const HermitianOp drift = hermitian_from_json(member(j, "drift", path), dim, path + ".drift");
  dim = drift.dim();
  const json& cj = member(j, "control_basis", path);
  if (!cj.is_array()) fail(path + ".control_basis", "expected an array of operators");
  std::vector<HermitianOp> controls;
  for (std::size_t k = 0; k < cj.size(); ++k)
    controls.push_back(hermitian_from_json(cj[k], dim, path + ".control_basis[" + std::to_string(k) + "]"));
  const std::string kp = path + ".kind";
  const json& kj = member(j, "kind", path);
  if (!kj.is_object() || kj.size() != 1) fail(kp, "expected an object with one of typical, box, ball");
  const std::string k = kj.begin().key();
  const json& bj = kj.begin().value();
  const std::string bp = kp + "." + k;
  Bound bound;
  if (k == "typical") {
    bound = TypicalBound{number(member(bj, "omega", bp), bp + ".omega")};
  } else if (k == "box") {
    bound = BoxBound{numbers(member(bj, "lo", bp), bp + ".lo"), numbers(member(bj, "hi", bp), bp + ".hi")};
  } else if (k == "ball") {
    const double r = number(member(bj, "radius", bp), bp + ".radius");
    Eigen::MatrixXd metric = bj.contains("metric")
                                 ? real_matrix(bj["metric"], bp + ".metric")
                                 : Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(controls.size()),
                                                             static_cast<Eigen::Index>(controls.size()));
    bound = BallBound{r, metric};
  } else {
    fail(kp, "unknown kind '" + k + "' (expected typical, box or ball)");
  }
  return at_path(path, [&] { return ConstraintSet(drift, controls, bound); });
}

json to_json(const ClassificationReport& r) {
  return {{"type_label", r.type_label},   {"drift_in_subspace", r.drift_in_subspace},
          {"planar", r.planar},           {"typical", r.typical},
          {"drift_in_bracket", r.drift_in_bracket}, {"notes", r.notes}};
}

json to_json(const Protocol& p) {
  json out;
  out["constraint"] = to_json(p.constraint);
  out["grid"] = p.grid;
  out["controls"] = real_matrix_json(p.controls);
  out["sampling"] = p.sampling == Sampling::left ? "left" : "midpoint";
  return out;
}

ProtocolInput protocol_from_json(const json& j, const std::string& path) {
  // A SolveResult is accepted as input through its "protocol" member.
  if (j.is_object() && !j.contains("grid") && j.contains("protocol")) return protocol_from_json(j["protocol"], path + ".protocol");
  ProtocolInput out;
  const ConstraintSet c = constraint_from_json(member(j, "constraint", path), path + ".constraint");
  std::vector<double> grid = numbers(member(j, "grid", path), path + ".grid");
  const json& cj = member(j, "controls", path);
  Eigen::MatrixXd controls;
  if (cj.is_array() && cj.empty())
    controls.resize(0, c.controls());
  else
    controls = real_matrix(cj, path + ".controls");
  Sampling sampling = Sampling::left;
  if (j.contains("sampling")) {
    const json& s = j["sampling"];
    if (s == "left")
      sampling = Sampling::left;
    else if (s == "midpoint")
      sampling = Sampling::midpoint;
    else
      fail(path + ".sampling", "expected \"left\" or \"midpoint\"");
  }
  out.protocol = at_path(path, [&] { return make_protocol(std::move(grid), controls, c, sampling); });
  if (j.contains("costate")) out.costate = hermitian_from_json(j["costate"], c.dim(), path + ".costate");
  return out;
}

json to_json(const ConservationReport& r) {
  return {{"hf_drift", r.hf_drift},
          {"f2_drift", r.f2_drift},
          {"unitarity_drift", r.unitarity_drift},
          {"hf_initial", r.hf_initial}};
}

json to_json(const SolveResult& r) {
  json out;
  out["method"] = r.method;
  out["label"] = r.label;
  out["converged"] = r.converged;
  out["T"] = r.duration;
  out["residual"] = r.residual;
  out["seed"] = r.seed;
  out["starts"] = r.starts;
  out["best_start"] = r.best_start;
  json ex = json::array();
  for (const auto& e : r.extremals) ex.push_back({{"duration", e.duration}, {"residual", e.residual}, {"start", e.start}});
  out["extremals"] = ex;
  json si = json::array();
  for (const auto& [a, b] : r.singular_intervals) si.push_back({a, b});
  out["singular_intervals"] = si;
  out["conservation"] = to_json(r.conservation);
  out["boundary"] = {{"fidelity", r.boundary.fidelity}, {"phase", r.boundary.phase}};
  json protocol = to_json(r.protocol);
  if (r.f0.dim() > 0) protocol["costate"] = to_json(r.f0);
  out["protocol"] = protocol;
  if (!r.trajectory.unitaries.empty()) out["final_unitary"] = to_json(r.trajectory.final_unitary());
  out["message"] = r.message;
  return out;
}

json to_json(const GLCReport& r) {
  json out;
  out["verdict"] = to_string(r.verdict);
  out["M"] = r.M;
  out["parity_ok"] = r.parity_ok;
  out["sign_ok"] = r.sign_ok;
  json ms = json::array();
  for (const auto& q : r.matrices) ms.push_back(real_matrix_json(q));
  out["matrices"] = ms;
  out["derived_conditions"] = r.derived_conditions;
  out["open_conditions"] = r.open_conditions;
  out["notes"] = r.notes;
  out["eigenvalues_at_M"] = vector_json(r.eigenvalues_at_M);
  out["margin"] = r.margin;
  out["costate_coeffs"] = vector_json(r.costate);
  out["controls"] = vector_json(r.controls);
  if (r.interval) out["interval"] = {r.interval->first, r.interval->second};
  return out;
}

json to_json(const Scenario& s) {
  json out;
  out["name"] = s.name;
  json params = json::object();
  for (const auto& [k, v] : s.parameters) params[k] = v;
  out["parameters"] = params;
  out["control_names"] = s.control_names;
  out["arcs"] = s.arcs;
  json facts = json::object();
  for (const auto& [k, v] : s.reference_facts) facts[k] = v;
  out["reference_facts"] = facts;
  out["constraint"] = to_json(s.constraint);
  out["target"] = {{"matrix", to_json(s.target)}};
  return out;
}

json to_json(const AuditReport& r) {
  return {{"max_condition_violation", r.max_condition_violation},
          {"normalization_violation", r.normalization_violation},
          {"flow_violation", r.flow_violation},
          {"worst_node", r.worst_node},
          {"passed", r.passed}};
}

std::string trajectory_csv(const Trajectory& traj) {
  if (traj.grid.empty()) throw Error(ErrorCode::invalid_argument, "trajectory is empty");
  const int l = static_cast<int>(traj.controls.cols());
  const bool costates = traj.has_costates();
  const int n = traj.unitaries.empty() ? 0 : traj.unitaries.front().dim();
  const BasisSet* basis = costates ? &standard_basis(n) : nullptr;
  std::string out = "t";
  for (int j = 0; j < l; ++j) out += ",u" + std::to_string(j + 1);
  if (costates) {
    for (std::size_t k = 0; k < basis->size(); ++k) out += ",f" + std::to_string(k + 1);
    out += ",trHF,trF2";
  }
  out += "\n";
  for (std::size_t k = 0; k < traj.grid.size(); ++k) {
    out += fmt17(traj.grid[k]);
    for (int j = 0; j < l; ++j) out += "," + fmt17(traj.controls(static_cast<Eigen::Index>(k), j));
    if (costates) {
      const HermitianOp& f = traj.costates[k];
      const Eigen::VectorXd c = expand(f, *basis);
      for (Eigen::Index i = 0; i < c.size(); ++i) out += "," + fmt17(c(i));
      out += "," + fmt17(trace_product(traj.hamiltonians[k], f));
      out += "," + fmt17(trace_product(f, f));
    }
    out += "\n";
  }
  return out;
}

}  // namespace qbrach::io
