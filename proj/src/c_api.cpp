#include "qbrach/qbrach.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <string>

#include "qbrach/brachistochrone_solver.hpp"
#include "qbrach/scenarios.hpp"
#include "qbrach/serialization.hpp"
#include "qbrach/singular_glc.hpp"

struct qb_constraint {
  qbrach::ConstraintSet c;
};

struct qb_result {
  qbrach::SolveResult r;
};

struct qb_trajectory {
  qbrach::Trajectory t;
};

namespace {

using namespace qbrach;

thread_local std::string g_error;

qb_status status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_dimension:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::invalid_subspace:
    case ErrorCode::missing_costate:
    case ErrorCode::missing_derivative:
    case ErrorCode::implicit_function_violation:
    case ErrorCode::non_invertible_jacobian:
    case ErrorCode::parse_error:
      return QB_ERR_VALIDATION;
    case ErrorCode::branch_ambiguity:
    case ErrorCode::infeasible_replacement:
    case ErrorCode::degenerate_problem:
      return QB_ERR_NUMERIC;
    case ErrorCode::io_error:
      return QB_ERR_IO;
  }
  return QB_ERR_INTERNAL;
}

template <class F>
qb_status guarded(F&& f) {
  try {
    g_error.clear();
    return f();
  } catch (const Error& e) {
    g_error = std::string(to_string(e.code())) + ": " + e.what();
    return status_for(e.code());
  } catch (const io::json::exception& e) {
    g_error = std::string("parse-error: ") + e.what();
    return QB_ERR_VALIDATION;
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return QB_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_error = std::string("internal: ") + e.what();
    return QB_ERR_INTERNAL;
  }
}

qb_status null_arg(const char* what) {
  g_error = std::string("invalid-argument: ") + what + " is null";
  return QB_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qb_status emit(const io::json& j, char** out) {
  *out = copy_string(io::dump(j));
  return QB_OK;
}

ScenarioOptions options_from(const qb_scenario_params* p) {
  ScenarioOptions o;
  if (p) {
    if (!std::isnan(p->omega0)) o.omega0 = p->omega0;
    if (!std::isnan(p->Omega)) o.Omega = p->Omega;
    if (!std::isnan(p->alpha)) o.alpha = p->alpha;
  }
  return o;
}

UnitaryOp target_from(const char* json, int dim) {
  const UnitaryOp u = io::unitary_from_json(io::parse(json, "target"), "target");
  if (u.dim() != dim)
    throw Error(ErrorCode::dimension_mismatch,
                "target is " + std::to_string(u.dim()) + "-dimensional, constraint is " + std::to_string(dim));
  return u;
}

}  // namespace

extern "C" {

const char* qb_version(void) { return "0.1.0"; }

const char* qb_last_error(void) { return g_error.c_str(); }

void qb_string_free(char* s) { std::free(s); }

qb_solve_options qb_solve_options_default(void) {
  const ShootingOptions d;
  return qb_solve_options{d.grid, d.multistarts, d.seed, d.tol, d.max_iterations, d.threads};
}

qb_scenario_params qb_scenario_params_default(void) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  return qb_scenario_params{nan, nan, nan};
}

qb_status qb_constraint_from_json(const char* json, qb_constraint** out) {
  if (!json) return null_arg("json");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new qb_constraint{io::constraint_from_json(io::parse(json, "constraint"))};
    return QB_OK;
  });
}

qb_status qb_constraint_to_json(const qb_constraint* c, char** out) {
  if (!c) return null_arg("constraint");
  if (!out) return null_arg("out");
  return guarded([&] { return emit(io::to_json(c->c), out); });
}

int qb_constraint_dim(const qb_constraint* c) { return c ? c->c.dim() : 0; }

int qb_constraint_controls(const qb_constraint* c) { return c ? c->c.controls() : 0; }

void qb_constraint_free(qb_constraint* c) { delete c; }

qb_status qb_classify(const qb_constraint* c, char** report_json) {
  if (!c) return null_arg("constraint");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    io::json j = io::to_json(classify(c->c));
    j["kind"] = to_string(c->c.kind());
    j["bracket_obstruction"] = bracket_obstruction(c->c);
    return emit(j, report_json);
  });
}

qb_status qb_solve(const qb_constraint* c, const char* target_json, const qb_solve_options* options,
                   qb_result** out) {
  if (!c) return null_arg("constraint");
  if (!target_json) return null_arg("target");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = nullptr;
    ShootingProblem prob{c->c, target_from(target_json, c->c.dim()), {}};
    if (options) {
      if (options->grid < 16) throw Error(ErrorCode::invalid_argument, "grid must be at least 16");
      if (options->multistarts < 1) throw Error(ErrorCode::invalid_argument, "multistarts must be positive");
      if (!(options->tol > 0.0)) throw Error(ErrorCode::invalid_argument, "tol must be positive");
      prob.options.grid = options->grid;
      prob.options.multistarts = options->multistarts;
      prob.options.seed = options->seed;
      prob.options.tol = options->tol;
      prob.options.max_iterations = options->max_iterations;
      prob.options.threads = options->threads;
    }
    *out = new qb_result{solve_shooting(prob)};
    if (!(*out)->r.converged) {
      g_error = "not-converged: " + (*out)->r.message;
      return QB_ERR_NOT_CONVERGED;
    }
    return QB_OK;
  });
}

qb_status qb_zermelo(const qb_constraint* c, const char* target_json, int grid, qb_result** out) {
  if (!c) return null_arg("constraint");
  if (!target_json) return null_arg("target");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = nullptr;
    const auto* typical = std::get_if<TypicalBound>(&c->c.bound());
    const int n = c->c.dim();
    if (!typical || c->c.controls() != n * n - 1)
      throw Error(ErrorCode::invalid_argument, "zermelo needs a typical constraint on the full algebra");
    if (grid < 16) throw Error(ErrorCode::invalid_argument, "grid must be at least 16");
    *out = new qb_result{zermelo_solve(c->c.drift(), typical->omega, target_from(target_json, c->c.dim()), grid)};
    return QB_OK;
  });
}

qb_status qb_result_json(const qb_result* r, char** out) {
  if (!r) return null_arg("result");
  if (!out) return null_arg("out");
  return guarded([&] { return emit(io::to_json(r->r), out); });
}

qb_status qb_result_audit_json(const qb_result* r, int samples, uint64_t seed, char** out) {
  if (!r) return null_arg("result");
  if (!out) return null_arg("out");
  return guarded([&] { return emit(io::to_json(qb_consistency_audit(r->r, samples, seed)), out); });
}

int qb_result_converged(const qb_result* r) { return r && r->r.converged ? 1 : 0; }

double qb_result_duration(const qb_result* r) { return r ? r->r.duration : 0.0; }

qb_status qb_result_trajectory(const qb_result* r, qb_trajectory** out) {
  if (!r) return null_arg("result");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new qb_trajectory{r->r.trajectory};
    return QB_OK;
  });
}

void qb_result_free(qb_result* r) { delete r; }

qb_status qb_evolve(const char* protocol_json, qb_trajectory** out) {
  if (!protocol_json) return null_arg("protocol");
  if (!out) return null_arg("out");
  return guarded([&] {
    const auto in = io::protocol_from_json(io::parse(protocol_json, "protocol"));
    Trajectory t = evolve_unitary(in.protocol);
    if (in.costate) t = evolve_costate(*in.costate, std::move(t));
    *out = new qb_trajectory{std::move(t)};
    return QB_OK;
  });
}

int qb_trajectory_nodes(const qb_trajectory* t) { return t ? static_cast<int>(t->t.grid.size()) : 0; }

qb_status qb_trajectory_csv(const qb_trajectory* t, char** out) {
  if (!t) return null_arg("trajectory");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = copy_string(io::trajectory_csv(t->t));
    return QB_OK;
  });
}

qb_status qb_trajectory_report_json(const qb_trajectory* t, char** out) {
  if (!t) return null_arg("trajectory");
  if (!out) return null_arg("out");
  return guarded([&] {
    if (t->t.unitaries.empty()) throw Error(ErrorCode::invalid_argument, "trajectory is empty");
    io::json j;
    j["nodes"] = t->t.grid.size();
    j["duration"] = t->t.grid.back() - t->t.grid.front();
    j["final_unitary"] = io::to_json(t->t.final_unitary());
    if (t->t.has_costates()) j["conservation"] = io::to_json(conservation_report(t->t));
    return emit(j, out);
  });
}

void qb_trajectory_free(qb_trajectory* t) { delete t; }

qb_status qb_scenario_list(char** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    io::json j = io::json::array();
    for (const auto& name : scenario_names()) {
      const Scenario s = make_scenario(name);
      j.push_back({{"name", name}, {"arcs", s.arcs}, {"controls", s.control_names}});
    }
    return emit(j, out);
  });
}

qb_status qb_scenario_show(const char* name, const qb_scenario_params* p, char** out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] { return emit(io::to_json(make_scenario(name, options_from(p))), out); });
}

qb_status qb_scenario_constraint(const char* name, const qb_scenario_params* p, qb_constraint** out,
                                 char** target_json) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guarded([&] {
    const Scenario s = make_scenario(name, options_from(p));
    if (target_json) *target_json = copy_string(io::dump(io::to_json(s.target)));
    *out = new qb_constraint{s.constraint};
    return QB_OK;
  });
}

qb_status qb_glc_scenario(const char* name, const qb_scenario_params* p, const char* arc, int m_max, uint64_t seed,
                          char** report_json) {
  if (!name) return null_arg("name");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    const Scenario s = make_scenario(name, options_from(p));
    const ControlChart chart = scenario_chart(s, arc ? arc : "interior");
    GLCOptions o;
    o.m_max = m_max;
    o.seed = seed;
    io::json j = io::to_json(glc_test(chart, std::nullopt, o));
    j["scenario"] = s.name;
    j["arc"] = arc ? arc : "interior";
    return emit(j, report_json);
  });
}

qb_status qb_glc_chart(const char* chart_json, int m_max, uint64_t seed, char** report_json) {
  if (!chart_json) return null_arg("chart");
  if (!report_json) return null_arg("out");
  return guarded([&] {
    const io::json j = io::parse(chart_json, "chart");
    if (!j.is_object()) throw Error(ErrorCode::parse_error, "chart: expected an object");
    const bool wrapped = j.contains("constraint");
    const ConstraintSet c = io::constraint_from_json(wrapped ? j["constraint"] : j, wrapped ? "chart.constraint" : "chart");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(c.controls());
    if (wrapped && j.contains("controls")) {
      const io::json& cj = j["controls"];
      if (!cj.is_array() || static_cast<int>(cj.size()) != c.controls())
        throw Error(ErrorCode::parse_error, "chart.controls: expected " + std::to_string(c.controls()) + " numbers");
      for (int k = 0; k < c.controls(); ++k) {
        if (!cj[static_cast<std::size_t>(k)].is_number())
          throw Error(ErrorCode::parse_error, "chart.controls[" + std::to_string(k) + "]: expected a number");
        u(k) = cj[static_cast<std::size_t>(k)].get<double>();
      }
    }
    std::vector<std::string> names;
    if (wrapped && j.contains("names")) names = j["names"].get<std::vector<std::string>>();
    std::optional<HermitianOp> f;
    if (wrapped && j.contains("costate")) f = io::hermitian_from_json(j["costate"], c.dim(), "chart.costate");
    GLCOptions o;
    o.m_max = m_max;
    o.seed = seed;
    return emit(io::to_json(glc_test(planar_chart(c, u, names), f, o)), report_json);
  });
}

}  // extern "C"
