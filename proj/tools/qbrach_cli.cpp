// Command-line front end. Links only against the C interface.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qbrach/qbrach.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNotConverged = 3;

struct Failure {
  int code;
  std::string message;
};

int exit_code(qb_status s) {
  switch (s) {
    case QB_OK:
      return kExitOk;
    case QB_ERR_NOT_CONVERGED:
    case QB_ERR_NUMERIC:
      return kExitNotConverged;
    case QB_ERR_INTERNAL:
      return 1;
    default:
      return kExitValidation;
  }
}

void check(qb_status s) {
  if (s != QB_OK) throw Failure{exit_code(s), qb_last_error()};
}

struct Text {
  char* p = nullptr;
  ~Text() { qb_string_free(p); }
  std::string str() const { return p ? std::string(p) : std::string(); }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};

using Constraint = Handle<qb_constraint, qb_constraint_free>;
using Result = Handle<qb_result, qb_result_free>;
using TrajectoryH = Handle<qb_trajectory, qb_trajectory_free>;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitValidation, "cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{kExitValidation, "cannot write " + path};
}

struct Config {
  std::string scenario;
  std::string constraint;
  std::string target;
  std::string protocol;
  double omega0 = std::numeric_limits<double>::quiet_NaN();
  double Omega = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  int grid = 256;
  int multistarts = 32;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::string out;
  std::string format = "json";
  std::string arc = "interior";
  int m_max = 4;
  std::string show_name;
};

qb_scenario_params params(const Config& c) { return qb_scenario_params{c.omega0, c.Omega, c.alpha}; }

// Loads the constraint (and the scenario default target, if any).
void load_constraint(const Config& c, Constraint& con, std::string* default_target) {
  if (!c.scenario.empty() == !c.constraint.empty())
    throw Failure{kExitValidation, "give exactly one of --scenario or --constraint"};
  if (!c.constraint.empty()) {
    check(qb_constraint_from_json(read_text(c.constraint).c_str(), &con.p));
    return;
  }
  const qb_scenario_params p = params(c);
  Text target;
  check(qb_scenario_constraint(c.scenario.c_str(), &p, &con.p, default_target ? &target.p : nullptr));
  if (default_target) *default_target = target.str();
}

std::string target_text(const Config& c, const std::string& fallback) {
  if (!c.target.empty()) return read_text(c.target);
  if (fallback.empty()) throw Failure{kExitValidation, "--target is required with --constraint"};
  return fallback;
}

int run_classify(const Config& c) {
  Constraint con;
  load_constraint(c, con, nullptr);
  Text report;
  check(qb_classify(con.p, &report.p));
  write_output(c.out, report.str());
  return kExitOk;
}

int run_evolve(const Config& c) {
  if (c.protocol.empty()) throw Failure{kExitValidation, "--protocol is required"};
  TrajectoryH traj;
  check(qb_evolve(read_text(c.protocol).c_str(), &traj.p));
  Text report;
  check(qb_trajectory_report_json(traj.p, &report.p));
  if (c.format == "json") {
    write_output(c.out, report.str());
    return kExitOk;
  }
  Text csv;
  check(qb_trajectory_csv(traj.p, &csv.p));
  write_output(c.out, csv.str());
  if (!c.out.empty()) std::cout << report.str();
  return kExitOk;
}

int emit_result(const Config& c, qb_status status, const Result& res) {
  if (!res.p) check(status);
  const std::string failure = status == QB_OK ? "" : qb_last_error();
  if (c.format == "csv") {
    TrajectoryH traj;
    check(qb_result_trajectory(res.p, &traj.p));
    Text csv;
    check(qb_trajectory_csv(traj.p, &csv.p));
    write_output(c.out, csv.str());
  } else {
    Text json;
    check(qb_result_json(res.p, &json.p));
    write_output(c.out, json.str());
  }
  if (status != QB_OK) {
    std::cerr << "qbrach: " << failure << "\n";
    return exit_code(status);
  }
  return kExitOk;
}

int run_solve(const Config& c) {
  Constraint con;
  std::string fallback;
  load_constraint(c, con, &fallback);
  const std::string target = target_text(c, fallback);
  qb_solve_options o = qb_solve_options_default();
  o.grid = c.grid;
  o.multistarts = c.multistarts;
  o.seed = c.seed;
  o.tol = c.tol;
  Result res;
  const qb_status s = qb_solve(con.p, target.c_str(), &o, &res.p);
  return emit_result(c, s, res);
}

int run_zermelo(const Config& c) {
  Constraint con;
  std::string fallback;
  load_constraint(c, con, &fallback);
  const std::string target = target_text(c, fallback);
  Result res;
  const qb_status s = qb_zermelo(con.p, target.c_str(), c.grid, &res.p);
  return emit_result(c, s, res);
}

int run_glc(const Config& c) {
  Text report;
  if (!c.scenario.empty() && c.constraint.empty()) {
    const qb_scenario_params p = params(c);
    check(qb_glc_scenario(c.scenario.c_str(), &p, c.arc.c_str(), c.m_max, c.seed, &report.p));
  } else if (!c.constraint.empty() && c.scenario.empty()) {
    check(qb_glc_chart(read_text(c.constraint).c_str(), c.m_max, c.seed, &report.p));
  } else {
    throw Failure{kExitValidation, "give exactly one of --scenario or --constraint"};
  }
  write_output(c.out, report.str());
  return kExitOk;
}

void add_scenario_params(CLI::App* app, Config& c) {
  app->add_option("--omega0", c.omega0, "Drift strength");
  app->add_option("--Omega", c.Omega, "Control bound");
  app->add_option("--alpha", c.alpha, "Target angle");
}

void add_source(CLI::App* app, Config& c) {
  app->add_option("--scenario", c.scenario, "Built-in scenario name");
  app->add_option("--constraint", c.constraint, "Constraint JSON file");
  add_scenario_params(app, c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimal unitary control toolkit"};
  app.set_version_flag("--version", std::string(qb_version()));
  app.require_subcommand(1, 1);
  Config c;

  auto* classify = app.add_subcommand("classify", "Classify a constraint set");
  add_source(classify, c);
  classify->add_option("--out", c.out, "Output file (default stdout)");

  auto* evolve = app.add_subcommand("evolve", "Propagate a protocol");
  evolve->add_option("--protocol", c.protocol, "Protocol JSON file")->required();
  evolve->add_option("--out", c.out, "Output file (default stdout)");
  std::string evolve_format = "csv";
  evolve->add_option("--format", evolve_format, "csv (trajectory, default) or json (report)")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* solve = app.add_subcommand("solve", "Shooting solver for a regular protocol");
  add_source(solve, c);
  solve->add_option("--target", c.target, "Target unitary JSON file");
  solve->add_option("--grid", c.grid, "Grid cells")->check(CLI::Range(16, 1 << 20));
  solve->add_option("--multistarts", c.multistarts, "Number of starts")->check(CLI::PositiveNumber);
  solve->add_option("--seed", c.seed, "Random seed");
  solve->add_option("--tol", c.tol, "Residual tolerance")->check(CLI::PositiveNumber);
  solve->add_option("--out", c.out, "Output file (default stdout)");
  solve->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* zermelo = app.add_subcommand("zermelo", "Closed-form Zermelo navigation");
  add_source(zermelo, c);
  zermelo->add_option("--target", c.target, "Target unitary JSON file");
  zermelo->add_option("--grid", c.grid, "Grid cells")->check(CLI::Range(16, 1 << 20));
  zermelo->add_option("--out", c.out, "Output file (default stdout)");
  zermelo->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* glc = app.add_subcommand("glc", "Generalized Legendre-Clebsch test of a singular arc");
  add_source(glc, c);
  glc->add_option("--arc", c.arc, "Scenario arc");
  glc->add_option("--m-max", c.m_max, "Highest order")->check(CLI::Range(1, 12));
  glc->add_option("--seed", c.seed, "Random seed");
  glc->add_option("--out", c.out, "Output file (default stdout)");

  auto* scenario = app.add_subcommand("scenario", "Built-in scenarios");
  scenario->require_subcommand(1, 1);
  auto* list = scenario->add_subcommand("list", "List scenarios");
  list->add_option("--out", c.out, "Output file (default stdout)");
  auto* show = scenario->add_subcommand("show", "Show one scenario");
  show->add_option("name", c.show_name, "Scenario name")->required();
  add_scenario_params(show, c);
  show->add_option("--out", c.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*classify) return run_classify(c);
    if (*evolve) {
      c.format = evolve_format;
      return run_evolve(c);
    }
    if (*solve) return run_solve(c);
    if (*zermelo) return run_zermelo(c);
    if (*glc) return run_glc(c);
    Text out;
    if (*list) {
      check(qb_scenario_list(&out.p));
    } else {
      const qb_scenario_params p = params(c);
      check(qb_scenario_show(c.show_name.c_str(), &p, &out.p));
    }
    write_output(c.out, out.str());
    return kExitOk;
  } catch (const Failure& f) {
    std::cerr << "qbrach: " << f.message << "\n";
    return f.code;
  }
}
