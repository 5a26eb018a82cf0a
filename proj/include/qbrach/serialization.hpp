#pragma once

// JSON artifacts and CSV plot data. Complex matrices are arrays of rows of
// [re, im] pairs; Hermitian operators may instead be given as
// {"coeffs": [...]} in the generalized Gell-Mann basis.

#include <string>

#include <json.hpp>

#include "qbrach/brachistochrone_solver.hpp"
#include "qbrach/scenarios.hpp"
#include "qbrach/singular_glc.hpp"

namespace qbrach::io {

using json = nlohmann::json;

/// Parses text; syntax errors become parse_error mentioning `source`.
json parse(const std::string& text, const std::string& source);

/// Reads and parses a file (io_error when unreadable).
json read_file(const std::string& path);

void write_file(const std::string& path, const std::string& text);

/// Pretty-printed with a trailing newline.
std::string dump(const json& j);

json to_json(const Matrix& m);
json to_json(const HermitianOp& h);
json to_json(const UnitaryOp& u);
json to_json(const ConstraintSet& c);
json to_json(const ClassificationReport& r);
json to_json(const Protocol& p);
json to_json(const ConservationReport& r);
json to_json(const SolveResult& r);
json to_json(const GLCReport& r);
json to_json(const Scenario& s);
json to_json(const AuditReport& r);

// Readers take the JSON path of `j` for error messages, e.g. "constraint".
Matrix matrix_from_json(const json& j, const std::string& path);
HermitianOp hermitian_from_json(const json& j, int dim, const std::string& path);
UnitaryOp unitary_from_json(const json& j, const std::string& path);
ConstraintSet constraint_from_json(const json& j, const std::string& path = "constraint");

struct ProtocolInput {
  Protocol protocol;
  std::optional<HermitianOp> costate;
};
ProtocolInput protocol_from_json(const json& j, const std::string& path = "protocol");

/// t, u1..ul, f1..fD, trHF, trF2; costate columns (and the two traces) are
/// omitted when the trajectory has no costates.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace qbrach::io
