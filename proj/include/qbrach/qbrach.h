/* C interface to the qbrach library. Every function returns a qb_status;
 * on failure qb_last_error() describes the problem (thread-local, valid
 * until the next call on the same thread). Strings returned through char**
 * are owned by the caller and released with qb_string_free. */
#ifndef QBRACH_QBRACH_H
#define QBRACH_QBRACH_H

#include <stdint.h>

#if defined(QBRACH_BUILDING_LIBRARY)
#define QB_API __attribute__((visibility("default")))
#else
#define QB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qb_status {
  QB_OK = 0,
  QB_ERR_INVALID_ARGUMENT = 1, /* null pointer or misuse of the C interface */
  QB_ERR_VALIDATION = 2,       /* rejected input: malformed JSON, bad names or values */
  QB_ERR_NOT_CONVERGED = 3,
  QB_ERR_NUMERIC = 4,
  QB_ERR_IO = 5,
  QB_ERR_INTERNAL = 6
} qb_status;

typedef struct qb_constraint qb_constraint;
typedef struct qb_result qb_result;
typedef struct qb_trajectory qb_trajectory;

typedef struct qb_solve_options {
  int grid;
  int multistarts;
  uint64_t seed;
  double tol;
  int max_iterations;
  int threads; /* 0 = hardware concurrency */
} qb_solve_options;

/* Scenario parameters; NaN selects the scenario default. */
typedef struct qb_scenario_params {
  double omega0;
  double Omega;
  double alpha;
} qb_scenario_params;

QB_API const char* qb_version(void);
QB_API const char* qb_last_error(void);
QB_API void qb_string_free(char* s);
QB_API qb_solve_options qb_solve_options_default(void);
QB_API qb_scenario_params qb_scenario_params_default(void);

/* Constraint sets */
QB_API qb_status qb_constraint_from_json(const char* json, qb_constraint** out);
QB_API qb_status qb_constraint_to_json(const qb_constraint* c, char** out);
QB_API int qb_constraint_dim(const qb_constraint* c);
QB_API int qb_constraint_controls(const qb_constraint* c);
QB_API void qb_constraint_free(qb_constraint* c);
QB_API qb_status qb_classify(const qb_constraint* c, char** report_json);

/* Regular protocols. target_json is a unitary: a matrix of [re, im] rows,
 * {"matrix": ...} or {"generator": H, "angle": s} for exp(-i s H).
 * qb_solve stores the result even when it returns QB_ERR_NOT_CONVERGED. */
QB_API qb_status qb_solve(const qb_constraint* c, const char* target_json, const qb_solve_options* options,
                          qb_result** out);
QB_API qb_status qb_zermelo(const qb_constraint* c, const char* target_json, int grid, qb_result** out);
QB_API qb_status qb_result_json(const qb_result* r, char** out);
QB_API qb_status qb_result_audit_json(const qb_result* r, int samples, uint64_t seed, char** out);
QB_API int qb_result_converged(const qb_result* r);
QB_API double qb_result_duration(const qb_result* r);
QB_API qb_status qb_result_trajectory(const qb_result* r, qb_trajectory** out);
QB_API void qb_result_free(qb_result* r);

/* Propagation of a protocol JSON {constraint, grid, controls[, sampling,
 * costate]}. */
QB_API qb_status qb_evolve(const char* protocol_json, qb_trajectory** out);
QB_API int qb_trajectory_nodes(const qb_trajectory* t);
QB_API qb_status qb_trajectory_csv(const qb_trajectory* t, char** out);
/* Final unitary plus the conservation report when costates are present. */
QB_API qb_status qb_trajectory_report_json(const qb_trajectory* t, char** out);
QB_API void qb_trajectory_free(qb_trajectory* t);

/* Scenarios */
QB_API qb_status qb_scenario_list(char** out);
QB_API qb_status qb_scenario_show(const char* name, const qb_scenario_params* p, char** out);
QB_API qb_status qb_scenario_constraint(const char* name, const qb_scenario_params* p, qb_constraint** out,
                                        char** target_json);

/* GLC test on a scenario arc, or on a chart JSON {constraint, controls[,
 * names, costate]} describing a planar chart. */
QB_API qb_status qb_glc_scenario(const char* name, const qb_scenario_params* p, const char* arc, int m_max,
                                 uint64_t seed, char** report_json);
QB_API qb_status qb_glc_chart(const char* chart_json, int m_max, uint64_t seed, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
