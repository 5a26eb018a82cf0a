/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "qbrach/qbrach.h"

static int failures = 0;

#define EXPECT(cond)                                               \
  do {                                                             \
    if (!(cond)) {                                                 \
      fprintf(stderr, "%s:%d: %s failed (%s)\n", __FILE__, __LINE__, #cond, qb_last_error()); \
      ++failures;                                                  \
    }                                                              \
  } while (0)

static char* slurp(const char* name) {
  char path[1024];
  snprintf(path, sizeof path, "%s/%s", QBRACH_TEST_DATA, name);
  FILE* f = fopen(path, "rb");
  if (!f) return NULL;
  fseek(f, 0, SEEK_END);
  long n = ftell(f);
  fseek(f, 0, SEEK_SET);
  char* buf = malloc((size_t)n + 1);
  size_t got = fread(buf, 1, (size_t)n, f);
  buf[got] = '\0';
  fclose(f);
  return buf;
}

int main(void) {
  EXPECT(strlen(qb_version()) > 0);

  qb_constraint* c = NULL;
  EXPECT(qb_constraint_from_json(NULL, &c) == QB_ERR_INVALID_ARGUMENT);
  EXPECT(qb_constraint_from_json("{", &c) == QB_ERR_VALIDATION);
  EXPECT(strlen(qb_last_error()) > 0);

  char* bad = slurp("malformed_kind.json");
  EXPECT(qb_constraint_from_json(bad, &c) == QB_ERR_VALIDATION);
  EXPECT(strstr(qb_last_error(), "kind") != NULL);
  free(bad);

  char* lz = slurp("lz.json");
  EXPECT(qb_constraint_from_json(lz, &c) == QB_OK);
  free(lz);
  EXPECT(qb_constraint_dim(c) == 2);
  EXPECT(qb_constraint_controls(c) == 1);
  char* report = NULL;
  EXPECT(qb_classify(c, &report) == QB_OK);
  EXPECT(report && strstr(report, "lotus_leaf") != NULL);
  qb_string_free(report);
  qb_constraint_free(c);

  char* xy = slurp("xy.json");
  EXPECT(qb_constraint_from_json(xy, &c) == QB_OK);
  free(xy);
  char* target = slurp("target.json");
  qb_solve_options opt = qb_solve_options_default();
  opt.grid = 64;
  opt.multistarts = 8;
  opt.threads = 1;
  qb_result* r = NULL;
  qb_status st = qb_solve(c, target, &opt, &r);
  EXPECT(st == QB_OK || st == QB_ERR_NOT_CONVERGED);
  EXPECT(r != NULL);
  if (r) {
    EXPECT(qb_result_duration(r) > 0.0);
    char* js = NULL;
    EXPECT(qb_result_json(r, &js) == QB_OK);
    EXPECT(js && strstr(js, "\"T\"") != NULL);
    qb_string_free(js);
    qb_trajectory* t = NULL;
    EXPECT(qb_result_trajectory(r, &t) == QB_OK);
    EXPECT(qb_trajectory_nodes(t) == 65);
    qb_trajectory_free(t);
    qb_result_free(r);
  }
  EXPECT(qb_zermelo(c, target, 64, &r) == QB_ERR_VALIDATION);
  free(target);
  qb_constraint_free(c);

  char* proto = slurp("protocol.json");
  qb_trajectory* t = NULL;
  EXPECT(qb_evolve(proto, &t) == QB_OK);
  free(proto);
  char* csv = NULL;
  EXPECT(qb_trajectory_csv(t, &csv) == QB_OK);
  EXPECT(csv && strncmp(csv, "t,u1,f1,f2,f3,trHF,trF2\n", 24) == 0);
  qb_string_free(csv);
  qb_trajectory_free(t);

  qb_scenario_params p = qb_scenario_params_default();
  EXPECT(isnan(p.omega0));
  char* glc = NULL;
  EXPECT(qb_glc_scenario("symmetric_two_qubit", &p, "interior", 4, 0, &glc) == QB_OK);
  EXPECT(glc && strstr(glc, "\"consistent\"") != NULL);
  qb_string_free(glc);
  EXPECT(qb_glc_scenario("nope", &p, "interior", 4, 0, &glc) == QB_ERR_VALIDATION);

  char* chart = slurp("chart.json");
  EXPECT(qb_glc_chart(chart, 4, 0, &glc) == QB_OK);
  EXPECT(glc && strstr(glc, "\"excluded\"") != NULL);
  qb_string_free(glc);
  free(chart);

  char* list = NULL;
  EXPECT(qb_scenario_list(&list) == QB_OK);
  EXPECT(list && strstr(list, "landau_zener") != NULL);
  qb_string_free(list);

  qb_constraint_free(NULL);
  qb_result_free(NULL);
  qb_trajectory_free(NULL);
  qb_string_free(NULL);

  if (failures) fprintf(stderr, "%d C API checks failed\n", failures);
  else printf("all C API checks passed\n");
  return failures ? 1 : 0;
}
