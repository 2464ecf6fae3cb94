#ifndef POINCARE_HALFMAP_H
#define POINCARE_HALFMAP_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum PhStatus {
  PH_STATUS_OK = 0,
  PH_STATUS_NULL_POINTER = 1,
  PH_STATUS_INVALID_ARGUMENT = 2,
  PH_STATUS_NOT_OBSERVABLE = 3,
  PH_STATUS_DEGENERATE_SYSTEM = 4,
  PH_STATUS_NO_HALF_MAP = 5,
  PH_STATUS_SINGULAR_POINT = 6,
  PH_STATUS_UNDEFINED_AT_AXIS = 7,
  PH_STATUS_OUT_OF_DOMAIN = 8,
  PH_STATUS_OFF_LEVEL_CURVE = 9,
  PH_STATUS_SINGULAR_PATH = 10,
  PH_STATUS_NO_CONVERGENCE = 11,
  PH_STATUS_NO_RETURN = 12,
  PH_STATUS_EVENT_MISSED = 13,
  PH_STATUS_INDEX_OUT_OF_RANGE = 14,
  PH_STATUS_INTERNAL = 15,
} PhStatus;

typedef enum PhScenario {
  PH_SCENARIO_S0 = 0,
  PH_SCENARIO_S1 = 1,
  PH_SCENARIO_S2 = 2,
  PH_SCENARIO_NO_HALF_MAP = 3,
} PhScenario;

// Opaque result of a limit-cycle search.
typedef struct PhCycleReport PhCycleReport;

// Opaque Liénard system `x' = Tx - y, y' = Dx - a`.
typedef struct PhSystem PhSystem;

typedef struct PhClassification {
  enum PhScenario scenario;
  double c;
  double q;
  // Loop constant.
  double d;
  // False when the admissible interval is empty.
  bool has_interval;
  // `-INFINITY` when unbounded.
  double lower;
  // `INFINITY` when unbounded.
  double upper;
} PhClassification;

typedef struct PhHalfMap {
  double image;
  double tau;
  double residual;
  size_t iterations;
  bool boundary;
} PhHalfMap;

typedef struct PhLimitCycle {
  double y0;
  double y1;
  double period;
  double multiplier;
} PhLimitCycle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static, NUL-terminated description of a status code.
const char *ph_status_message(enum PhStatus status);

// Creates a system from Liénard parameters.
//
// # Safety
// `out` must be valid for writes. Release the handle with [`ph_system_free`].
enum PhStatus ph_system_new(double a, double t, double d, struct PhSystem **out);

// Creates a system from `x' = Mx + b`, `M` in row-major order.
//
// # Safety
// `m` must point to 4 readable doubles, `b` to 2, and `out` must be valid
// for writes.
enum PhStatus ph_system_from_matrix(const double *m, const double *b, struct PhSystem **out);

// Reads back the Liénard parameters `(a, T, D)`.
//
// # Safety
// `sys` must be a live handle; `out` must point to 3 writable doubles.
enum PhStatus ph_system_params(const struct PhSystem *sys, double *out);

// # Safety
// `sys` must be null or a handle from this library not yet freed.
void ph_system_free(struct PhSystem *sys);

// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum PhStatus ph_classify(const struct PhSystem *sys, struct PhClassification *out);

// Left half-map at `y0 >= 0`.
//
// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum PhStatus ph_left_halfmap(const struct PhSystem *sys, double y0, struct PhHalfMap *out);

// Right half-map at `y1 <= 0`; `image` receives `y0`.
//
// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum PhStatus ph_right_halfmap(const struct PhSystem *sys, double y1, struct PhHalfMap *out);

// Value of the left half-map branch at the tangency point.
//
// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum PhStatus ph_boundary_point(const struct PhSystem *sys, double *out);

// Index-like function `F(y1, y0)`.
//
// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum PhStatus ph_index_f(const struct PhSystem *sys, double y1, double y0, double *out);

// Left excursion by direct integration of the flow; `residual` receives
// `|x|` at the located crossing and `iterations` the accepted steps.
//
// # Safety
// `sys` must be a live handle and `out` valid for writes.
enum PhStatus ph_oracle_left_halfmap(const struct PhSystem *sys,
                                     double y0,
                                     double rtol,
                                     struct PhHalfMap *out);

// Searches crossing limit cycles of the two-zone system with `left`
// governing `x < 0` and `right` governing `x > 0`.
//
// # Safety
// `left` and `right` must be live handles and `out` valid for writes.
// Release the report with [`ph_cycle_report_free`].
enum PhStatus ph_find_limit_cycles(const struct PhSystem *left,
                                   const struct PhSystem *right,
                                   double y0_max,
                                   size_t grid,
                                   struct PhCycleReport **out);

// Number of cycles in the report (0 for a null handle).
//
// # Safety
// `report` must be null or a live handle.
size_t ph_cycle_report_len(const struct PhCycleReport *report);

// Whether every scanned orbit was found periodic.
//
// # Safety
// `report` must be null or a live handle.
bool ph_cycle_report_is_degenerate(const struct PhCycleReport *report);

// Cycle `index`, in increasing `y0`.
//
// # Safety
// `report` must be a live handle and `out` valid for writes.
enum PhStatus ph_cycle_report_get(const struct PhCycleReport *report,
                                  size_t index,
                                  struct PhLimitCycle *out);

// # Safety
// `report` must be null or a handle from this library not yet freed.
void ph_cycle_report_free(struct PhCycleReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POINCARE_HALFMAP_H */
