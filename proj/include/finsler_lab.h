#ifndef FINSLER_LAB_H
#define FINSLER_LAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(FINSLER_LAB_BUILD)
#define FL_API __attribute__((visibility("default")))
#else
#define FL_API
#endif

typedef enum fl_status {
    FL_OK = 0,
    FL_ERR_INVALID_ARGUMENT,
    FL_ERR_JET_DOMAIN,
    FL_ERR_CHART,
    FL_ERR_INADMISSIBLE,
    FL_ERR_DEGENERATE_TENSOR,
    FL_ERR_BREAK_AMBIGUITY,
    FL_ERR_DOMAIN_EXIT,
    FL_ERR_STEP_FAILURE,
    FL_ERR_NOT_IN_EXP_DOMAIN,
    FL_ERR_NOT_A_GEODESIC,
    FL_ERR_DEGENERATE_FLAG,
    FL_ERR_DEGENERATE_RESTRICTION,
    FL_ERR_ORTHOGONALITY_VIOLATION,
    FL_ERR_ENDPOINT_OFF_SUBMANIFOLD,
    FL_ERR_MISMATCHED_GEODESIC,
    FL_ERR_NULL_GEODESIC,
    FL_ERR_NO_NORMAL_SECTION,
    FL_ERR_SCHEMA,
    FL_ERR_INTERNAL
} fl_status;

typedef struct fl_metric fl_metric;
typedef struct fl_geodesic fl_geodesic;

typedef struct fl_integrator {
    int method; /* 0 = adaptive RKF45, 1 = fixed-step RK4 */
    double rtol;
    double atol;
    double initial_step;
    double fixed_step;
    double max_step;
    int max_steps;
} fl_integrator;

typedef struct fl_run_options {
    int has_seed;
    uint64_t seed;
    int has_tol;
    double tol;
    const char* format; /* "csv", "json" or NULL */
    const char* task;   /* forced task or NULL */
} fl_run_options;

FL_API const char* fl_status_name(fl_status status);
/* Message and curve instant of the last failure on the calling thread. */
FL_API const char* fl_last_error(void);
FL_API int fl_last_error_at_t(double* t);

FL_API void fl_integrator_defaults(fl_integrator* opts);

/* description: a catalog id ("sphere") or a JSON object {"id": ..., "params": {...}} */
FL_API fl_status fl_metric_create(const char* description, fl_metric** out);
FL_API void fl_metric_destroy(fl_metric* metric);
FL_API int fl_metric_dim(const fl_metric* metric);

FL_API fl_status fl_lagrangian(const fl_metric* m, const double* x, const double* v, double* L);
/* g: n*n row-major */
FL_API fl_status fl_fundamental_tensor(const fl_metric* m, const double* x, const double* v, double* g);
/* G: n, N: n*n row-major (N[i*n+j] = dG^i/dv^j); either may be NULL */
FL_API fl_status fl_spray(const fl_metric* m, const double* x, const double* v, double* G, double* N);
/* gamma[(k*n+i)*n+j] = Gamma^k_ij */
FL_API fl_status fl_christoffel(const fl_metric* m, const double* x, const double* v, double* gamma);
FL_API fl_status fl_flag_curvature(const fl_metric* m, const double* x, const double* v, const double* w, double* K);

FL_API fl_status fl_geodesic_create(const fl_metric* m, const double* x0, const double* v0, double a, double b,
                                    const fl_integrator* opts, fl_geodesic** out);
FL_API void fl_geodesic_destroy(fl_geodesic* geodesic);
FL_API fl_status fl_geodesic_eval(const fl_geodesic* geodesic, double t, double* x, double* v);
FL_API fl_status fl_geodesic_span(const fl_geodesic* geodesic, double* a, double* b);

FL_API fl_status fl_exp(const fl_metric* m, const double* p, const double* v, const fl_integrator* opts, double* out);
FL_API fl_status fl_dexp(const fl_metric* m, const double* p, const double* v, const double* w,
                         const fl_integrator* opts, double* out);
/* Conjugate instants along the geodesic; count receives the total found. */
FL_API fl_status fl_conjugate_points(const fl_metric* m, const fl_geodesic* geodesic, double* t, int* multiplicity,
                                     int capacity, int* count);

/* Runs a scenario document. output/error are heap strings owned by the caller
   (release with fl_string_free); exit_code follows the CLI convention. */
FL_API fl_status fl_run_scenario(const char* document, const fl_run_options* opts, char** output, char** error,
                                 int* exit_code);
FL_API fl_status fl_validate(const char* const* metric_ids, int count, uint64_t seed, int samples, char** report_json,
                             int* pass);
FL_API void fl_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
