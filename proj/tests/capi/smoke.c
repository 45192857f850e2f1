#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "finsler_lab.h"

static int failures = 0;

#define CHECK(cond)                                                   \
    do {                                                              \
        if (!(cond)) {                                                \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                               \
        }                                                             \
    } while (0)

int main(void)
{
    fl_metric* m = NULL;
    CHECK(fl_metric_create("sphere", &m) == FL_OK);
    CHECK(fl_metric_dim(m) == 2);

    const double x[2] = {1.2, 0.3}, v[2] = {1.0, 0.0}, w[2] = {0.0, 1.0};
    double L = 0, g[4], G[2], N[4], gamma[8], K = 0;
    CHECK(fl_lagrangian(m, x, v, &L) == FL_OK && fabs(L - 1.0) < 1e-15);
    CHECK(fl_fundamental_tensor(m, x, v, g) == FL_OK && fabs(g[3] - sin(1.2) * sin(1.2)) < 1e-14);
    CHECK(fl_spray(m, x, v, G, N) == FL_OK);
    CHECK(fl_christoffel(m, x, v, gamma) == FL_OK);
    /* Gamma^theta_phiphi = -sin cos */
    CHECK(fabs(gamma[3] + sin(1.2) * cos(1.2)) < 1e-13);
    CHECK(fl_flag_curvature(m, x, v, w, &K) == FL_OK && fabs(K - 1.0) < 1e-9);

    fl_integrator opts;
    fl_integrator_defaults(&opts);
    CHECK(opts.rtol > 0 && opts.max_steps > 0);

    const double x0[2] = {M_PI / 2, 0.0}, v0[2] = {0.0, 1.0};
    fl_geodesic* geo = NULL;
    CHECK(fl_geodesic_create(m, x0, v0, 0.0, 3.5, &opts, &geo) == FL_OK);
    double a = -1, b = -1, xt[2], vt[2];
    CHECK(fl_geodesic_span(geo, &a, &b) == FL_OK && a == 0.0 && b == 3.5);
    CHECK(fl_geodesic_eval(geo, 1.0, xt, vt) == FL_OK && fabs(xt[1] - 1.0) < 1e-8);
    CHECK(fl_geodesic_eval(geo, 4.0, xt, vt) == FL_ERR_INVALID_ARGUMENT);
    double t[4];
    int mult[4], count = 0;
    CHECK(fl_conjugate_points(m, geo, t, mult, 4, &count) == FL_OK);
    CHECK(count == 1 && fabs(t[0] - M_PI) < 1e-6 && mult[0] == 1);
    fl_geodesic_destroy(geo);

    /* leaving the chart through the pole */
    const double down[2] = {-1.0, 0.0};
    CHECK(fl_geodesic_create(m, x0, down, 0.0, 3.0, NULL, &geo) == FL_ERR_DOMAIN_EXIT);
    CHECK(geo == NULL);
    double at = 0;
    CHECK(fl_last_error_at_t(&at) == 1 && fabs(at - M_PI / 2) < 1e-3);
    CHECK(strlen(fl_last_error()) > 0);
    CHECK(strcmp(fl_status_name(FL_ERR_DOMAIN_EXIT), "domain_exit") == 0);
    fl_metric_destroy(m);

    fl_metric* e = NULL;
    CHECK(fl_metric_create("{\"id\":\"euclidean\",\"params\":{\"dim\":3}}", &e) == FL_OK);
    CHECK(fl_metric_dim(e) == 3);
    const double p[3] = {0, 0, 0}, u[3] = {1, 2, 3}, dw[3] = {3, -1, 2};
    double out[3];
    CHECK(fl_exp(e, p, u, NULL, out) == FL_OK && fabs(out[2] - 3.0) < 1e-12);
    CHECK(fl_dexp(e, p, u, dw, NULL, out) == FL_OK && fabs(out[0] - 3.0) < 1e-12);
    fl_metric_destroy(e);

    CHECK(fl_metric_create("no_such_metric", &e) == FL_ERR_INVALID_ARGUMENT);
    CHECK(fl_lagrangian(NULL, x, v, &L) == FL_ERR_INVALID_ARGUMENT);

    char *output = NULL, *error = NULL;
    int code = -1;
    CHECK(fl_run_scenario("{\"metric\":\"euclidean\",\"task\":\"geodesic\",\"x0\":[0,0],\"v0\":[1,2],\"span\":[1,0]}",
                          NULL, &output, &error, &code) == FL_OK);
    CHECK(code == 1 && strstr(error, "span.decreasing") != NULL);
    fl_string_free(output);
    fl_string_free(error);

    fl_run_options ro = {0};
    ro.task = "exp";
    ro.format = "json";
    CHECK(fl_run_scenario("{\"metric\":\"euclidean\",\"x0\":[0,0],\"v0\":[1,2]}", &ro, &output, &error, &code) == FL_OK);
    CHECK(code == 0 && strstr(output, "\"exp\"") != NULL);
    fl_string_free(output);
    fl_string_free(error);

    const char* ids[1] = {"euclidean"};
    char* report = NULL;
    int pass = 0;
    CHECK(fl_validate(ids, 1, 1, 20, &report, &pass) == FL_OK && pass == 1);
    CHECK(report != NULL && strstr(report, "metric.g_homogeneity") != NULL);
    fl_string_free(report);

    if (failures) fprintf(stderr, "%d failures\n", failures);
    return failures ? 1 : 0;
}
