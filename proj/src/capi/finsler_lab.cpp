#include "finsler_lab.h"

#include <cstring>
#include <optional>
#include <string>

#include <json.hpp>

#include "finsler/connection.hpp"
#include "finsler/curvature.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/jacobi.hpp"
#include "finsler/scenario.hpp"

using namespace finsler;

struct fl_metric {
    MetricPtr m;
};

struct fl_geodesic {
    MetricPtr m;
    GeodesicRecord record;
};

namespace {

thread_local std::string last_message;
thread_local std::optional<double> last_at_t;

fl_status record(fl_status s, const std::string& message, std::optional<double> at_t = std::nullopt)
{
    last_message = message;
    last_at_t = at_t;
    return s;
}

template <typename F>
fl_status guarded(F&& body)
{
    try {
        body();
        return record(FL_OK, "");
    } catch (const SchemaError& e) {
        return record(FL_ERR_SCHEMA, e.what());
    } catch (const Error& e) {
        return record(static_cast<fl_status>(static_cast<int>(e.code()) + 1), e.what(), e.at_t());
    } catch (const std::exception& e) {
        return record(FL_ERR_INTERNAL, e.what());
    }
}

Vec in(const double* p, int n)
{
    if (!p) fail(ErrorCode::invalid_argument, "null input vector");
    return Eigen::Map<const Vec>(p, n);
}

void out(const Vec& v, double* p)
{
    if (p) std::memcpy(p, v.data(), sizeof(double) * v.size());
}

void out_rowmajor(const Mat& a, double* p)
{
    if (!p) return;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) p[i * a.cols() + j] = a(i, j);
}

const MetricDefinition& metric_of(const fl_metric* m)
{
    if (!m || !m->m) fail(ErrorCode::invalid_argument, "null metric handle");
    return *m->m;
}

IntegratorOptions options_of(const fl_integrator* o)
{
    IntegratorOptions opts;
    if (!o) return opts;
    opts.method = o->method == 1 ? Integrator::rk4 : Integrator::rkf45;
    opts.rtol = o->rtol;
    opts.atol = o->atol;
    opts.initial_step = o->initial_step;
    opts.fixed_step = o->fixed_step;
    opts.max_step = o->max_step;
    opts.max_steps = o->max_steps;
    return opts;
}

char* duplicate(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (p) std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

} // namespace

extern "C" {

const char* fl_status_name(fl_status status)
{
    if (status == FL_OK) return "ok";
    if (status == FL_ERR_INTERNAL) return "internal";
    if (status > FL_OK && status < FL_ERR_INTERNAL) return error_code_name(static_cast<ErrorCode>(static_cast<int>(status) - 1));
    return "unknown";
}

const char* fl_last_error(void) { return last_message.c_str(); }

int fl_last_error_at_t(double* t)
{
    if (!last_at_t) return 0;
    if (t) *t = *last_at_t;
    return 1;
}

void fl_integrator_defaults(fl_integrator* o)
{
    if (!o) return;
    const IntegratorOptions d;
    o->method = 0;
    o->rtol = d.rtol;
    o->atol = d.atol;
    o->initial_step = d.initial_step;
    o->fixed_step = d.fixed_step;
    o->max_step = d.max_step;
    o->max_steps = d.max_steps;
}

fl_status fl_metric_create(const char* description, fl_metric** result)
{
    return guarded([&] {
        if (!description || !result) fail(ErrorCode::invalid_argument, "null argument");
        *result = nullptr;
        MetricPtr m;
        try {
            m = metric_from_json_text(description);
        } catch (const SchemaError& e) {
            fail(ErrorCode::invalid_argument, e.what());
        }
        *result = new fl_metric{m};
    });
}

void fl_metric_destroy(fl_metric* metric) { delete metric; }

int fl_metric_dim(const fl_metric* metric) { return metric && metric->m ? metric->m->dim : 0; }

fl_status fl_lagrangian(const fl_metric* m, const double* x, const double* v, double* L)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        const double value = evaluate_L(md, in(x, md.dim), in(v, md.dim));
        if (L) *L = value;
    });
}

fl_status fl_fundamental_tensor(const fl_metric* m, const double* x, const double* v, double* g)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        out_rowmajor(fundamental_tensor(md, in(x, md.dim), in(v, md.dim)), g);
    });
}

fl_status fl_spray(const fl_metric* m, const double* x, const double* v, double* G, double* N)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        const SprayData s = spray(md, in(x, md.dim), in(v, md.dim));
        out(s.G, G);
        out_rowmajor(s.N, N);
    });
}

fl_status fl_christoffel(const fl_metric* m, const double* x, const double* v, double* gamma)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        const Tensor3 G = christoffel(md, in(x, md.dim), in(v, md.dim));
        if (gamma) std::memcpy(gamma, G.data().data(), sizeof(double) * G.data().size());
    });
}

fl_status fl_flag_curvature(const fl_metric* m, const double* x, const double* v, const double* w, double* K)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        const double value = flag_curvature(md, in(x, md.dim), in(v, md.dim), in(w, md.dim));
        if (K) *K = value;
    });
}

fl_status fl_geodesic_create(const fl_metric* m, const double* x0, const double* v0, double a, double b,
                             const fl_integrator* opts, fl_geodesic** result)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        if (!result) fail(ErrorCode::invalid_argument, "null output handle");
        *result = nullptr;
        auto rec = integrate_geodesic(md, in(x0, md.dim), in(v0, md.dim), a, b, options_of(opts));
        *result = new fl_geodesic{m->m, std::move(rec)};
    });
}

void fl_geodesic_destroy(fl_geodesic* geodesic) { delete geodesic; }

fl_status fl_geodesic_eval(const fl_geodesic* g, double t, double* x, double* v)
{
    return guarded([&] {
        if (!g) fail(ErrorCode::invalid_argument, "null geodesic handle");
        if (t < g->record.a() || t > g->record.b()) fail(ErrorCode::invalid_argument, "t outside the integrated span");
        const CurveJet j = g->record.eval(t);
        out(j.x, x);
        out(j.dx, v);
    });
}

fl_status fl_geodesic_span(const fl_geodesic* g, double* a, double* b)
{
    return guarded([&] {
        if (!g) fail(ErrorCode::invalid_argument, "null geodesic handle");
        if (a) *a = g->record.a();
        if (b) *b = g->record.b();
    });
}

fl_status fl_exp(const fl_metric* m, const double* p, const double* v, const fl_integrator* opts, double* result)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        out(exponential_map(md, in(p, md.dim), in(v, md.dim), options_of(opts)), result);
    });
}

fl_status fl_dexp(const fl_metric* m, const double* p, const double* v, const double* w, const fl_integrator* opts,
                  double* result)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        out(dexp(md, in(p, md.dim), in(v, md.dim), in(w, md.dim), options_of(opts)), result);
    });
}

fl_status fl_conjugate_points(const fl_metric* m, const fl_geodesic* g, double* t, int* multiplicity, int capacity,
                              int* count)
{
    return guarded([&] {
        const auto& md = metric_of(m);
        if (!g) fail(ErrorCode::invalid_argument, "null geodesic handle");
        const auto found = conjugate_points(md, g->record);
        for (int i = 0; i < static_cast<int>(found.size()) && i < capacity; ++i) {
            if (t) t[i] = found[i].t;
            if (multiplicity) multiplicity[i] = found[i].multiplicity;
        }
        if (count) *count = static_cast<int>(found.size());
    });
}

fl_status fl_run_scenario(const char* document, const fl_run_options* opts, char** output, char** error, int* exit_code)
{
    return guarded([&] {
        if (!document) fail(ErrorCode::invalid_argument, "null scenario document");
        RunOverrides o;
        if (opts) {
            if (opts->has_seed) o.seed = opts->seed;
            if (opts->has_tol) o.tol = opts->tol;
            if (opts->format) o.format = opts->format;
            if (opts->task) o.task = opts->task;
        }
        const ScenarioOutcome r = run_scenario(document, o);
        if (output) *output = duplicate(r.output);
        if (error) *error = duplicate(r.error);
        if (exit_code) *exit_code = r.exit_code;
    });
}

fl_status fl_validate(const char* const* metric_ids, int count, uint64_t seed, int samples, char** report_json, int* pass)
{
    return guarded([&] {
        nlohmann::ordered_json doc;
        doc["task"] = "validate";
        doc["format"] = "json";
        doc["seed"] = seed;
        if (samples > 0) doc["samples"] = samples;
        if (count > 0) {
            doc["metrics"] = nlohmann::ordered_json::array();
            for (int i = 0; i < count; ++i) doc["metrics"].push_back(metric_ids[i]);
        }
        const ScenarioOutcome r = run_scenario(doc.dump());
        if (r.exit_code == 1) throw SchemaError("schema", r.error);
        if (report_json) *report_json = duplicate(r.output);
        if (pass) *pass = r.exit_code == 0;
    });
}

void fl_string_free(char* s) { std::free(s); }

} // extern "C"
