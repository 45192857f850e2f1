#include "finsler/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <variant>

#include <json.hpp>

#include "finsler/connection.hpp"
#include "finsler/curvature.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/jacobi.hpp"
#include "finsler/validate.hpp"
#include "finsler/variation.hpp"

namespace finsler {

using json = nlohmann::ordered_json;

SchemaError::SchemaError(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code))
{}

namespace {

[[noreturn]] void schema(const std::string& code, const std::string& message) { throw SchemaError(code, message); }

const json& require(const json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key)) schema("schema.missing_field", where + ": missing required field '" + key + "'");
    return j.at(key);
}

void only_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& where)
{
    if (!j.is_object()) schema("schema.type", where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) schema("schema.unknown_field", where + ": unknown field '" + key + "'");
    }
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) schema("schema.type", where + " must be a number");
    return j.get<double>();
}

Vec vector_of(const json& j, const std::string& where, int n = -1)
{
    if (!j.is_array()) schema("schema.type", where + " must be an array of numbers");
    Vec v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = number(j[i], where + "[" + std::to_string(i) + "]");
    if (n >= 0 && v.size() != n)
        schema("schema.dimension", where + " has " + std::to_string(v.size()) + " entries, expected " + std::to_string(n));
    return v;
}

std::vector<Vec> vectors_of(const json& j, const std::string& where, int n)
{
    if (!j.is_array()) schema("schema.type", where + " must be an array of vectors");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(vector_of(j[i], where + "[" + std::to_string(i) + "]", n));
    return out;
}

std::vector<double> numbers_of(const json& j, const std::string& where)
{
    const Vec v = vector_of(j, where);
    return {v.data(), v.data() + v.size()};
}

// Accepts a single vector or a list of vectors (one per field).
Mat columns_of(const json& j, const std::string& where, int n)
{
    if (j.is_array() && !j.empty() && j[0].is_array()) {
        const auto cols = vectors_of(j, where, n);
        Mat out(n, static_cast<int>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<int>(i)) = cols[i];
        return out;
    }
    return vector_of(j, where, n);
}

MetricPtr metric_from_json(const json& j)
{
    if (j.is_string()) {
        const auto id = j.get<std::string>();
        const auto& ids = catalog::ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end() && id != "broken")
            schema("metric.unknown", "unknown metric id '" + id + "'");
        return catalog::by_id(id);
    }
    only_fields(j, {"id", "params"}, "metric");
    const json& idj = require(j, "id", "metric");
    if (!idj.is_string()) schema("schema.type", "metric.id must be a string");
    const auto id = idj.get<std::string>();
    const json params = j.contains("params") ? j.at("params") : json::object();
    auto dim = [&]() {
        const json& d = params.at("dim");
        if (!d.is_number_integer() || d.get<int>() < 1) schema("schema.type", "metric.params.dim must be a positive integer");
        return d.get<int>();
    };
    if (id == "euclidean" || id == "quartic") {
        only_fields(params, {"dim"}, "metric.params");
        const int n = params.contains("dim") ? dim() : 2;
        return id == "euclidean" ? catalog::euclidean(n) : catalog::quartic(n);
    }
    if (id == "pseudo_euclidean") {
        only_fields(params, {"signature"}, "metric.params");
        if (!params.contains("signature")) return catalog::pseudo_euclidean();
        std::vector<int> sig;
        for (const auto& s : params.at("signature")) {
            if (!s.is_number_integer() || std::abs(s.get<int>()) != 1)
                schema("schema.type", "metric.params.signature entries must be +1 or -1");
            sig.push_back(s.get<int>());
        }
        return catalog::pseudo_euclidean(sig);
    }
    if (id == "randers") {
        only_fields(params, {"base", "beta", "beta_grad"}, "metric.params");
        auto base = catalog::RandersBase::euclidean;
        if (params.contains("base")) {
            const auto b = params.at("base");
            if (b == "hyperbolic") base = catalog::RandersBase::hyperbolic;
            else if (b != "euclidean") schema("schema.type", "metric.params.base must be 'euclidean' or 'hyperbolic'");
        }
        const Vec beta = params.contains("beta") ? vector_of(params.at("beta"), "metric.params.beta", 2) : Vec();
        Mat grad;
        if (params.contains("beta_grad")) {
            const auto rows = vectors_of(params.at("beta_grad"), "metric.params.beta_grad", 2);
            if (rows.size() != 2) schema("schema.dimension", "metric.params.beta_grad must be 2 x 2");
            grad.resize(2, 2);
            grad.row(0) = rows[0].transpose();
            grad.row(1) = rows[1].transpose();
        }
        return catalog::randers(base, beta, grad);
    }
    if (id == "sphere" || id == "hyperbolic" || id == "funk" || id == "broken") {
        only_fields(params, {}, "metric.params");
        return catalog::by_id(id);
    }
    schema("metric.unknown", "unknown metric id '" + id + "'");
}

SubmanifoldPatch patch_from_json(const json& j, int n, const std::string& where)
{
    const json& tj = require(j, "type", where);
    if (!tj.is_string()) schema("schema.type", where + ".type must be a string");
    const auto type = tj.get<std::string>();
    if (type == "point") {
        only_fields(j, {"type", "p"}, where);
        return SubmanifoldPatch::point(vector_of(require(j, "p", where), where + ".p", n));
    }
    if (type == "line") {
        only_fields(j, {"type", "p", "direction"}, where);
        return SubmanifoldPatch::line(vector_of(require(j, "p", where), where + ".p", n),
                                      vector_of(require(j, "direction", where), where + ".direction", n));
    }
    if (type == "plane") {
        only_fields(j, {"type", "p", "basis"}, where);
        const auto cols = vectors_of(require(j, "basis", where), where + ".basis", n);
        Mat basis(n, static_cast<int>(cols.size()));
        for (std::size_t i = 0; i < cols.size(); ++i) basis.col(static_cast<int>(i)) = cols[i];
        return SubmanifoldPatch::plane(vector_of(require(j, "p", where), where + ".p", n), basis);
    }
    if (type == "parabola") {
        only_fields(j, {"type", "p", "direction", "curvature"}, where);
        return SubmanifoldPatch::parabola(vector_of(require(j, "p", where), where + ".p", n),
                                          vector_of(require(j, "direction", where), where + ".direction", n),
                                          vector_of(require(j, "curvature", where), where + ".curvature", n));
    }
    if (type == "circle" || type == "sphere") {
        only_fields(j, {"type", "center", "radius"}, where);
        const int need = type == "circle" ? 2 : 3;
        if (n != need) schema("schema.dimension", where + ": " + type + " needs a " + std::to_string(need) + "d chart");
        const Vec c = vector_of(require(j, "center", where), where + ".center", n);
        const double r = number(require(j, "radius", where), where + ".radius");
        return type == "circle" ? SubmanifoldPatch::circle(c, r) : SubmanifoldPatch::sphere(c, r);
    }
    if (type == "graph") {
        only_fields(j, {"type", "coefficients"}, where);
        if (n != 2) schema("schema.dimension", where + ": graph needs a 2d chart");
        return SubmanifoldPatch::graph(numbers_of(require(j, "coefficients", where), where + ".coefficients"));
    }
    schema("schema.type", where + ": unknown patch type '" + type + "'");
}

VectorFieldAlongCurve field_from_json(const json& j, int n, const std::string& where)
{
    only_fields(j, {"t", "values", "breaks"}, where);
    const auto t = numbers_of(require(j, "t", where), where + ".t");
    const auto values = vectors_of(require(j, "values", where), where + ".values", n);
    if (values.size() != t.size()) schema("schema.dimension", where + ": t and values differ in length");
    const auto breaks = j.contains("breaks") ? numbers_of(j.at("breaks"), where + ".breaks") : std::vector<double>{};
    return VectorFieldAlongCurve::from_samples(t, values, breaks);
}

PiecewiseCurve curve_from_json(const json& j, int n, const std::string& where)
{
    only_fields(j, {"t", "x", "breaks"}, where);
    const auto t = numbers_of(require(j, "t", where), where + ".t");
    const auto x = vectors_of(require(j, "x", where), where + ".x", n);
    if (x.size() != t.size()) schema("schema.dimension", where + ": t and x differ in length");
    const auto breaks = j.contains("breaks") ? numbers_of(j.at("breaks"), where + ".breaks") : std::vector<double>{};
    return PiecewiseCurve::from_samples(t, x, breaks);
}

IntegratorOptions integrator_from_json(const json& j)
{
    IntegratorOptions o;
    only_fields(j, {"method", "rtol", "atol", "initial_step", "step", "max_step", "max_steps"}, "integrator");
    if (j.contains("method")) {
        const auto m = j.at("method");
        if (m == "rkf45") o.method = Integrator::rkf45;
        else if (m == "rk4") o.method = Integrator::rk4;
        else schema("schema.type", "integrator.method must be 'rkf45' or 'rk4'");
    }
    if (j.contains("rtol")) o.rtol = number(j.at("rtol"), "integrator.rtol");
    if (j.contains("atol")) o.atol = number(j.at("atol"), "integrator.atol");
    if (j.contains("initial_step")) o.initial_step = number(j.at("initial_step"), "integrator.initial_step");
    if (j.contains("step")) o.fixed_step = number(j.at("step"), "integrator.step");
    if (j.contains("max_step")) o.max_step = number(j.at("max_step"), "integrator.max_step");
    if (j.contains("max_steps")) {
        if (!j.at("max_steps").is_number_integer()) schema("schema.type", "integrator.max_steps must be an integer");
        o.max_steps = j.at("max_steps").get<int>();
    }
    return o;
}

// ---------------------------------------------------------------- output

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    json summary = json::object();
};

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

std::string csv_text(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string render_csv(const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
    out += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            std::visit(
                [&out](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) out += format_double(v);
                    else if constexpr (std::is_same_v<T, long long>) out += std::to_string(v);
                    else if constexpr (std::is_same_v<T, bool>) out += v ? "true" : "false";
                    else out += csv_text(v);
                },
                row[i]);
        }
        out += "\n";
    }
    return out;
}

json number_json(double x) { return std::isfinite(x) ? json(x) : json(format_double(x)); }

std::string render_json(const std::string& task, const std::string& metric, const Table& t)
{
    json doc;
    doc["task"] = task;
    doc["metric"] = metric;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& cell : row)
            std::visit(
                [&r](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) r.push_back(number_json(v));
                    else r.push_back(v);
                },
                cell);
        rows.push_back(r);
    }
    doc["rows"] = rows;
    for (const auto& [k, v] : t.summary.items()) doc[k] = v;
    return doc.dump(2) + "\n";
}

std::vector<std::string> indexed(const std::string& prefix, int n)
{
    std::vector<std::string> out;
    for (int i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

void append(std::vector<Cell>& row, const Vec& v)
{
    for (int i = 0; i < v.size(); ++i) row.push_back(v(i));
}

json vec_json(const Vec& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(number_json(v(i)));
    return a;
}

// ---------------------------------------------------------------- tasks

struct Context {
    const json& doc;
    MetricPtr metric;
    int n;
    IntegratorOptions integrator;
    std::uint64_t seed;

    bool has(const char* key) const { return doc.contains(key); }
    Vec vec(const char* key) const { return vector_of(require(doc, key, "scenario"), key, n); }
    std::pair<double, double> span() const
    {
        const json& s = require(doc, "span", "scenario");
        const Vec v = vector_of(s, "span", 2);
        if (!(v(1) > v(0))) schema("span.decreasing", "span must satisfy a < b");
        return {v(0), v(1)};
    }
    int samples(int fallback, int minimum = 1) const
    {
        if (!has("samples")) return fallback;
        const json& s = doc.at("samples");
        if (!s.is_number_integer() || s.get<long long>() < minimum)
            schema("schema.type", "samples must be an integer >= " + std::to_string(minimum));
        return s.get<int>();
    }
    GeodesicRecord geodesic() const
    {
        const auto [a, b] = span();
        return integrate_geodesic(*metric, vec("x0"), vec("v0"), a, b, integrator);
    }
};

std::vector<double> output_times(double a, double b, int count)
{
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = count == 1 ? b : a + (b - a) * i / (count - 1);
    if (count > 1) t.back() = b;
    return t;
}

Table task_geodesic(const Context& c)
{
    const auto geo = c.geodesic();
    Table t;
    t.columns = {"t"};
    for (const auto& s : indexed("x", c.n)) t.columns.push_back(s);
    for (const auto& s : indexed("v", c.n)) t.columns.push_back(s);
    t.columns.push_back("L");
    for (double s : output_times(geo.a(), geo.b(), c.samples(101, 2))) {
        const CurveJet j = geo.eval(s);
        std::vector<Cell> row{s};
        append(row, j.x);
        append(row, j.dx);
        row.push_back(lagrangian_value(*c.metric, j.x, j.dx));
        t.rows.push_back(row);
    }
    t.summary["L"] = number_json(geo.L0);
    t.summary["energy"] = number_json(geo.energy);
    t.summary["drift"] = number_json(geo.drift);
    return t;
}

Table task_exp(const Context& c)
{
    const Vec p = c.vec("x0"), v = c.vec("v0");
    Table t;
    t.columns = indexed("x", c.n);
    std::vector<Cell> row;
    append(row, exponential_map(*c.metric, p, v, c.integrator));
    if (c.has("w")) {
        for (const auto& s : indexed("dexp", c.n)) t.columns.push_back(s);
        append(row, dexp(*c.metric, p, v, c.vec("w"), c.integrator));
    }
    t.rows.push_back(row);
    return t;
}

Table task_transport(const Context& c)
{
    const Vec w = c.vec("w");
    PiecewiseCurve curve;
    if (c.has("curve")) {
        curve = curve_from_json(c.doc.at("curve"), c.n, "curve");
    } else {
        curve = c.geodesic().curve();
    }
    const auto X = parallel_transport(*c.metric, curve, w, c.integrator);
    Table t;
    t.columns = {"t"};
    for (const auto& s : indexed("w", c.n)) t.columns.push_back(s);
    for (double s : output_times(curve.a(), curve.b(), c.samples(101, 2))) {
        std::vector<Cell> row{s};
        append(row, X.eval(s, X.is_break(s) ? Side::left : Side::none).value);
        t.rows.push_back(row);
    }
    return t;
}

Table task_christoffel(const Context& c)
{
    const Vec x = c.vec("x0"), v = c.vec("v0");
    require_admissible(*c.metric, x, v);
    const PointGeometry pg(*c.metric, x, v, 3);
    const Tensor3 G = pg.gamma();
    Table t;
    t.columns = {"k", "i", "j", "gamma"};
    for (int k = 0; k < c.n; ++k)
        for (int i = 0; i < c.n; ++i)
            for (int j = 0; j < c.n; ++j) t.rows.push_back({(long long)k, (long long)i, (long long)j, G(k, i, j)});
    t.summary["spray"] = vec_json(pg.G());
    json N = json::array();
    const Mat Nm = pg.N();
    for (int i = 0; i < c.n; ++i) N.push_back(vec_json(Nm.row(i).transpose()));
    t.summary["nonlinear_connection"] = N;
    return t;
}

Table task_flagcurv(const Context& c)
{
    Table t;
    t.columns = {};
    for (const auto& s : indexed("x", c.n)) t.columns.push_back(s);
    for (const auto& s : indexed("v", c.n)) t.columns.push_back(s);
    for (const auto& s : indexed("w", c.n)) t.columns.push_back(s);
    t.columns.push_back("K_spray");
    t.columns.push_back("K_variational");
    auto emit = [&](const Vec& x, const Vec& v, const Vec& w) {
        std::vector<Cell> row;
        append(row, x);
        append(row, v);
        append(row, w);
        row.push_back(flag_curvature(*c.metric, x, v, w));
        row.push_back(flag_curvature_variational(*c.metric, x, v, w));
        t.rows.push_back(row);
    };
    if (c.has("w")) {
        emit(c.vec("x0"), c.vec("v0"), c.vec("w"));
        return t;
    }
    // random flags, at (x0, v0) when given
    Rng rng(c.seed);
    const int count = c.samples(20);
    for (int k = 0; k < count; ++k) {
        Vec x, v;
        if (c.has("x0") || c.has("v0")) {
            x = c.vec("x0");
            v = c.vec("v0");
        } else {
            std::tie(x, v) = sample_tangent(*c.metric, rng);
        }
        Vec w;
        do {
            w = rng.vector(c.n, -1, 1);
        } while (std::abs(w.normalized().dot(v.normalized())) > 0.9);
        emit(x, v, w);
    }
    return t;
}

Table task_jacobi(const Context& c)
{
    const auto geo = c.geodesic();
    const Mat J0 = columns_of(require(c.doc, "J0", "scenario"), "J0", c.n);
    const Mat dJ0 = columns_of(require(c.doc, "dJ0", "scenario"), "dJ0", c.n);
    if (J0.cols() != dJ0.cols()) schema("schema.dimension", "J0 and dJ0 hold different numbers of fields");
    const auto set = solve_jacobi_set(*c.metric, geo, J0, dJ0, c.integrator);
    const int k = static_cast<int>(J0.cols());
    Table t;
    t.columns = {"t"};
    for (int f = 1; f <= k; ++f) {
        const std::string tag = k == 1 ? "" : std::to_string(f) + "_";
        for (const auto& s : indexed("J" + tag, c.n)) t.columns.push_back(s);
        for (const auto& s : indexed("dJ" + tag, c.n)) t.columns.push_back(s);
    }
    for (double s : output_times(geo.a(), geo.b(), c.samples(101, 2))) {
        std::vector<Cell> row{s};
        const Mat V = set->values(s), D = set->derivatives(s);
        for (int f = 0; f < k; ++f) {
            append(row, V.col(f));
            append(row, D.col(f));
        }
        t.rows.push_back(row);
    }
    return t;
}

Table critical_table(const Context& c, const DeterminantScan& scan)
{
    std::string mode = "zeros";
    if (c.has("output")) {
        const json& o = c.doc.at("output");
        if (o != "zeros" && o != "det") schema("schema.type", "output must be 'zeros' or 'det'");
        mode = o.get<std::string>();
    }
    Table t;
    json zeros = json::array();
    for (const auto& z : scan.zeros) zeros.push_back({{"t", number_json(z.t)}, {"multiplicity", z.multiplicity}});
    if (mode == "zeros") {
        t.columns = {"t", "multiplicity"};
        for (const auto& z : scan.zeros) t.rows.push_back({z.t, (long long)z.multiplicity});
    } else {
        t.columns = {"t", "det"};
        for (std::size_t i = 0; i < scan.t.size(); ++i) t.rows.push_back({scan.t[i], scan.det[i]});
        t.summary["zeros"] = zeros;
    }
    return t;
}

Table task_conjugate(const Context& c)
{
    const auto geo = c.geodesic();
    const Mat I = Mat::Identity(c.n, c.n);
    const auto set = solve_jacobi_set(*c.metric, geo, Mat::Zero(c.n, c.n), I, c.integrator);
    return critical_table(c, scan_determinant(*set));
}

Table task_focal(const Context& c)
{
    const auto geo = c.geodesic();
    const auto P = patch_from_json(require(c.doc, "P", "scenario"), c.n, "P");
    const auto basis = p_jacobi_basis(*c.metric, geo, P, c.integrator);
    Mat J0(c.n, c.n), dJ0(c.n, c.n);
    for (int i = 0; i < c.n; ++i) {
        J0.col(i) = basis[i].value(geo.a());
        dJ0.col(i) = basis[i].derivative(geo.a());
    }
    const auto set = solve_jacobi_set(*c.metric, geo, J0, dJ0, c.integrator);
    return critical_table(c, scan_determinant(*set));
}

PiecewiseCurve base_curve(const Context& c)
{
    if (c.has("curve")) return curve_from_json(c.doc.at("curve"), c.n, "curve");
    return c.geodesic().curve();
}

Table task_variation(const Context& c)
{
    const auto curve = base_curve(c);
    const auto W = field_from_json(require(c.doc, "W", "scenario"), c.n, "W");
    int order = 1;
    if (c.has("order")) {
        const json& o = c.doc.at("order");
        if (!o.is_number_integer() || (o.get<int>() != 1 && o.get<int>() != 2)) schema("schema.type", "order must be 1 or 2");
        order = o.get<int>();
    }
    Table t;
    t.columns = {"energy", "first_variation"};
    std::vector<Cell> row{energy(*c.metric, curve), first_variation(*c.metric, curve, W)};
    if (order == 2) {
        std::optional<VectorFieldAlongCurve> transverse;
        if (c.has("transverse")) transverse = field_from_json(c.doc.at("transverse"), c.n, "transverse");
        t.columns.push_back("second_variation");
        row.push_back(second_variation(*c.metric, curve, W, transverse));
    }
    t.rows.push_back(row);
    return t;
}

Table task_indexform(const Context& c)
{
    const auto curve = base_curve(c);
    const auto P = patch_from_json(require(c.doc, "P", "scenario"), c.n, "P");
    const auto Q = patch_from_json(require(c.doc, "Q", "scenario"), c.n, "Q");
    const auto V = field_from_json(require(c.doc, "V", "scenario"), c.n, "V");
    const auto W = field_from_json(require(c.doc, "W", "scenario"), c.n, "W");
    Table t;
    t.columns = {"index_form"};
    t.rows.push_back({index_form(*c.metric, curve, P, Q, V, W)});
    return t;
}

struct ValidateResult {
    Table table;
    bool pass;
};

ValidateResult task_validate(const json& doc, std::uint64_t seed)
{
    std::vector<MetricPtr> metrics;
    if (doc.contains("metrics")) {
        const json& ms = doc.at("metrics");
        if (!ms.is_array() || ms.empty()) schema("schema.type", "metrics must be a non-empty array");
        for (const auto& m : ms) metrics.push_back(metric_from_json(m));
    } else if (doc.contains("metric")) {
        metrics.push_back(metric_from_json(doc.at("metric")));
    } else {
        for (const auto& id : catalog::ids()) metrics.push_back(catalog::by_id(id));
    }
    ValidationOptions opts;
    opts.seed = seed;
    if (doc.contains("samples")) {
        const json& s = doc.at("samples");
        if (!s.is_number_integer() || s.get<int>() < 1) schema("schema.type", "samples must be a positive integer");
        opts.samples = s.get<int>();
    }
    const auto report = validate(metrics, opts);
    Table t;
    t.columns = {"check", "max_residual", "tolerance", "pass", "applicable", "samples", "worst_metric", "note"};
    for (const auto& r : report.checks)
        t.rows.push_back({r.name, r.residual, r.tolerance, r.pass, r.applicable, (long long)r.samples, r.worst_metric, r.note});
    t.summary["metrics"] = report.metrics;
    t.summary["pass"] = report.pass;
    return {t, report.pass};
}

std::string error_object(const std::string& kind, const std::string& code, const std::string& message,
                         std::optional<double> at_t = std::nullopt)
{
    json e;
    e["kind"] = kind;
    e["code"] = code;
    e["message"] = message;
    if (at_t) e["at_t"] = number_json(*at_t);
    json doc;
    doc["error"] = e;
    return doc.dump() + "\n";
}

const std::set<std::string> kTasks{"geodesic", "exp",   "transport", "christoffel", "flagcurv", "jacobi",
                                   "conjugate", "focal", "variation", "indexform",   "validate"};

} // namespace

ScenarioOutcome run_scenario(const std::string& document, const RunOverrides& overrides)
{
    ScenarioOutcome out;
    try {
        json doc;
        try {
            doc = json::parse(document);
        } catch (const json::parse_error& e) {
            schema("schema.parse", e.what());
        }
        // flat form: {"metric": "randers", "a": "euclidean", "beta": [...]}
        json flat = json::object();
        for (const char* key : {"a", "beta", "beta_grad", "signature", "dim"}) {
            if (!doc.contains(key)) continue;
            flat[std::string(key) == "a" ? "base" : key] = doc.at(key);
            doc.erase(key);
        }
        if (!flat.empty()) {
            if (!doc.contains("metric") || !doc.at("metric").is_string())
                schema("schema.type", "top-level metric parameters need a metric id string");
            doc["metric"] = json{{"id", doc.at("metric")}, {"params", flat}};
        }
        only_fields(doc,
                    {"metric", "metrics", "task", "x0", "v0", "w", "span", "samples", "seed", "format", "integrator", "J0",
                     "dJ0", "P", "Q", "V", "W", "curve", "transverse", "order", "output"},
                    "scenario");
        if (overrides.task && !doc.contains("task")) doc["task"] = *overrides.task;
        const json& tj = require(doc, "task", "scenario");
        if (!tj.is_string() || !kTasks.count(tj.get<std::string>()))
            schema("schema.task", "task must be one of geodesic, exp, transport, christoffel, flagcurv, jacobi, "
                                  "conjugate, focal, variation, indexform, validate");
        const std::string task = tj.get<std::string>();
        if (overrides.task && *overrides.task != task)
            schema("schema.task", "scenario task '" + task + "' does not match the subcommand '" + *overrides.task + "'");

        std::string format = "csv";
        if (doc.contains("format")) {
            if (!doc.at("format").is_string()) schema("schema.type", "format must be a string");
            format = doc.at("format").get<std::string>();
        }
        if (overrides.format) format = *overrides.format;
        if (format != "csv" && format != "json") schema("schema.format", "format must be 'csv' or 'json'");

        std::uint64_t seed = 1;
        if (doc.contains("seed")) {
            if (!doc.at("seed").is_number_unsigned()) schema("schema.type", "seed must be a non-negative integer");
            seed = doc.at("seed").get<std::uint64_t>();
        }
        if (overrides.seed) seed = *overrides.seed;

        if (task == "validate") {
            auto [table, pass] = task_validate(doc, seed);
            out.output = format == "csv" ? render_csv(table) : render_json(task, "", table);
            if (!pass) {
                out.exit_code = 3;
                out.error = error_object("validation", "validate.failed", "one or more checks failed");
            }
            return out;
        }

        const MetricPtr metric = metric_from_json(require(doc, "metric", "scenario"));
        IntegratorOptions integrator = doc.contains("integrator") ? integrator_from_json(doc.at("integrator")) : IntegratorOptions{};
        if (overrides.tol) integrator.rtol = integrator.atol = *overrides.tol;
        const Context c{doc, metric, metric->dim, integrator, seed};
        if (doc.contains("span")) c.span();

        Table table;
        if (task == "geodesic") table = task_geodesic(c);
        else if (task == "exp") table = task_exp(c);
        else if (task == "transport") table = task_transport(c);
        else if (task == "christoffel") table = task_christoffel(c);
        else if (task == "flagcurv") table = task_flagcurv(c);
        else if (task == "jacobi") table = task_jacobi(c);
        else if (task == "conjugate") table = task_conjugate(c);
        else if (task == "focal") table = task_focal(c);
        else if (task == "variation") table = task_variation(c);
        else table = task_indexform(c);
        out.output = format == "csv" ? render_csv(table) : render_json(task, metric->id, table);
    } catch (const SchemaError& e) {
        out = {1, "", error_object("schema", e.code(), e.what())};
    } catch (const Error& e) {
        out = {2, "", error_object("domain", error_code_name(e.code()), e.what(), e.at_t())};
    } catch (const json::exception& e) {
        out = {1, "", error_object("schema", "schema.type", e.what())};
    }
    return out;
}

MetricPtr metric_from_json_text(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error&) {
        j = text; // a bare id
    }
    return metric_from_json(j);
}

} // namespace finsler
