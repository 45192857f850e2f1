// One line per acceptance criterion; nonzero exit if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/curvature.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/jacobi.hpp"
#include "finsler/validate.hpp"
#include "finsler/variation.hpp"

#ifndef FINSLER_LAB_CLI
#error "FINSLER_LAB_CLI must name the command-line binary"
#endif

using namespace finsler;

namespace {

Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

struct Ledger {
    bool pass = true;
    std::vector<std::string> items;

    void bound(const std::string& what, double value, double limit, bool strict = false)
    {
        const bool ok = strict ? value < limit : value <= limit;
        pass = pass && ok;
        std::ostringstream s;
        s << what << "=" << value << (ok ? (strict ? "<" : "<=") : (strict ? ">=" : ">")) << limit;
        items.push_back(s.str());
    }
    void above(const std::string& what, double value, double limit)
    {
        const bool ok = value > limit;
        pass = pass && ok;
        std::ostringstream s;
        s << what << "=" << value << (ok ? ">" : "<=") << limit;
        items.push_back(s.str());
    }
    void require(const std::string& what, bool ok)
    {
        pass = pass && ok;
        items.push_back(what + (ok ? " ok" : " FAILED"));
    }
};

std::map<std::string, CheckResult> run_checks(const std::vector<std::string>& names, int samples = 100)
{
    ValidationOptions opts;
    opts.samples = samples;
    opts.only = names;
    std::map<std::string, CheckResult> out;
    for (auto& c : validate(catalog::ids(), opts).checks) out[c.name] = c;
    return out;
}

// The check must have run cleanly and stay within the criterion's own bound.
void from_check(Ledger& l, const std::map<std::string, CheckResult>& r, const std::string& name, double limit,
                int min_samples = 1)
{
    const CheckResult& c = r.at(name);
    l.require(name + " samples " + std::to_string(c.samples), c.pass && c.applicable && c.samples >= min_samples);
    if (!c.note.empty() && !c.pass) l.items.push_back("(" + c.note + ")");
    l.bound(name, c.residual, limit);
}

using Clock = std::chrono::steady_clock;

int failures = 0;

void criterion(int id, const std::string& title, double budget_seconds, const std::function<void(Ledger&)>& body)
{
    Ledger l;
    const auto t0 = Clock::now();
    try {
        body(l);
    } catch (const std::exception& e) {
        l.require(std::string("unexpected exception: ") + e.what(), false);
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (budget_seconds > 0) l.bound("runtime_s", secs, budget_seconds, true);
    if (!l.pass) ++failures;
    std::printf("criterion %d %s: %s [%.1fs]", id, l.pass ? "PASS" : "FAIL", title.c_str(), secs);
    for (const auto& s : l.items) std::printf(" | %s", s.c_str());
    std::printf("\n");
    std::fflush(stdout);
}

PiecewiseCurve line_curve(const Vec& a, const Vec& d, double b)
{
    return PiecewiseCurve::from_function(
        [a, d](const Jet& t) {
            std::vector<Jet> x;
            for (int i = 0; i < a.size(); ++i) x.push_back(a(i) + d(i) * t);
            return x;
        },
        0, b);
}

void criticality_cases(Ledger& l)
{
    // Euclidean: segment between two parallel lines
    const auto e = catalog::euclidean();
    const auto P = SubmanifoldPatch::line(vec({0, 0}), vec({0, 1}));
    const auto Q = SubmanifoldPatch::line(vec({1, 0}), vec({0, 1}));
    const auto seg = line_curve(vec({0, 0.3}), vec({1, 0}), 1);
    const auto rs = critical_point_test(*e, seg, P, Q);
    l.require("euclidean orthogonal segment critical", rs.critical);
    const auto bent = PiecewiseCurve::from_function(
        [](const Jet& t) { return std::vector<Jet>{t, 0.3 + 0.1 * t * (1 - t)}; }, 0, 1);
    l.above("euclidean non-geodesic residual", critical_point_test(*e, bent, P, Q).geodesic_residual, 1e-3);
    const auto broken = PiecewiseCurve::from_functions(
        {[](const Jet& t) { return std::vector<Jet>{t, Jet(0.3)}; },
         [](const Jet& t) { return std::vector<Jet>{t, 0.3 + 0.2 * (t - 0.5)}; }},
        {0, 0.5, 1});
    l.above("euclidean broken jump", critical_point_test(*e, broken, P, Q).legendre_jump, 1e-3);
    const auto tilted = line_curve(vec({0, 0.3}), vec({1, std::tan(10.0 * M_PI / 180)}), 1);
    const auto rt = critical_point_test(*e, tilted, P, Q);
    l.above("euclidean tilted orthogonality", std::max(rt.orthogonality_a, rt.orthogonality_b), 1e-3);

    // sphere: equator arc between the meridians phi = 0 and phi = 1
    const auto s = catalog::sphere();
    const auto M0 = SubmanifoldPatch::line(vec({M_PI / 2, 0}), vec({1, 0}));
    const auto M1 = SubmanifoldPatch::line(vec({M_PI / 2, 1}), vec({1, 0}));
    const auto arc = integrate_geodesic(*s, vec({M_PI / 2, 0}), vec({0, 1}), 0, 1).curve();
    l.require("sphere equator arc critical", critical_point_test(*s, arc, M0, M1).critical);
    const auto sbent = PiecewiseCurve::from_function(
        [](const Jet& t) { return std::vector<Jet>{M_PI / 2 + 0.1 * t * (1 - t), t}; }, 0, 1);
    l.above("sphere non-geodesic residual", critical_point_test(*s, sbent, M0, M1).geodesic_residual, 1e-3);
    const auto sbroken = PiecewiseCurve::from_functions(
        {[](const Jet& t) { return std::vector<Jet>{Jet(M_PI / 2), t}; },
         [](const Jet& t) { return std::vector<Jet>{M_PI / 2 + 0.2 * (t - 0.5), t}; }},
        {0, 0.5, 1});
    l.above("sphere broken jump", critical_point_test(*s, sbroken, M0, M1).legendre_jump, 1e-3);
    // tilted great circle from the phi = 0 meridian, cut where it meets phi = 1
    const Vec v0 = vec({0.2, 1});
    const auto probe = integrate_geodesic(*s, vec({M_PI / 2, 0}), v0, 0, 2);
    double lo = 0, hi = 2;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (probe.position(mid)(1) < 1.0 ? lo : hi) = mid;
    }
    const auto tilt = integrate_geodesic(*s, vec({M_PI / 2, 0}), v0, 0, 0.5 * (lo + hi)).curve();
    const auto rst = critical_point_test(*s, tilt, M0, M1);
    l.require("sphere tilted arc is geodesic", rst.geodesic_residual < 1e-6);
    l.above("sphere tilted orthogonality", std::max(rst.orthogonality_a, rst.orthogonality_b), 1e-3);
}

void flag_references(Ledger& l)
{
    const std::map<std::string, double> tolerance{{"euclidean", 1e-6}, {"quartic", 1e-6}, {"pseudo_euclidean", 1e-6},
                                                  {"sphere", 1e-6},    {"hyperbolic", 1e-6}, {"funk", 1e-5}};
    for (const auto& [id, tol] : tolerance) {
        const auto m = catalog::by_id(id);
        const double K0 = *m->flag_curvature;
        Rng rng(42);
        double worst = 0.0;
        int flags = 0;
        for (int attempt = 0; flags < 20 && attempt < 400; ++attempt) {
            const auto [x, v] = sample_tangent(*m, rng);
            const Vec w = rng.vector(m->dim, -1, 1);
            try {
                worst = std::max(worst, std::abs(flag_curvature(*m, x, v, w) - K0));
                ++flags;
            } catch (const Error&) {
                // degenerate flag for this draw
            }
        }
        l.require(id + " flags " + std::to_string(flags), flags >= 20);
        l.bound(id + " |K-" + std::to_string(K0).substr(0, 5) + "|", worst, tol);
    }
}

void jacobi_cases(Ledger& l)
{
    double dexp_worst = 0.0, tangential_worst = 0.0;
    Rng rng(6);
    for (const auto& id : catalog::ids()) {
        const auto m = catalog::by_id(id);
        for (int trial = 0; trial < 5; ++trial) {
            const auto [p, v0] = sample_tangent(*m, rng);
            const Vec v = 0.6 * v0 / std::sqrt(std::abs(lagrangian_value(*m, p, v0)));
            const Vec w = rng.vector(m->dim, -1, 1);
            const double h = 1e-4;
            const Vec fd = (exponential_map(*m, p, v + h * w) - exponential_map(*m, p, v - h * w)) / (2 * h);
            dexp_worst = std::max(dexp_worst, (dexp(*m, p, v, w) - fd).norm());

            const auto geo = integrate_geodesic(*m, p, v, 0, 1);
            const double a1 = rng.uniform(-1, 1), a2 = rng.uniform(-1, 1);
            const auto J = solve_jacobi(*m, geo, a2 * v, a1 * v);
            for (double t : {0.25, 0.5, 0.75, 1.0})
                tangential_worst = std::max(tangential_worst, (J.value(t) - (a1 * t + a2) * geo.velocity(t)).norm());
        }
    }
    l.bound("dexp vs FD of exp", dexp_worst, 1e-5);
    l.bound("tangential (a1 t + a2) gammadot", tangential_worst, 1e-6);

    const auto s = catalog::sphere();
    const auto eq = integrate_geodesic(*s, vec({M_PI / 2, 0}), vec({0, 1}), 0, 3.5);
    const auto conj = conjugate_points(*s, eq);
    l.require("sphere conjugate count " + std::to_string(conj.size()), conj.size() == 1);
    if (!conj.empty()) l.bound("sphere |t*-pi|", std::abs(conj[0].t - M_PI), 1e-6);

    const auto e = catalog::euclidean();
    const auto in = integrate_geodesic(*e, vec({1, 0}), vec({-1, 0}), 0, 1.8);
    const auto fc = focal_points(*e, in, SubmanifoldPatch::circle(vec({0, 0}), 1.0));
    l.require("circle focal count " + std::to_string(fc.size()), fc.size() == 1);
    if (!fc.empty()) l.bound("circle |t*-1|", std::abs(fc[0].t - 1.0), 1e-6);

    const auto eq2 = integrate_geodesic(*s, vec({M_PI / 2, 0}), vec({0, 1}), 0, 2.5);
    const auto fs = focal_points(*s, eq2, SubmanifoldPatch::line(vec({M_PI / 2, 0}), vec({1, 0})));
    l.require("equator focal count " + std::to_string(fs.size()), fs.size() == 1);
    if (!fs.empty()) l.bound("equator |t*-pi/2|", std::abs(fs[0].t - M_PI / 2), 1e-6);
}

struct Captured {
    int status = -1;
    std::string out;
};

Captured capture(const std::string& command)
{
    Captured c;
    FILE* p = popen(command.c_str(), "r");
    if (!p) return c;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) c.out.append(buf.data(), n);
    const int st = pclose(p);
    c.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return c;
}

void cli_cases(Ledger& l)
{
    const std::string cli = "'" + std::string(FINSLER_LAB_CLI) + "'";
    {
        std::ofstream f("acceptance_jacobi.json");
        f << R"({"metric":"sphere","task":"jacobi","x0":[1.5707963267948966,0],"v0":[0,1],"span":[0,3],)"
          << R"("J0":[[0,0],[1,0]],"dJ0":[[1,0],[0,0]],"samples":31})";
    }
    const std::vector<std::string> runs{
        "geodesic --metric randers --x0 0.1,0.2 --v0 0.5,-0.3 --span 0,2 --seed 11",
        "flagcurv --metric funk --samples 25 --seed 11",
        "flagcurv --metric quartic --samples 25 --seed 11 --format json",
        "run --scenario acceptance_jacobi.json",
    };
    for (const auto& r : runs) {
        const std::string cmd = cli + " " + r + " 2>&1";
        const Captured a = capture(cmd), b = capture(cmd);
        l.require("repeat " + r.substr(0, r.find(' ')) + " exit " + std::to_string(a.status),
                  a.status == 0 && b.status == 0 && !a.out.empty() && a.out == b.out);
    }
    const auto t0 = Clock::now();
    const Captured v1 = capture(cli + " validate --seed 3 2>&1");
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    l.require("validate full catalog exit " + std::to_string(v1.status), v1.status == 0);
    l.bound("validate runtime_s", secs, 300.0, true);
    const Captured v2 = capture(cli + " validate --seed 3 2>&1");
    l.require("validate byte-identical", v1.out == v2.out && !v1.out.empty());
}

} // namespace

int main()
{
    criterion(1, "metric identities", 10.0, [](Ledger& l) {
        const auto r = run_checks({"metric.g_vv_equals_L", "metric.g_homogeneity", "metric.cartan_homogeneity",
                                   "metric.cartan_symmetry", "metric.cartan_v_contraction"},
                                  100);
        for (const auto& [name, c] : r) from_check(l, r, name, 1e-8, 700);
    });

    criterion(2, "connection axioms", 30.0, [](Ledger& l) {
        const auto r = run_checks({"connection.torsion_free", "connection.almost_g_compatibility",
                                   "connection.levi_civita_reduction"});
        from_check(l, r, "connection.torsion_free", 0.0);
        from_check(l, r, "connection.almost_g_compatibility", 1e-7, 20 * 7);
        from_check(l, r, "connection.levi_civita_reduction", 1e-9);
    });

    criterion(3, "geodesics", 0.0, [](Ledger& l) {
        const auto r = run_checks({"geodesic.energy_conservation", "geodesic.flow_homogeneity"});
        from_check(l, r, "geodesic.energy_conservation", 1e-8);
        from_check(l, r, "geodesic.flow_homogeneity", 1e-8);
        IntegratorOptions o;
        o.rtol = o.atol = 1e-10;
        const auto mer = integrate_geodesic(*catalog::sphere(), vec({M_PI / 2, 0}), vec({-1, 0}), 0, M_PI / 4, o);
        l.bound("meridian |theta(pi/4)-pi/4|", std::abs(mer.position(M_PI / 4)(0) - M_PI / 4), 1e-8);
    });

    criterion(4, "variation formulas", 60.0, [](Ledger& l) {
        const auto r = run_checks({"variation.first_variation_fd", "variation.second_variation_fd"});
        from_check(l, r, "variation.first_variation_fd", 1e-6, 10 * 7);
        from_check(l, r, "variation.second_variation_fd", 1e-5, 10 * 7);
    });

    criterion(5, "criticality", 0.0, criticality_cases);

    criterion(6, "curvature cross-validation", 60.0, [](Ledger& l) {
        const auto r = run_checks({"curvature.route_agreement", "curvature.variation_independence"});
        from_check(l, r, "curvature.route_agreement", 1e-6);
        from_check(l, r, "curvature.variation_independence", 1e-6);
        flag_references(l);
    });

    criterion(7, "jacobi structure", 0.0, [](Ledger& l) {
        const auto r = run_checks({"jacobi.geodesic_variation_oracle", "jacobi.wronskian_drift"});
        from_check(l, r, "jacobi.geodesic_variation_oracle", 1e-5);
        from_check(l, r, "jacobi.wronskian_drift", 1e-7);
        jacobi_cases(l);
    });

    criterion(8, "index form", 0.0, [](Ledger& l) {
        const auto r = run_checks({"variation.index_symmetry", "variation.index_kernel", "submanifold.duality"});
        from_check(l, r, "variation.index_symmetry", 1e-7);
        from_check(l, r, "variation.index_kernel", 1e-6);
        from_check(l, r, "submanifold.duality", 1e-7);
    });

    criterion(9, "cli determinism", 0.0, cli_cases);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
