#include "finsler/validate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <thread>

#include "finsler/connection.hpp"
#include "finsler/curvature.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/jacobi.hpp"
#include "finsler/scenario.hpp"
#include "finsler/submanifold.hpp"
#include "finsler/variation.hpp"

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    double residual = 0.0;
    int samples = 0;
    bool ok = true;
    bool applicable = true;
    std::string note;

    void bump(double r)
    {
        residual = std::max(residual, std::isfinite(r) ? r : kInf);
        ++samples;
    }
};

Outcome not_applicable(const std::string& why)
{
    Outcome o;
    o.applicable = false;
    o.note = why;
    return o;
}

// Runs `body` until `count` attempts succeed; attempts raising a library
// error (chart exit, inadmissible sample) are redrawn, up to 10x the count.
template <typename F>
void collect(Outcome& out, int count, F&& body)
{
    int got = 0, tries = 0;
    std::string last;
    while (got < count && tries < 10 * count) {
        ++tries;
        try {
            body();
            ++got;
        } catch (const Error& e) {
            last = std::string(error_code_name(e.code())) + ": " + e.what();
        }
    }
    if (got < count) {
        out.ok = false;
        out.note = "only " + std::to_string(got) + "/" + std::to_string(count) + " samples succeeded; " + last;
    }
}

// Central differences with two Richardson steps.
double fd_derivative(const std::function<double(double)>& f, double x, double h)
{
    auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
    const double d1 = central(h), d2 = central(h / 2), d3 = central(h / 4);
    const double r1 = (4.0 * d2 - d1) / 3.0, r2 = (4.0 * d3 - d2) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

using Field = std::function<double(const std::vector<double>&)>;

double fd_partial(const Field& f, const std::vector<double>& z, std::vector<int> idx, double h = 1e-2)
{
    if (idx.empty()) return f(z);
    const int last = idx.back();
    idx.pop_back();
    return fd_derivative(
        [&](double s) {
            std::vector<double> zs = z;
            zs[last] = s;
            return fd_partial(f, zs, idx, h);
        },
        z[last], h);
}

double max_abs_diff(const Tensor3& a, const Tensor3& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

JetCurveFunction random_function(Rng& rng, const Vec& x0, double size)
{
    const int n = static_cast<int>(x0.size());
    const Vec a = size * rng.vector(n, -1, 1), b = 0.5 * size * rng.vector(n, -1, 1),
              c = 0.3 * size * rng.vector(n, -1, 1);
    return [=](const Jet& t) {
        std::vector<Jet> out;
        for (int i = 0; i < n; ++i) out.push_back(x0(i) + a(i) * t + b(i) * t * t + c(i) * sin(3.0 * t));
        return out;
    };
}

// random field vanishing at 0 and b
JetCurveFunction bump_function(Rng& rng, int n, double b)
{
    const auto f = random_function(rng, Vec::Zero(n), 1.0);
    const Vec c = rng.vector(n, -1, 1);
    return [f, c, b, n](const Jet& t) {
        auto out = f(t);
        for (int i = 0; i < n; ++i) out[i] = (out[i] + c(i)) * t * (b - t);
        return out;
    };
}

Vec scaled_velocity(const MetricDefinition& m, const Vec& x, const Vec& v, double speed)
{
    return speed * v / std::sqrt(std::abs(lagrangian_value(m, x, v)));
}

GeodesicRecord random_geodesic(const MetricDefinition& m, Rng& rng, double b, double speed,
                               const IntegratorOptions& opts = {})
{
    const auto [x, v] = sample_tangent(m, rng);
    return integrate_geodesic(m, x, scaled_velocity(m, x, v, speed), 0, b, opts);
}

Vec random_transverse(Rng& rng, const Vec& v)
{
    for (;;) {
        const Vec w = rng.vector(static_cast<int>(v.size()), -1, 1);
        if (std::abs(w.normalized().dot(v.normalized())) < 0.9) return w;
    }
}

// Vector with p . d = 0 (Euclidean), i.e. g-orthogonal to v when p = g v.
Vec annihilated_by(Rng& rng, const Vec& p)
{
    for (;;) {
        const Vec r = rng.vector(static_cast<int>(p.size()), -1, 1);
        const Vec d = r - (p.dot(r) / p.squaredNorm()) * p;
        if (d.norm() > 0.2) return d.normalized();
    }
}

// gamma + s W + s^2/2 U, segment by segment
PiecewiseCurve varied(const PiecewiseCurve& c, const VectorFieldAlongCurve& W, double s,
                      const VectorFieldAlongCurve* U = nullptr)
{
    std::vector<PiecewiseCurve::Segment> segs;
    const auto& k = c.knots();
    for (int i = 0; i < c.segment_count(); ++i) {
        const double t0 = k[i];
        segs.push_back([&c, &W, U, s, i, t0](double t) {
            const Side side = t <= t0 ? Side::right : Side::left;
            CurveJet j = c.eval_segment(i, t);
            const FieldJet w = W.eval(t, side);
            j.x += s * w.value;
            j.dx += s * w.deriv;
            if (U) {
                const FieldJet u = U->eval(t, side);
                j.x += 0.5 * s * s * u.value;
                j.dx += 0.5 * s * s * u.deriv;
            }
            return j;
        });
    }
    return PiecewiseCurve(k, segs);
}

double dE_fd(const MetricDefinition& m, const PiecewiseCurve& c, const VectorFieldAlongCurve& W)
{
    auto D = [&](double h) { return (energy(m, varied(c, W, h)) - energy(m, varied(c, W, -h))) / (2 * h); };
    return (4 * D(5e-4) - D(1e-3)) / 3;
}

double d2E_fd(const MetricDefinition& m, const PiecewiseCurve& c, const VectorFieldAlongCurve& W)
{
    const double E0 = energy(m, c);
    auto D = [&](double h) { return (energy(m, varied(c, W, h)) - 2 * E0 + energy(m, varied(c, W, -h))) / (h * h); };
    return (4 * D(5e-3) - D(1e-2)) / 3;
}

double relative_to(double value, double reference, double floor)
{
    return std::abs(value - reference) / std::max(std::abs(reference), floor);
}

// ---------------------------------------------------------------- jets

struct Monomial {
    double coef;
    std::vector<int> exps;
};

double poly_coeff(const std::vector<Monomial>& p, const std::vector<double>& z, const std::vector<int>& axes,
                  const MultiIndex& alpha)
{
    double total = 0.0;
    for (const auto& mono : p) {
        std::vector<int> take(z.size(), 0);
        for (std::size_t d = 0; d < axes.size(); ++d) take[axes[d]] += alpha[d];
        double term = mono.coef;
        for (std::size_t j = 0; j < z.size(); ++j) {
            if (take[j] > mono.exps[j]) {
                term = 0.0;
                break;
            }
            double binom = 1.0;
            for (int k = 0; k < take[j]; ++k) binom = binom * (mono.exps[j] - k) / (k + 1);
            term *= binom * std::pow(z[j], mono.exps[j] - take[j]);
        }
        total += term;
    }
    return total;
}

Outcome jets_polynomial_exact(Rng& rng)
{
    Outcome out;
    const int n = 2;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Monomial> p;
        for (int t = 0; t < 6; ++t) {
            Monomial mono{rng.uniform(-2, 2), std::vector<int>(2 * n, 0)};
            int budget = rng.index(5);
            while (budget-- > 0) mono.exps[rng.index(2 * n)]++;
            p.push_back(mono);
        }
        const Vec xv = rng.vector(n, -1, 1), vv = rng.vector(n, -1, 1);
        std::vector<double> x(xv.data(), xv.data() + n), v(vv.data(), vv.data() + n), z = x;
        z.insert(z.end(), v.begin(), v.end());
        TangentFunction f = [&p, n](std::span<const Jet> xs, std::span<const Jet> vs) {
            Jet total(0.0);
            for (const auto& mono : p) {
                Jet term(mono.coef);
                for (int j = 0; j < 2 * n; ++j)
                    for (int e = 0; e < mono.exps[j]; ++e) term = term * (j < n ? xs[j] : vs[j - n]);
                total = total + term;
            }
            return total;
        };
        const std::vector<Direction> dirs{{Space::x, 0}, {Space::v, 1}, {Space::x, 1}, {Space::v, 0}};
        const std::vector<int> axes{0, 3, 1, 2};
        const Jet j = lift(f, x, v, dirs, 4);
        double worst = 0.0;
        for (int k = 0; k < j.layout().size(); ++k)
            worst = std::max(worst, std::abs(j.raw(k) - poly_coeff(p, z, axes, j.layout().index(k))));
        const DerivativeTable table(f, x, v, 4);
        const std::vector<int> id{0, 1, 2, 3};
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b)
                for (int c = b; c < 4; ++c) {
                    MultiIndex alpha{};
                    alpha[a]++, alpha[b]++, alpha[c]++;
                    const double fact = std::tgamma(alpha[0] + 1) * std::tgamma(alpha[1] + 1) *
                                        std::tgamma(alpha[2] + 1) * std::tgamma(alpha[3] + 1);
                    worst = std::max(worst, std::abs(table.d(a, b, c) / fact - poly_coeff(p, z, id, alpha)));
                }
        out.bump(worst);
    }
    return out;
}

Outcome jets_fd_agreement(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const int n = m.dim, vars = 2 * n;
    collect(out, 3, [&] {
        const auto [x, v] = sample_tangent(m, rng);
        const DerivativeTable t(m.lagrangian, {x.data(), std::size_t(n)}, {v.data(), std::size_t(n)}, 4);
        std::vector<double> z(vars);
        for (int i = 0; i < n; ++i) z[i] = x(i), z[n + i] = v(i);
        const Field L = [&m, n](const std::vector<double>& zz) {
            Vec xx(n), vv(n);
            for (int a = 0; a < n; ++a) xx(a) = zz[a], vv(a) = zz[n + a];
            return lagrangian_value(m, xx, vv);
        };
        // orders 3 and 4: differences of second derivatives from an order-2 lift
        auto hessian_entry = [&m, n](int a, int b) -> Field {
            return [&m, n, a, b](const std::vector<double>& zz) {
                std::vector<Direction> dirs;
                for (int k : {a, b}) dirs.push_back(k < n ? Direction{Space::x, k} : Direction{Space::v, k - n});
                if (a == b) dirs.pop_back();
                const Jet j = lift(m.lagrangian, {zz.data(), std::size_t(n)}, {zz.data() + n, std::size_t(n)}, dirs, 2);
                return a == b ? j.mixed(0, 0) : j.mixed(0, 1);
            };
        };
        const std::vector<std::vector<int>> picks{{0},       {vars - 1},        {1, vars - 2}, {vars - 2, vars - 2},
                                                  {0, n, vars - 1}, {vars - 1, vars - 1, vars - 1},
                                                  {0, 1 % vars, n, vars - 1}, {n, n, vars - 1, vars - 1}};
        double worst = 0.0;
        for (const auto& idx : picks) {
            const double fd = idx.size() <= 2
                                  ? fd_partial(L, z, idx)
                                  : fd_partial(hessian_entry(idx[0], idx[1]), z, std::vector<int>(idx.begin() + 2, idx.end()));
            worst = std::max(worst, std::abs(t.at(idx) - fd) / std::max(1.0, std::abs(fd)));
        }
        out.bump(worst);
    });
    return out;
}

// ---------------------------------------------------------------- metric

Outcome metric_identity(const MetricDefinition& m, Rng& rng, int samples, const char* key)
{
    Outcome out;
    const AuditReport r = audit_metric(m, samples, rng.next());
    out.residual = r.max_violation.at(key);
    out.samples = r.samples;
    return out;
}

// ---------------------------------------------------------------- connection

template <typename F>
Outcome pointwise(const MetricDefinition& m, Rng& rng, int count, F&& per_sample)
{
    Outcome out;
    collect(out, count, [&] {
        const auto [x, v] = sample_tangent(m, rng);
        out.bump(per_sample(x, v));
    });
    return out;
}

Outcome connection_torsion(const MetricDefinition& m, Rng& rng)
{
    return pointwise(m, rng, 50, [&](const Vec& x, const Vec& v) {
        const Tensor3 G = christoffel(m, x, v);
        double d = 0.0;
        for (int k = 0; k < m.dim; ++k)
            for (int i = 0; i < m.dim; ++i)
                for (int j = 0; j < m.dim; ++j) d = std::max(d, std::abs(G(k, i, j) - G(k, j, i)));
        return d;
    });
}

Outcome connection_homogeneity(const MetricDefinition& m, Rng& rng)
{
    return pointwise(m, rng, 50, [&](const Vec& x, const Vec& v) {
        const Tensor3 G = christoffel(m, x, v);
        double d = 0.0;
        for (double lambda : {0.5, 2.0, 5.0}) d = std::max(d, max_abs_diff(G, christoffel(m, x, lambda * v)));
        return d;
    });
}

Outcome connection_levi_civita(const MetricDefinition& m, Rng& rng)
{
    if (!m.quadratic || !m.levi_civita) return not_applicable("no Levi-Civita reference");
    return pointwise(m, rng, 50, [&](const Vec& x, const Vec& v) { return max_abs_diff(christoffel(m, x, v), m.levi_civita(x)); });
}

Outcome connection_spray(const MetricDefinition& m, Rng& rng)
{
    return pointwise(m, rng, 50, [&](const Vec& x, const Vec& v) {
        const PointGeometry pg(m, x, v, 3);
        return (pg.gamma().contract(v, v) - 2.0 * pg.G()).cwiseAbs().maxCoeff();
    });
}

Outcome connection_almost_compat(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    std::vector<double> ts(201);
    for (int i = 0; i < 201; ++i) ts[i] = i / 200.0;
    auto samples_of = [&ts](const JetCurveFunction& f) {
        std::vector<Vec> out;
        for (double t : ts) {
            const auto xs = f(Jet(t));
            Vec v(static_cast<int>(xs.size()));
            for (int i = 0; i < v.size(); ++i) v(i) = xs[i].value();
            out.push_back(v);
        }
        return out;
    };
    collect(out, 20, [&] {
        const auto [x0, v0] = sample_tangent(m, rng);
        const auto curve = PiecewiseCurve::from_samples(ts, samples_of(random_function(rng, x0, 0.15)));
        const auto X = VectorFieldAlongCurve::from_samples(ts, samples_of(random_function(rng, Vec::Zero(m.dim), 1.0)));
        const auto Y = VectorFieldAlongCurve::from_samples(ts, samples_of(random_function(rng, Vec::Zero(m.dim), 1.0)));
        const auto W = VectorFieldAlongCurve::from_samples(ts, samples_of(random_function(rng, v0, 0.1)));
        double worst = 0.0;
        for (double t : {0.1, 0.5, 0.83}) worst = std::max(worst, check_almost_g_compat(m, curve, X, Y, W, t));
        out.bump(worst);
    });
    return out;
}

// ---------------------------------------------------------------- geodesic

Outcome geodesic_energy(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 5, [&] { out.bump(random_geodesic(m, rng, 1.0, 0.5).drift); });
    return out;
}

Outcome geodesic_flow_homogeneity(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 3, [&] {
        const auto [x, v0] = sample_tangent(m, rng);
        const Vec v = scaled_velocity(m, x, v0, 0.5);
        const auto g = integrate_geodesic(m, x, v, 0, 1);
        double worst = 0.0;
        for (double lambda : {0.5, 2.0}) {
            const auto gl = integrate_geodesic(m, x, lambda * v, 0, 1.0 / lambda);
            for (double t : {0.1, 0.25, 0.5, 1.0}) {
                const double tl = t / lambda;
                worst = std::max(worst, (gl.position(tl) - g.position(t)).norm());
                worst = std::max(worst, (gl.velocity(tl) - lambda * g.velocity(t)).norm());
            }
        }
        out.bump(worst);
    });
    return out;
}

// Transport sees the geodesic through its dense output, so both checks refine the grid.
Outcome geodesic_transport_products(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const int n = m.dim;
    IntegratorOptions fine;
    fine.max_step = 0.005;
    collect(out, 3, [&] {
        const auto g = random_geodesic(m, rng, 1.0, 0.5, fine);
        const auto curve = g.curve();
        const CurveJet c0 = g.eval(0);
        Eigen::SelfAdjointEigenSolver<Mat> eig(fundamental_tensor(m, c0.x, c0.dx));
        std::vector<VectorFieldAlongCurve> frame;
        std::vector<double> eps;
        for (int i = 0; i < n; ++i) {
            const double lam = eig.eigenvalues()(i);
            frame.push_back(parallel_transport(m, curve, eig.eigenvectors().col(i) / std::sqrt(std::abs(lam)), fine));
            eps.push_back(lam > 0 ? 1.0 : -1.0);
        }
        double worst = 0.0;
        for (double t : {0.3, 0.7, 1.0}) {
            const CurveJet c = g.eval(t);
            const Mat gt = fundamental_tensor(m, c.x, c.dx);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double val = frame[i].eval(t).value.dot(gt * frame[j].eval(t).value);
                    worst = std::max(worst, std::abs(val - (i == j ? eps[i] : 0.0)));
                }
        }
        out.bump(worst);
    });
    return out;
}

Outcome geodesic_fixed_point(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 3, [&] {
        IntegratorOptions fine;
        fine.max_step = 0.005;
        const auto g = random_geodesic(m, rng, 1.0, 0.5, fine);
        const auto vel = parallel_transport(m, g.curve(), g.velocity(0), fine);
        double worst = 0.0;
        for (double t : {0.3, 0.7, 1.0}) worst = std::max(worst, (vel.eval(t).value - g.velocity(t)).norm());
        out.bump(worst);
    });
    return out;
}

// ---------------------------------------------------------------- curvature

Outcome curvature_routes(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 10, [&] {
        const auto geo = random_geodesic(m, rng, 0.5, 0.5);
        const auto curve = geo.curve();
        const auto W = VectorFieldAlongCurve::from_function(random_function(rng, Vec::Zero(m.dim), 1.0), 0.0, 0.5);
        const auto vel = VectorFieldAlongCurve::velocity_of(curve);
        for (double t : {0.1, 0.3}) {
            const CurveJet c = geo.eval(t);
            const Vec spray_route = jacobi_operator_spray(m, c.x, c.dx) * W.eval(t).value;
            const Vec var_route = jacobi_operator_variational(m, curve, W, vel, t);
            out.bump((spray_route - var_route).norm() / (1.0 + spray_route.norm()));
        }
    });
    return out;
}

Outcome curvature_independence(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 4, [&] {
        const auto [x0, v0] = sample_tangent(m, rng);
        const auto fc = random_function(rng, x0, 0.15);
        const auto fw = random_function(rng, Vec::Zero(m.dim), 1.0);
        const auto fz = random_function(rng, Vec::Zero(m.dim), 1.0);
        const auto fu = random_function(rng, Vec::Zero(m.dim), 0.5);
        const auto curve = PiecewiseCurve::from_function(fc, 0.0, 1.0);
        const auto W = VectorFieldAlongCurve::from_function(fw, 0.0, 1.0);
        const auto Z = VectorFieldAlongCurve::from_function(fz, 0.0, 1.0);
        const double t = 0.4;
        require_admissible(m, curve.eval(t).x, curve.eval(t).dx);
        const Vec lin = jacobi_operator_variational(m, curve, W, Z, t);
        const Vec quad = jacobi_operator_variational(m, curve, W, Z, t, VariationKind::quadratic);
        const SurfaceFunction Lambda = [&](const Jet& tt, const Jet& s) {
            auto x = fc(tt);
            const auto w = fw(tt), u = fu(tt);
            for (std::size_t i = 0; i < x.size(); ++i) x[i] += sin(s) * w[i] + s * s * u[i];
            return x;
        };
        const SurfaceFunction Zext = [&](const Jet& tt, const Jet& s) {
            auto z = fz(tt);
            const auto u = fu(tt);
            for (std::size_t i = 0; i < z.size(); ++i) z[i] += s * u[i] * tt;
            return z;
        };
        const Vec other = curvature_of_variation(m, Lambda, Zext, t);
        out.bump(std::max((lin - quad).norm(), (lin - other).norm()) / (1.0 + lin.norm()));
    });
    return out;
}

Outcome curvature_tensoriality(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 3, [&] {
        const auto [x0, v0] = sample_tangent(m, rng);
        const auto curve = PiecewiseCurve::from_function(random_function(rng, x0, 0.1), 0.0, 1.0);
        const auto vel = VectorFieldAlongCurve::velocity_of(curve);
        const auto W = VectorFieldAlongCurve::from_function(random_function(rng, Vec::Zero(m.dim), 1.0), 0.0, 1.0);
        const double c1 = rng.uniform(-1, 1), c2 = rng.uniform(1, 3);
        const auto fW = W.scaled([c1, c2](const Jet& t) { return 1.0 + c1 * t * t + sin(c2 * t); });
        const double t = 0.6;
        require_admissible(m, curve.eval(t).x, curve.eval(t).dx);
        const double f = 1.0 + c1 * t * t + std::sin(c2 * t);
        const Vec RW = jacobi_operator_variational(m, curve, W, vel, t);
        const Vec RfW = jacobi_operator_variational(m, curve, fW, vel, t);
        out.bump((RfW - f * RW).norm() / (1.0 + RW.norm()));
    });
    return out;
}

Outcome curvature_velocity(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 3, [&] {
        const auto [x0, v0] = sample_tangent(m, rng);
        const auto curve = PiecewiseCurve::from_function(random_function(rng, x0, 0.1), 0.0, 1.0);
        const auto vel = VectorFieldAlongCurve::velocity_of(curve);
        const double t = rng.uniform(0.2, 0.8);
        require_admissible(m, curve.eval(t).x, curve.eval(t).dx);
        out.bump(jacobi_operator_variational(m, curve, vel, vel, t).norm());
    });
    return out;
}

Outcome curvature_riemannian_flag(const MetricDefinition& m, Rng& rng)
{
    if (!m.quadratic || !m.flag_curvature) return not_applicable("no sectional-curvature closed form");
    Outcome out;
    collect(out, 20, [&] {
        const auto [x, v] = sample_tangent(m, rng);
        out.bump(std::abs(flag_curvature(m, x, v, random_transverse(rng, v)) - *m.flag_curvature));
    });
    return out;
}

// ---------------------------------------------------------------- variation

Outcome variation_first(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    auto compare = [&](const PiecewiseCurve& curve, const VectorFieldAlongCurve& W) {
        energy(m, varied(curve, W, 2e-3));
        energy(m, varied(curve, W, -2e-3));
        out.bump(relative_to(first_variation(m, curve, W), dE_fd(m, curve, W), 1e-4));
    };
    collect(out, 10, [&] {
        const auto [x0, v0] = sample_tangent(m, rng);
        const auto curve = PiecewiseCurve::from_function(random_function(rng, x0, 0.15), 0, 1);
        compare(curve, VectorFieldAlongCurve::from_function(random_function(rng, Vec::Zero(m.dim), 0.5), 0, 1));
    });
    // broken curves: the Legendre jump term carries part of the answer
    collect(out, 2, [&] {
        const auto [x0, v0] = sample_tangent(m, rng);
        const auto f1 = random_function(rng, x0, 0.1);
        const auto x1 = f1(Jet(1.0));
        Vec p1(m.dim);
        for (int i = 0; i < m.dim; ++i) p1(i) = x1[i].value();
        const auto g = random_function(rng, p1, 0.1);
        const JetCurveFunction f2 = [g](const Jet& t) { return g(t - 1.0); };
        const auto curve = PiecewiseCurve::from_functions({f1, f2}, {0, 1, 2});
        compare(curve, VectorFieldAlongCurve::from_function(random_function(rng, Vec::Zero(m.dim), 0.3), 0, 2));
    });
    return out;
}

Outcome variation_second(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 10, [&] {
        const auto geo = random_geodesic(m, rng, 0.6, 0.8).curve();
        const auto W = VectorFieldAlongCurve::from_function(random_function(rng, Vec::Zero(m.dim), 0.4), 0, 0.6);
        out.bump(relative_to(second_variation(m, geo, W), d2E_fd(m, geo, W), 1e-4));
    });
    return out;
}

Outcome variation_criticality(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 3, [&] {
        const auto geo = random_geodesic(m, rng, 1.0, 0.8).curve();
        const auto W = VectorFieldAlongCurve::from_function(bump_function(rng, m.dim, 1.0), 0, 1);
        out.bump(std::abs(first_variation(m, geo, W)));
    });
    return out;
}

Outcome variation_index_symmetry(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const double b = 0.6;
    collect(out, 3, [&] {
        const auto geo = random_geodesic(m, rng, b, 0.8).curve();
        const CurveJet ca = geo.eval(0), cb = geo.eval(b);
        const Vec da = annihilated_by(rng, legendre(m, ca.x, ca.dx)), db = annihilated_by(rng, legendre(m, cb.x, cb.dx));
        const auto P = SubmanifoldPatch::line(ca.x, da), Q = SubmanifoldPatch::line(cb.x, db);
        auto field = [&] {
            const double alpha = rng.uniform(-1, 1), beta = rng.uniform(-1, 1);
            const auto bump = bump_function(rng, m.dim, b);
            return VectorFieldAlongCurve::from_function(
                [=](const Jet& t) {
                    auto out = bump(t);
                    for (std::size_t i = 0; i < out.size(); ++i)
                        out[i] += (1.0 - t / b) * alpha * da(i) + (t / b) * beta * db(i);
                    return out;
                },
                0, b);
        };
        const auto V = field(), W = field();
        out.bump(std::abs(index_form(m, geo, P, Q, V, W) - index_form(m, geo, P, Q, W, V)));
    });
    return out;
}

// Coefficient sigma with S = sigma e for vectors along the tangent line e.
double along(const Mat& g, const Vec& e, const Vec& S)
{
    return S.dot(g * e) / e.dot(g * e);
}

// Parabola through p with tangent d, bent along q so that S~_N(d) = sigma d;
// S~ depends affinely on the bending, so two probes fix it.
SubmanifoldPatch bent_patch(const MetricDefinition& m, const Vec& p, const Vec& d, const Vec& N, double sigma)
{
    const Mat g = fundamental_tensor(m, p, N);
    const Vec u0 = Vec::Zero(1);
    auto probe = [&](double k) {
        return along(g, d, normal_second_fundamental_form(m, SubmanifoldPatch::parabola(p, d, k * N), u0, N, d));
    };
    const double s0 = probe(0.0), s1 = probe(1.0);
    if (std::abs(s1 - s0) < 1e-8) fail(ErrorCode::degenerate_restriction, "bending does not move S~");
    return SubmanifoldPatch::parabola(p, d, ((sigma - s0) / (s1 - s0)) * N);
}

Outcome variation_index_kernel(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const double b = 0.8;
    double weakest_control = kInf;
    collect(out, 3, [&] {
        const auto geo = random_geodesic(m, rng, b, 0.8);
        const auto curve = geo.curve();
        const CurveJet ca = geo.eval(0), cb = geo.eval(b);
        const Vec w = annihilated_by(rng, legendre(m, ca.x, ca.dx));
        const auto J = solve_jacobi(m, geo, Vec::Zero(m.dim), w);
        const Vec Vb = J.value(b);
        const auto Q0 = SubmanifoldPatch::line(cb.x, Vb);
        const Mat gb = fundamental_tensor(m, cb.x, cb.dx);
        const double tau = along(gb, Vb, split_tan_nor(m, Q0, Vec::Zero(1), cb.dx, J.derivative(b)).tan);
        const auto Q = bent_patch(m, cb.x, Vb, cb.dx, tau);
        const auto P = SubmanifoldPatch::point(ca.x);
        const auto V = J.as_field();
        const auto perturbed = V.plus(VectorFieldAlongCurve::from_function(
            [w, b](const Jet& t) {
                std::vector<Jet> out;
                for (int i = 0; i < w.size(); ++i) out.push_back(0.1 * w(i) * sin(M_PI * t / b));
                return out;
            },
            0, b));
        double kernel = 0.0, control = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const double beta = rng.uniform(-1, 1);
            const auto bump = bump_function(rng, m.dim, b);
            const auto W = VectorFieldAlongCurve::from_function(
                [=](const Jet& t) {
                    auto out = bump(t);
                    for (std::size_t i = 0; i < out.size(); ++i) out[i] += (t / b) * beta * Vb(i);
                    return out;
                },
                0, b);
            kernel = std::max(kernel, std::abs(index_form(m, curve, P, Q, V, W)));
            control = std::max(control, std::abs(index_form(m, curve, P, Q, perturbed, W)));
        }
        out.bump(kernel);
        weakest_control = std::min(weakest_control, control);
    });
    if (out.ok && !(weakest_control > 1e-3)) {
        out.ok = false;
        out.note = "perturbed field stayed in the kernel: max |I| = " + std::to_string(weakest_control);
    }
    return out;
}

// ---------------------------------------------------------------- submanifold

struct Setup {
    SubmanifoldPatch patch;
    Vec u;
    Vec N;
};

Setup random_setup(const MetricDefinition& m, Rng& rng)
{
    const auto [x, v] = sample_tangent(m, rng);
    const int n = m.dim;
    const int kind = rng.index(n == 2 ? 4 : 2);
    const Vec d = random_transverse(rng, v).normalized();
    Vec u = Vec::Zero(1);
    std::optional<SubmanifoldPatch> P;
    if (kind == 0) {
        P = SubmanifoldPatch::line(x, d);
    } else if (kind == 1) {
        P = SubmanifoldPatch::parabola(x, d, rng.vector(n, -1, 1));
    } else if (kind == 2) {
        const double rho = rng.uniform(0.3, 1.5), th = rng.uniform(0, 2 * M_PI);
        Vec dir(2);
        dir << std::cos(th), std::sin(th);
        P = SubmanifoldPatch::circle(x - rho * dir, rho);
        u(0) = th;
    } else {
        const double c1 = rng.uniform(-1, 1), c2 = rng.uniform(-1, 1), c3 = rng.uniform(-1, 1);
        const double y0 = x(1) - c1 * x(0) - c2 * x(0) * x(0) - c3 * std::pow(x(0), 3);
        P = SubmanifoldPatch::graph({y0, c1, c2, c3});
        u(0) = x(0);
    }
    const Vec N = find_normal(m, *P, u, v);
    split_tan_nor(m, *P, u, N, N);
    return {*P, u, N};
}

template <typename F>
Outcome over_setups(const MetricDefinition& m, Rng& rng, int count, F&& per_setup)
{
    Outcome out;
    collect(out, count, [&] {
        const Setup st = random_setup(m, rng);
        const Mat E = st.patch.tangent(st.u);
        const Vec U = E * rng.vector(st.patch.rank(), -1, 1), W = E * rng.vector(st.patch.rank(), -1, 1);
        out.bump(per_setup(st, U, W));
    });
    return out;
}

Outcome submanifold_duality(const MetricDefinition& m, Rng& rng)
{
    return over_setups(m, rng, 20, [&](const Setup& st, const Vec& U, const Vec& W) {
        const Mat g = fundamental_tensor(m, st.patch.position(st.u), st.N);
        const Vec S = second_fundamental_form(m, st.patch, st.u, st.N, U, W);
        const Vec St = normal_second_fundamental_form(m, st.patch, st.u, st.N, U);
        return std::abs(S.dot(g * st.N) + St.dot(g * W));
    });
}

Outcome submanifold_symmetry(const MetricDefinition& m, Rng& rng)
{
    return over_setups(m, rng, 20, [&](const Setup& st, const Vec& U, const Vec& W) {
        return (second_fundamental_form(m, st.patch, st.u, st.N, U, W) -
                second_fundamental_form(m, st.patch, st.u, st.N, W, U))
            .norm();
    });
}

Outcome submanifold_homogeneity(const MetricDefinition& m, Rng& rng)
{
    return over_setups(m, rng, 20, [&](const Setup& st, const Vec& U, const Vec& W) {
        const Vec S = second_fundamental_form(m, st.patch, st.u, st.N, U, W);
        const Vec St = normal_second_fundamental_form(m, st.patch, st.u, st.N, U);
        return std::max((second_fundamental_form(m, st.patch, st.u, 2.0 * st.N, U, W) - S).norm(),
                        (normal_second_fundamental_form(m, st.patch, st.u, 2.0 * st.N, U) - 2.0 * St).norm());
    });
}

Outcome submanifold_riemannian(const MetricDefinition& m, Rng& rng)
{
    if (!m.quadratic || !m.levi_civita) return not_applicable("no Levi-Civita reference");
    return over_setups(m, rng, 20, [&](const Setup& st, const Vec& U, const Vec& W) {
        const Vec x = st.patch.position(st.u);
        const Vec a = st.patch.coefficients(st.u, U), c = st.patch.coefficients(st.u, W);
        const auto H = st.patch.hessian(st.u);
        const int r = st.patch.rank();
        Vec ddx = Vec::Zero(m.dim);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) ddx += a(i) * c(j) * H[i * r + j];
        const Vec classical = split_tan_nor(m, st.patch, st.u, st.N, ddx + m.levi_civita(x).contract(U, W)).nor;
        return (second_fundamental_form(m, st.patch, st.u, st.N, U, W) - classical).norm();
    });
}

// ---------------------------------------------------------------- jacobi

Outcome jacobi_variation_oracle(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 10, [&] {
        const auto [p, v0] = sample_tangent(m, rng);
        const Vec v = scaled_velocity(m, p, v0, 0.6);
        const Vec w = rng.vector(m.dim, -1, 1);
        const double h = 2e-4;
        IntegratorOptions grid;
        grid.method = Integrator::rk4;
        grid.fixed_step = 1e-3;
        const auto geo = integrate_geodesic(m, p, v, 0, 1, grid);
        const auto gp = integrate_geodesic(m, p, v + h * w, 0, 1, grid), gm = integrate_geodesic(m, p, v - h * w, 0, 1, grid);
        const auto gp2 = integrate_geodesic(m, p, v + h / 2 * w, 0, 1, grid);
        const auto gm2 = integrate_geodesic(m, p, v - h / 2 * w, 0, 1, grid);
        const auto J = solve_jacobi(m, geo, Vec::Zero(m.dim), w);
        double worst = 0.0;
        for (double t : {0.5, 1.0}) {
            const CurveJet c = geo.eval(t), cp = gp.eval(t), cm = gm.eval(t), cp2 = gp2.eval(t), cm2 = gm2.eval(t);
            auto rich = [h](const Vec& p1, const Vec& m1, const Vec& p2, const Vec& m2) {
                return (4.0 * (p2 - m2) / h - (p1 - m1) / (2 * h)) / 3.0;
            };
            const Vec Jx = rich(cp.x, cm.x, cp2.x, cm2.x), Jt = rich(cp.dx, cm.dx, cp2.dx, cm2.dx);
            const Vec Jtt = rich(cp.ddx, cm.ddx, cp2.ddx, cm2.ddx);
            const PointGeometry pg(m, c.x, c.dx, 4);
            const Tensor3 G = pg.gamma(), dG = pg.gamma_derivative(c.dx, c.ddx);
            const Vec dJ = Jt + G.contract(Jx, c.dx);
            const Vec ddJ = Jtt + dG.contract(Jx, c.dx) + G.contract(Jt, c.dx) + G.contract(Jx, c.ddx) + G.contract(dJ, c.dx);
            worst = std::max(worst, (ddJ - jacobi_operator_spray(m, c.x, c.dx) * Jx).norm());
            worst = std::max(worst, (Jx - J.value(t)).norm());
            worst = std::max(worst, (dJ - J.derivative(t)).norm());
        }
        out.bump(worst);
    });
    return out;
}

Outcome jacobi_linearity(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const int n = m.dim;
    collect(out, 3, [&] {
        const auto geo = random_geodesic(m, rng, 1.0, 0.8);
        const Vec a0 = rng.vector(n, -1, 1), a1 = rng.vector(n, -1, 1), b0 = rng.vector(n, -1, 1), b1 = rng.vector(n, -1, 1);
        const double alpha = rng.uniform(-3, 3), beta = rng.uniform(-3, 3);
        const auto Ja = solve_jacobi(m, geo, a0, a1), Jb = solve_jacobi(m, geo, b0, b1);
        const auto Jc = solve_jacobi(m, geo, alpha * a0 + beta * b0, alpha * a1 + beta * b1);
        double worst = 0.0;
        for (double t : {0.4, 1.0}) {
            const Vec expect = alpha * Ja.value(t) + beta * Jb.value(t);
            const Vec dexpect = alpha * Ja.derivative(t) + beta * Jb.derivative(t);
            worst = std::max(worst, (Jc.value(t) - expect).norm() / (1 + expect.norm()));
            worst = std::max(worst, (Jc.derivative(t) - dexpect).norm() / (1 + dexpect.norm()));
        }
        out.bump(worst);
    });
    return out;
}

Outcome jacobi_wronskian(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const int n = m.dim;
    collect(out, 3, [&] {
        const auto geo = random_geodesic(m, rng, 1.0, 0.8);
        const auto J1 = solve_jacobi(m, geo, rng.vector(n, -1, 1), rng.vector(n, -1, 1));
        const auto J2 = solve_jacobi(m, geo, rng.vector(n, -1, 1), rng.vector(n, -1, 1));
        out.bump(wronskian(J1, J2).drift);
    });
    return out;
}

Outcome jacobi_conjugate(const MetricDefinition& m, Rng& rng)
{
    if (!m.flag_curvature) return not_applicable("no constant flag curvature");
    const double K = *m.flag_curvature;
    Outcome out;
    collect(out, 3, [&] {
        const auto [x, v0] = sample_tangent(m, rng);
        if (K > 0) {
            if (lagrangian_value(m, x, v0) <= 0) fail(ErrorCode::inadmissible, "needs a spacelike direction");
            const double expected = M_PI / std::sqrt(K);
            const auto geo = integrate_geodesic(m, x, scaled_velocity(m, x, v0, 1.0), 0, expected + 0.3);
            const auto cs = conjugate_points(m, geo);
            out.bump(cs.size() == 1 ? std::abs(cs[0].t - expected) : kInf);
        } else {
            const auto geo = integrate_geodesic(m, x, scaled_velocity(m, x, v0, 0.6), 0, 2.0);
            out.bump(static_cast<double>(conjugate_points(m, geo).size()));
        }
    });
    return out;
}

Outcome jacobi_focal_kernel(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    const int n = m.dim;
    collect(out, 2, [&] {
        const auto [x, v0] = sample_tangent(m, rng);
        const Vec v = scaled_velocity(m, x, v0, 0.6);
        const Vec d = annihilated_by(rng, fundamental_tensor(m, x, v) * v);
        // S~(d) = -2 d: in flat charts the focal instant is t = 1/2
        const auto P = bent_patch(m, x, d, v, -2.0);
        const auto probe = integrate_geodesic(m, x, v, 0, 1.5);
        const auto fp = focal_points(m, probe, P);
        if (fp.empty()) fail(ErrorCode::invalid_argument, "no focal instant in span");
        const double ts = fp.front().t;
        const auto geo = integrate_geodesic(m, x, v, 0, ts);
        const auto basis = p_jacobi_basis(m, geo, P);
        Mat Jt(n, n);
        for (int i = 0; i < n; ++i) Jt.col(i) = basis[i].value(ts);
        Eigen::JacobiSVD<Mat> svd(Jt, Eigen::ComputeFullV);
        const Vec c = svd.matrixV().col(n - 1);
        VectorFieldAlongCurve V = basis[0].as_field().scaled([s = c(0)](const Jet&) { return Jet(s); });
        for (int i = 1; i < n; ++i) V = V.plus(basis[i].as_field().scaled([s = c(i)](const Jet&) { return Jet(s); }));
        const auto Q = SubmanifoldPatch::point(geo.position(ts));
        const auto curve = geo.curve();
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const Vec r = rng.vector(n, -1, 1);
            const double alpha = rng.uniform(-1, 1);
            const auto W = VectorFieldAlongCurve::from_function(
                [=](const Jet& t) {
                    std::vector<Jet> out;
                    for (int i = 0; i < n; ++i) out.push_back((1.0 - t / ts) * alpha * d(i) + r(i) * sin(M_PI * t / ts));
                    return out;
                },
                0, ts);
            worst = std::max(worst, std::abs(index_form(m, curve, P, Q, V, W)));
        }
        out.bump(worst);
    });
    return out;
}

// ---------------------------------------------------------------- cli

std::string number_list(const Vec& v)
{
    std::string s = "[";
    char buf[40];
    for (int i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", v(i));
        s += (i ? "," : "") + std::string(buf);
    }
    return s + "]";
}

Outcome cli_determinism(const MetricDefinition& m, Rng& rng)
{
    Outcome out;
    collect(out, 2, [&] {
        const auto [x, v0] = sample_tangent(m, rng);
        const Vec v = scaled_velocity(m, x, v0, 0.5);
        const std::string head = "{\"metric\":\"" + m.id + "\",\"x0\":" + number_list(x) + ",\"v0\":" + number_list(v);
        const std::vector<std::string> docs{
            head + ",\"task\":\"geodesic\",\"span\":[0,1],\"samples\":21}",
            head + ",\"task\":\"flagcurv\",\"samples\":5,\"seed\":" + std::to_string(rng.next() >> 16) + "}",
        };
        double mismatch = 0.0;
        for (const auto& doc : docs) {
            const auto a = run_scenario(doc), b = run_scenario(doc);
            if (a.exit_code == 1 || b.exit_code == 1) fail(ErrorCode::schema, a.error);
            if (a.exit_code != b.exit_code || a.output != b.output || a.error != b.error) mismatch = 1.0;
        }
        out.bump(mismatch);
    });
    return out;
}

// ---------------------------------------------------------------- registry

using MetricCheck = std::function<Outcome(const MetricDefinition&, Rng&, const ValidationOptions&)>;

struct CheckSpec {
    std::string name;
    double tolerance;
    MetricCheck per_metric; // empty for checks that do not depend on the metric
};

std::vector<CheckSpec> registry()
{
    auto wrap = [](Outcome (*f)(const MetricDefinition&, Rng&)) -> MetricCheck {
        return [f](const MetricDefinition& m, Rng& rng, const ValidationOptions&) { return f(m, rng); };
    };
    auto identity = [](const char* key) -> MetricCheck {
        return [key](const MetricDefinition& m, Rng& rng, const ValidationOptions& o) {
            return metric_identity(m, rng, o.samples, key);
        };
    };
    return {
        {"jets.polynomial_exact", 1e-12, {}},
        {"jets.fd_agreement", 1e-6, wrap(jets_fd_agreement)},
        {"metric.g_homogeneity", 1e-9, identity("g_homogeneity")},
        {"metric.g_vv_equals_L", 1e-9, identity("g_vv_equals_L")},
        {"metric.cartan_homogeneity", 1e-9, identity("cartan_homogeneity")},
        {"metric.cartan_v_contraction", 1e-9, identity("cartan_v_contraction")},
        {"metric.cartan_symmetry", 1e-12, identity("cartan_symmetry")},
        {"connection.torsion_free", 0.0, wrap(connection_torsion)},
        {"connection.gamma_homogeneity", 1e-9, wrap(connection_homogeneity)},
        {"connection.levi_civita_reduction", 1e-9, wrap(connection_levi_civita)},
        {"connection.spray_consistency", 1e-9, wrap(connection_spray)},
        {"connection.almost_g_compatibility", 1e-7, wrap(connection_almost_compat)},
        {"geodesic.energy_conservation", 1e-8, wrap(geodesic_energy)},
        {"geodesic.flow_homogeneity", 1e-8, wrap(geodesic_flow_homogeneity)},
        {"geodesic.transport_preserves_products", 1e-7, wrap(geodesic_transport_products)},
        {"geodesic.velocity_is_parallel", 1e-8, wrap(geodesic_fixed_point)},
        {"curvature.route_agreement", 1e-6, wrap(curvature_routes)},
        {"curvature.variation_independence", 1e-6, wrap(curvature_independence)},
        {"curvature.tensoriality", 1e-6, wrap(curvature_tensoriality)},
        {"curvature.velocity_annihilates", 1e-9, wrap(curvature_velocity)},
        {"curvature.riemannian_flag_reduction", 1e-6, wrap(curvature_riemannian_flag)},
        {"variation.first_variation_fd", 1e-6, wrap(variation_first)},
        {"variation.second_variation_fd", 1e-5, wrap(variation_second)},
        {"variation.geodesic_criticality", 1e-8, wrap(variation_criticality)},
        {"variation.index_symmetry", 1e-7, wrap(variation_index_symmetry)},
        {"variation.index_kernel", 1e-6, wrap(variation_index_kernel)},
        {"submanifold.duality", 1e-7, wrap(submanifold_duality)},
        {"submanifold.sff_symmetry", 1e-7, wrap(submanifold_symmetry)},
        {"submanifold.homogeneity", 1e-7, wrap(submanifold_homogeneity)},
        {"submanifold.riemannian_reduction", 1e-7, wrap(submanifold_riemannian)},
        {"jacobi.geodesic_variation_oracle", 1e-5, wrap(jacobi_variation_oracle)},
        {"jacobi.linearity", 1e-9, wrap(jacobi_linearity)},
        {"jacobi.wronskian_drift", 1e-7, wrap(jacobi_wronskian)},
        {"jacobi.conjugate_closed_form", 1e-6, wrap(jacobi_conjugate)},
        {"jacobi.focal_kernel", 1e-5, wrap(jacobi_focal_kernel)},
        {"cli.determinism", 0.0, wrap(cli_determinism)},
        {"cli.coverage", 0.0, {}},
    };
}

std::uint64_t mix(std::uint64_t seed, const std::string& a, const std::string& b)
{
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (const std::string* s : {&a, &b}) {
        for (unsigned char ch : *s) h = (h ^ ch) * 1099511628211ull;
        h = (h ^ 0xff) * 1099511628211ull;
    }
    return h;
}

Outcome guarded(const std::function<Outcome()>& run)
{
    try {
        return run();
    } catch (const Error& e) {
        Outcome o;
        o.residual = kInf;
        o.ok = false;
        o.note = std::string(error_code_name(e.code())) + ": " + e.what();
        return o;
    } catch (const std::exception& e) {
        Outcome o;
        o.residual = kInf;
        o.ok = false;
        o.note = e.what();
        return o;
    }
}

} // namespace

const std::vector<std::string>& validation_check_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& c : registry()) out.push_back(c.name);
        return out;
    }();
    return names;
}

int worker_threads(int requested, int tasks)
{
    int cap = requested;
    if (cap <= 0) {
        if (const char* env = std::getenv("FINSLER_LAB_THREADS")) cap = std::atoi(env);
    }
    if (cap <= 0) cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return std::max(1, std::min(cap, tasks));
}

ValidationReport validate(const std::vector<MetricPtr>& metrics, const ValidationOptions& opts)
{
    auto checks = registry();
    if (!opts.only.empty()) {
        for (const auto& name : opts.only)
            if (std::none_of(checks.begin(), checks.end(), [&](const auto& c) { return c.name == name; }))
                fail(ErrorCode::invalid_argument, "unknown validation check '" + name + "'");
        std::erase_if(checks, [&](const auto& c) {
            return std::find(opts.only.begin(), opts.only.end(), c.name) == opts.only.end();
        });
    }
    const int nm = static_cast<int>(metrics.size()), nc = static_cast<int>(checks.size());
    std::vector<std::vector<Outcome>> results(nm, std::vector<Outcome>(nc));

    // one task per metric; every check draws from its own seeded stream
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k; (k = next++) < nm;) {
            const MetricDefinition& m = *metrics[k];
            for (int c = 0; c < nc; ++c) {
                if (!checks[c].per_metric) continue;
                Rng rng(mix(opts.seed, m.id, checks[c].name));
                results[k][c] = guarded([&] { return checks[c].per_metric(m, rng, opts); });
            }
        }
    };
    const int threads = worker_threads(opts.threads, nm);
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ValidationReport report;
    for (const auto& m : metrics) report.metrics.push_back(m->id);
    for (int c = 0; c < nc; ++c) {
        CheckResult r;
        r.name = checks[c].name;
        r.tolerance = checks[c].tolerance;
        std::vector<std::pair<std::string, Outcome>> parts;
        if (checks[c].per_metric) {
            for (int k = 0; k < nm; ++k) parts.emplace_back(metrics[k]->id, results[k][c]);
        } else if (r.name == "jets.polynomial_exact") {
            Rng rng(mix(opts.seed, "", r.name));
            parts.emplace_back("", guarded([&] { return jets_polynomial_exact(rng); }));
        } else if (r.name == "cli.coverage") {
            Outcome o;
            auto names = validation_check_names();
            std::sort(names.begin(), names.end());
            const auto dup = std::adjacent_find(names.begin(), names.end());
            o.residual = dup == names.end() ? 0.0 : 1.0;
            o.residual += static_cast<double>(names.size() != registry().size());
            o.samples = static_cast<int>(names.size());
            parts.emplace_back("", o);
        }
        bool any = false;
        for (const auto& [id, o] : parts) {
            if (!o.applicable) continue;
            any = true;
            r.samples += o.samples;
            const bool ok = o.ok && o.residual <= r.tolerance;
            if (o.residual > r.residual || r.worst_metric.empty()) {
                r.residual = std::max(r.residual, o.residual);
                r.worst_metric = id;
            }
            if (!ok) {
                r.pass = false;
                const std::string why = o.note.empty() ? "residual above tolerance" : o.note;
                r.note += (r.note.empty() ? "" : "; ") + (id.empty() ? why : id + ": " + why);
            }
        }
        if (!any) {
            r.applicable = false;
            r.note = "not applicable to the requested metrics";
        }
        report.pass = report.pass && r.pass;
        report.checks.push_back(std::move(r));
    }
    return report;
}

ValidationReport validate(const std::vector<std::string>& metric_ids, const ValidationOptions& opts)
{
    std::vector<MetricPtr> metrics;
    for (const auto& id : metric_ids) metrics.push_back(catalog::by_id(id));
    return validate(metrics, opts);
}

} // namespace finsler
