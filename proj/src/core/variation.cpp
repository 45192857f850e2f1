#include "finsler/variation.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/connection.hpp"
#include "finsler/curvature.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

void require_admissible_at(const MetricDefinition& m, const CurveJet& c, double t)
{
    if (!is_admissible(m, c.x, c.dx)) fail(ErrorCode::inadmissible, "curve is not admissible", t);
}

std::vector<double> merged_knots(const PiecewiseCurve& curve, const VectorFieldAlongCurve& W)
{
    if (std::abs(W.a() - curve.a()) > 1e-12 * (1.0 + std::abs(curve.a())) ||
        std::abs(W.b() - curve.b()) > 1e-12 * (1.0 + std::abs(curve.b())))
        fail(ErrorCode::invalid_argument, "field and curve have different domains");
    for (std::size_t k = 1; k + 1 < W.knots().size(); ++k)
        if (!curve.is_break(W.knots()[k])) fail(ErrorCode::invalid_argument, "field break is not a break of the curve");
    return curve.knots();
}

Vec acceleration_residual(const MetricDefinition& m, const CurveJet& c)
{
    return c.ddx + 2.0 * spray_unchecked(m, c.x, c.dx);
}

void require_geodesic(const MetricDefinition& m, const PiecewiseCurve& curve, double tolerance)
{
    if (curve.segment_count() != 1) fail(ErrorCode::not_a_geodesic, "geodesic must be smooth");
    if (!(geodesic_residual(m, curve) <= tolerance)) fail(ErrorCode::not_a_geodesic, "curve is not a geodesic");
}

struct Endpoint {
    Vec u;
    Vec x, v;
    Mat g;
};

Endpoint orthogonal_endpoint(const MetricDefinition& m, const SubmanifoldPatch& P, const CurveJet& c)
{
    Endpoint e{P.locate(c.x), c.x, c.dx, fundamental_tensor(m, c.x, c.dx)};
    if (!is_normal(m, P, e.u, c.dx).normal)
        fail(ErrorCode::orthogonality_violation, "geodesic is not orthogonal to the submanifold");
    if (P.rank() > 0) restricted_gram(e.g, P.tangent(e.u));
    return e;
}

} // namespace

double energy(const MetricDefinition& m, const PiecewiseCurve& curve)
{
    for (int s = 0; s < curve.segment_count(); ++s) {
        const double t0 = curve.knots()[s], t1 = curve.knots()[s + 1];
        for (int k = 0; k <= 64; ++k) {
            const double t = t0 + (t1 - t0) * k / 64;
            require_admissible_at(m, curve.eval_segment(s, t), t);
        }
    }
    const auto f = [&](double t) {
        const CurveJet c = curve.eval(t);
        require_admissible_at(m, c, t);
        return lagrangian_value(m, c.x, c.dx);
    };
    return 0.5 * integrate_adaptive(f, curve.knots());
}

Vec legendre(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    return fundamental_tensor(m, x, v) * v;
}

double first_variation(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& W)
{
    const auto knots = merged_knots(curve, W);
    const auto f = [&](double t) {
        const CurveJet c = curve.eval(t);
        require_admissible_at(m, c, t);
        const Mat g = fundamental_tensor(m, c.x, c.dx);
        return -W.eval(t).value.dot(g * acceleration_residual(m, c));
    };
    double out = integrate_adaptive(f, knots);
    const CurveJet ca = curve.eval(curve.a()), cb = curve.eval(curve.b());
    require_admissible_at(m, ca, curve.a());
    require_admissible_at(m, cb, curve.b());
    out += legendre(m, cb.x, cb.dx).dot(W.eval(W.b()).value) - legendre(m, ca.x, ca.dx).dot(W.eval(W.a()).value);
    for (double tb : curve.breaks()) {
        const CurveJet l = curve.eval(tb, Side::left), r = curve.eval(tb, Side::right);
        require_admissible_at(m, l, tb);
        require_admissible_at(m, r, tb);
        out -= (legendre(m, r.x, r.dx) - legendre(m, l.x, l.dx)).dot(W.eval(tb, Side::left).value);
    }
    return out;
}

double geodesic_residual(const MetricDefinition& m, const PiecewiseCurve& curve, int samples)
{
    double worst = 0.0;
    for (int s = 0; s < curve.segment_count(); ++s) {
        const double t0 = curve.knots()[s], t1 = curve.knots()[s + 1];
        for (int k = 0; k <= samples; ++k) {
            const double t = t0 + (t1 - t0) * k / samples;
            const CurveJet c = curve.eval_segment(s, t);
            require_admissible_at(m, c, t);
            worst = std::max(worst, acceleration_residual(m, c).norm());
        }
    }
    return worst;
}

double second_variation(const MetricDefinition& m, const PiecewiseCurve& geodesic, const VectorFieldAlongCurve& W,
                        const std::optional<VectorFieldAlongCurve>& transverse, double geodesic_tolerance)
{
    require_geodesic(m, geodesic, geodesic_tolerance);
    const auto knots = merged_knots(geodesic, W);
    const auto vel = VectorFieldAlongCurve::velocity_of(geodesic);
    const auto f = [&](double t) {
        const CurveJet c = geodesic.eval(t);
        const Mat g = fundamental_tensor(m, c.x, c.dx);
        const Vec R = jacobi_operator_variational(m, geodesic, W, W, t);
        const Vec dW = covariant_derivative(m, geodesic, W, vel, t);
        return -R.dot(g * c.dx) + dW.dot(g * dW);
    };
    double out = integrate_adaptive(f, knots);
    const auto boundary = [&](double t) {
        const CurveJet c = geodesic.eval(t);
        const Vec w = W.eval(t).value;
        const Vec acc = transverse ? transverse->eval(t).value : christoffel(m, c.x, c.dx).contract(w, w);
        return legendre(m, c.x, c.dx).dot(acc);
    };
    out += boundary(geodesic.b()) - boundary(geodesic.a());
    return out;
}

CriticalReport critical_point_test(const MetricDefinition& m, const PiecewiseCurve& curve, const SubmanifoldPatch& P,
                                   const SubmanifoldPatch& Q, int samples, double tolerance)
{
    CriticalReport rep;
    rep.tolerance = tolerance;
    rep.geodesic_residual = geodesic_residual(m, curve, samples);
    for (double tb : curve.breaks()) {
        const CurveJet l = curve.eval(tb, Side::left), r = curve.eval(tb, Side::right);
        rep.legendre_jump = std::max(rep.legendre_jump, (legendre(m, r.x, r.dx) - legendre(m, l.x, l.dx)).norm());
    }
    const auto orth = [&](const SubmanifoldPatch& S, double t) {
        const CurveJet c = curve.eval(t);
        const Vec u = S.locate(c.x);
        const Vec p = legendre(m, c.x, c.dx);
        const Mat E = S.tangent(u);
        double worst = 0.0;
        for (int a = 0; a < S.rank(); ++a) worst = std::max(worst, std::abs(p.dot(E.col(a))));
        return worst;
    };
    rep.orthogonality_a = orth(P, curve.a());
    rep.orthogonality_b = orth(Q, curve.b());
    rep.critical = rep.geodesic_residual <= tolerance && rep.legendre_jump <= tolerance &&
                   rep.orthogonality_a <= tolerance && rep.orthogonality_b <= tolerance;
    return rep;
}

double index_form(const MetricDefinition& m, const PiecewiseCurve& geodesic, const SubmanifoldPatch& P,
                  const SubmanifoldPatch& Q, const VectorFieldAlongCurve& V, const VectorFieldAlongCurve& W,
                  double geodesic_tolerance)
{
    require_geodesic(m, geodesic, geodesic_tolerance);
    const auto knots = merged_knots(geodesic, W);
    merged_knots(geodesic, V);
    const Endpoint ea = orthogonal_endpoint(m, P, geodesic.eval(geodesic.a()));
    const Endpoint eb = orthogonal_endpoint(m, Q, geodesic.eval(geodesic.b()));
    const Vec Va = V.eval(V.a()).value, Wa = W.eval(W.a()).value;
    const Vec Vb = V.eval(V.b()).value, Wb = W.eval(W.b()).value;
    P.coefficients(ea.u, Va), P.coefficients(ea.u, Wa);
    Q.coefficients(eb.u, Vb), Q.coefficients(eb.u, Wb);

    const auto vel = VectorFieldAlongCurve::velocity_of(geodesic);
    const auto f = [&](double t) {
        const CurveJet c = geodesic.eval(t);
        const Mat g = fundamental_tensor(m, c.x, c.dx);
        const Vec R = jacobi_operator_variational(m, geodesic, V, W, t);
        const Vec dV = covariant_derivative(m, geodesic, V, vel, t);
        const Vec dW = covariant_derivative(m, geodesic, W, vel, t);
        return -R.dot(g * c.dx) + dV.dot(g * dW);
    };
    double out = integrate_adaptive(f, knots);
    out += second_fundamental_form(m, Q, eb.u, eb.v, Vb, Wb).dot(eb.g * eb.v);
    out -= second_fundamental_form(m, P, ea.u, ea.v, Va, Wa).dot(ea.g * ea.v);
    return out;
}

} // namespace finsler
