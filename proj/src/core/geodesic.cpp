#include "finsler/geodesic.hpp"

#include <cmath>

#include "finsler/connection.hpp"
#include "finsler/quadrature.hpp"

namespace finsler {

namespace {

// Quintic Hermite basis on u in [0,1]; rows: value, first, second derivative in u.
void quintic_basis(double u, double H[3][6])
{
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    const double v[6] = {1 - 10 * u3 + 15 * u4 - 6 * u5, u - 6 * u3 + 8 * u4 - 3 * u5,
                         0.5 * u2 - 1.5 * u3 + 1.5 * u4 - 0.5 * u5, 0.5 * u3 - u4 + 0.5 * u5,
                         -4 * u3 + 7 * u4 - 3 * u5, 10 * u3 - 15 * u4 + 6 * u5};
    const double d[6] = {-30 * u2 + 60 * u3 - 30 * u4, 1 - 18 * u2 + 32 * u3 - 15 * u4,
                         u - 4.5 * u2 + 6 * u3 - 2.5 * u4, 1.5 * u2 - 4 * u3 + 2.5 * u4,
                         -12 * u2 + 28 * u3 - 15 * u4, 30 * u2 - 60 * u3 + 30 * u4};
    const double dd[6] = {-60 * u + 180 * u2 - 120 * u3, -36 * u + 96 * u2 - 60 * u3,
                          1 - 9 * u + 18 * u2 - 10 * u3, 3 * u - 12 * u2 + 10 * u3,
                          -24 * u + 84 * u2 - 60 * u3, 60 * u - 180 * u2 + 120 * u3};
    for (int k = 0; k < 6; ++k) H[0][k] = v[k], H[1][k] = d[k], H[2][k] = dd[k];
}

} // namespace

bool admissible_state(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    return x.allFinite() && v.allFinite() && m.chart_domain(x) && is_admissible(m, x, v);
}

GeodesicRecord::GeodesicRecord(std::shared_ptr<const OdeSolution> solution, double a, double b)
    : solution_(std::move(solution)), a_(a), b_(b)
{}

CurveJet GeodesicRecord::eval(double t) const
{
    const OdeSolution& s = *solution_;
    const int n = dim();
    if (s.t.size() == 1) {
        return {s.y[0].head(n), s.y[0].tail(n), s.f[0].tail(n)};
    }
    const double tol = 1e-12 * std::max({1.0, std::abs(a_), std::abs(b_)});
    if (t < std::min(a_, b_) - tol || t > std::max(a_, b_) + tol)
        fail(ErrorCode::invalid_argument, "instant outside the geodesic interval", t);
    const int i = s.interval(t);
    const double h = s.t[i + 1] - s.t[i];
    const double u = (t - s.t[i]) / h;
    double H[3][6];
    quintic_basis(u, H);
    const Vec p0 = s.y[i].head(n), d0 = s.y[i].tail(n), a0 = s.f[i].tail(n);
    const Vec p1 = s.y[i + 1].head(n), d1 = s.y[i + 1].tail(n), a1 = s.f[i + 1].tail(n);
    CurveJet out;
    Vec* slots[3] = {&out.x, &out.dx, &out.ddx};
    const double scale[3] = {1.0, 1.0 / h, 1.0 / (h * h)};
    for (int r = 0; r < 3; ++r) {
        const double* c = H[r];
        *slots[r] = scale[r] * (c[0] * p0 + h * c[1] * d0 + h * h * c[2] * a0 + h * h * c[3] * a1 + h * c[4] * d1 + c[5] * p1);
    }
    return out;
}

PiecewiseCurve GeodesicRecord::curve() const
{
    const GeodesicRecord self = *this;
    return PiecewiseCurve::smooth(std::min(a_, b_), std::max(a_, b_), [self](double t) { return self.eval(t); });
}

GeodesicRecord integrate_geodesic(const MetricDefinition& m, const Vec& x0, const Vec& v0, double a, double b,
                                  const IntegratorOptions& opts)
{
    require_admissible(m, x0, v0);
    const int n = m.dim;
    const OdeRhs rhs = [&m, n](double, const Vec& y) {
        Vec f(2 * n);
        f.head(n) = y.tail(n);
        f.tail(n) = -2.0 * spray_unchecked(m, y.head(n), y.tail(n));
        return f;
    };
    const OdeGuard guard = [&m, n](double, const Vec& y) { return admissible_state(m, y.head(n), y.tail(n)); };
    Vec y0(2 * n);
    y0 << x0, v0;
    auto sol = std::make_shared<OdeSolution>(integrate(rhs, a, y0, b, opts, guard));
    GeodesicRecord rec(sol, a, b);
    rec.L0 = lagrangian_value(m, x0, v0);
    for (std::size_t k = 0; k < sol->t.size(); ++k) {
        rec.drift = std::max(rec.drift, std::abs(lagrangian_value(m, sol->y[k].head(n), sol->y[k].tail(n)) - rec.L0));
        if (k + 1 < sol->t.size()) {
            const double mid = 0.5 * (sol->t[k] + sol->t[k + 1]);
            const CurveJet c = rec.eval(mid);
            rec.drift = std::max(rec.drift, std::abs(lagrangian_value(m, c.x, c.dx) - rec.L0));
        }
    }
    if (a != b) {
        const double lo = std::min(a, b), hi = std::max(a, b);
        rec.energy = 0.5 * integrate_adaptive(
                               [&](double t) {
                                   const CurveJet c = rec.eval(t);
                                   return lagrangian_value(m, c.x, c.dx);
                               },
                               {lo, hi}, opts.rtol);
    }
    return rec;
}

Vec exponential_map(const MetricDefinition& m, const Vec& p, const Vec& v, const IntegratorOptions& opts)
{
    try {
        return integrate_geodesic(m, p, v, 0.0, 1.0, opts).position(1.0);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::domain_exit)
            fail(ErrorCode::not_in_exp_domain, std::string("geodesic does not reach t = 1: ") + e.what(), e.at_t());
        throw;
    }
}

VectorFieldAlongCurve parallel_transport(const MetricDefinition& m, const PiecewiseCurve& curve, const Vec& w0,
                                         const IntegratorOptions& opts)
{
    const int n = m.dim;
    if (w0.size() != n) fail(ErrorCode::invalid_argument, "initial vector dimension mismatch");
    std::vector<VectorFieldAlongCurve::Segment> segments;
    Vec w = w0;
    const auto& knots = curve.knots();
    for (int k = 0; k < curve.segment_count(); ++k) {
        for (double t : {knots[k], knots[k + 1]}) {
            const CurveJet c = curve.eval_segment(k, t);
            if (!admissible_state(m, c.x, c.dx))
                fail(ErrorCode::inadmissible, "curve velocity is not admissible", t);
        }
        auto rhs = std::make_shared<OdeRhs>([&m, curve, k](double t, const Vec& X) {
            const CurveJet c = curve.eval_segment(k, t);
            return Vec(-PointGeometry(m, c.x, c.dx, 3).gamma().contract(X, c.dx));
        });
        const OdeGuard guard = [&m, curve, k](double t, const Vec&) {
            const CurveJet c = curve.eval_segment(k, t);
            return admissible_state(m, c.x, c.dx);
        };
        auto sol = std::make_shared<OdeSolution>(integrate(*rhs, knots[k], w, knots[k + 1], opts, guard));
        w = sol->y.back();
        segments.push_back([sol, rhs](double t) {
            const Vec X = sol->eval(t);
            return FieldJet{X, (*rhs)(t, X)};
        });
    }
    return VectorFieldAlongCurve(knots, std::move(segments));
}

} // namespace finsler
