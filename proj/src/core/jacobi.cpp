#include "finsler/jacobi.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "finsler/connection.hpp"
#include "finsler/curvature.hpp"
#include "finsler/variation.hpp"

namespace finsler {

namespace {

// state: x, v, E (column-major), Y (column-major), Y'
struct Layout {
    int n, k;
    int x() const { return 0; }
    int v() const { return n; }
    int E() const { return 2 * n; }
    int Y() const { return 2 * n + n * n; }
    int dY() const { return 2 * n + n * n + n * k; }
    int size() const { return 2 * n + n * n + 2 * n * k; }
};

Mat block(const Vec& y, int offset, int rows, int cols)
{
    return Eigen::Map<const Mat>(y.data() + offset, rows, cols);
}

} // namespace

JacobiSet::JacobiSet(const MetricDefinition& m, const GeodesicRecord& geodesic, const Mat& J0, const Mat& dJ0,
                     const IntegratorOptions& opts)
    : metric_(m), n_(m.dim), k_(static_cast<int>(J0.cols())), a_(geodesic.a()), b_(geodesic.b())
{
    if (J0.rows() != n_ || dJ0.rows() != n_ || dJ0.cols() != k_)
        fail(ErrorCode::invalid_argument, "initial data dimension mismatch");
    if (geodesic.dim() != n_) fail(ErrorCode::mismatched_geodesic, "geodesic dimension mismatch");
    const CurveJet c0 = geodesic.eval(a_);
    x0_ = c0.x;
    v0_ = c0.dx;
    const Layout L{n_, k_};
    Vec y0(L.size());
    y0.segment(L.x(), n_) = x0_;
    y0.segment(L.v(), n_) = v0_;
    Eigen::Map<Mat>(y0.data() + L.E(), n_, n_) = Mat::Identity(n_, n_);
    // frame starts at identity, so frame coordinates equal chart components
    Eigen::Map<Mat>(y0.data() + L.Y(), n_, k_) = J0;
    Eigen::Map<Mat>(y0.data() + L.dY(), n_, k_) = dJ0;
    const MetricDefinition* mp = &metric_;
    const int n = n_;
    const OdeRhs rhs = [mp, L, n](double, const Vec& y) {
        const Vec x = y.segment(L.x(), n), v = y.segment(L.v(), n);
        const PointGeometry pg(*mp, x, v, 4);
        const Tensor3 gamma = pg.gamma();
        const Mat E = block(y, L.E(), n, n);
        const Mat A = -spray_curvature(pg);
        Vec f(L.size());
        f.segment(L.x(), n) = v;
        f.segment(L.v(), n) = -2.0 * pg.G();
        Mat dE(n, n);
        for (int c = 0; c < n; ++c) dE.col(c) = -gamma.contract(E.col(c), v);
        Eigen::Map<Mat>(f.data() + L.E(), n, n) = dE;
        const Mat M = E.lu().solve(A * E);
        Eigen::Map<Mat>(f.data() + L.Y(), n, L.k) = block(y, L.dY(), n, L.k);
        Eigen::Map<Mat>(f.data() + L.dY(), n, L.k) = M * block(y, L.Y(), n, L.k);
        return f;
    };
    const OdeGuard guard = [mp, L, n](double, const Vec& y) {
        return admissible_state(*mp, y.segment(L.x(), n), y.segment(L.v(), n));
    };
    sol_ = integrate(rhs, a_, y0, b_, opts, guard);
}

CurveJet JacobiSet::base(double t) const
{
    const Vec y = sol_.eval(t);
    const Vec x = y.segment(0, n_), v = y.segment(n_, n_);
    return {x, v, -2.0 * spray_unchecked(metric_, x, v)};
}

Mat JacobiSet::frame(double t) const
{
    return block(sol_.eval(t), Layout{n_, k_}.E(), n_, n_);
}

Mat JacobiSet::values(double t) const
{
    const Layout L{n_, k_};
    const Vec y = sol_.eval(t);
    return block(y, L.E(), n_, n_) * block(y, L.Y(), n_, k_);
}

Mat JacobiSet::derivatives(double t) const
{
    const Layout L{n_, k_};
    const Vec y = sol_.eval(t);
    return block(y, L.E(), n_, n_) * block(y, L.dY(), n_, k_);
}

VectorFieldAlongCurve JacobiField::as_field() const
{
    auto set = set_;
    const int i = index_;
    return VectorFieldAlongCurve({set->a(), set->b()}, {[set, i](double t) {
                                     const CurveJet c = set->base(t);
                                     const Vec J = set->values(t).col(i), dJ = set->derivatives(t).col(i);
                                     const Tensor3 gamma = PointGeometry(set->metric(), c.x, c.dx, 3).gamma();
                                     return FieldJet{J, dJ - gamma.contract(J, c.dx)};
                                 }});
}

std::shared_ptr<const JacobiSet> solve_jacobi_set(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                                  const Mat& J0, const Mat& dJ0, const IntegratorOptions& opts)
{
    return std::make_shared<const JacobiSet>(m, geodesic, J0, dJ0, opts);
}

JacobiField solve_jacobi(const MetricDefinition& m, const GeodesicRecord& geodesic, const Vec& J0, const Vec& dJ0,
                         const IntegratorOptions& opts)
{
    return JacobiField(solve_jacobi_set(m, geodesic, J0, dJ0, opts), 0);
}

GeodesicRecord as_geodesic(const MetricDefinition& m, const PiecewiseCurve& curve, double tolerance,
                           const IntegratorOptions& opts)
{
    if (curve.segment_count() != 1 || !(geodesic_residual(m, curve) <= tolerance))
        fail(ErrorCode::not_a_geodesic, "curve is not a geodesic");
    const CurveJet c = curve.eval(curve.a());
    return integrate_geodesic(m, c.x, c.dx, curve.a(), curve.b(), opts);
}

std::vector<JacobiField> p_jacobi_basis(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                        const SubmanifoldPatch& P, const IntegratorOptions& opts)
{
    const int n = m.dim, r = P.rank();
    const CurveJet c = geodesic.eval(geodesic.a());
    const Vec u = P.locate(c.x);
    if (!is_normal(m, P, u, c.dx).normal)
        fail(ErrorCode::orthogonality_violation, "geodesic is not orthogonal to the submanifold");
    const Mat g = fundamental_tensor(m, c.x, c.dx);
    const Mat E = P.tangent(u);
    Mat J0 = Mat::Zero(n, n), dJ0 = Mat::Zero(n, n);
    if (r > 0) {
        restricted_gram(g, E);
        for (int a = 0; a < r; ++a) {
            J0.col(a) = E.col(a);
            dJ0.col(a) = normal_second_fundamental_form(m, P, u, c.dx, E.col(a));
        }
        // g-normal complement: kernel of E^T g
        const Eigen::JacobiSVD<Mat> svd(E.transpose() * g, Eigen::ComputeFullV);
        const Mat V = svd.matrixV();
        for (int j = 0; j < n - r; ++j) dJ0.col(r + j) = V.col(r + j);
    } else {
        dJ0 = Mat::Identity(n, n);
    }
    auto set = solve_jacobi_set(m, geodesic, J0, dJ0, opts);
    std::vector<JacobiField> out;
    for (int i = 0; i < n; ++i) out.emplace_back(set, i);
    return out;
}

DeterminantScan scan_determinant(const JacobiSet& set)
{
    if (set.count() != set.dim()) fail(ErrorCode::invalid_argument, "determinant needs n fields");
    const auto& nodes = set.solution().t;
    const double a = set.a(), b = set.b();
    const double dir = b >= a ? 1.0 : -1.0;
    std::vector<double> ts;
    for (std::size_t k = 1; k < nodes.size(); ++k)
        for (int j = 1; j <= 4; ++j) ts.push_back(nodes[k - 1] + (nodes[k] - nodes[k - 1]) * j / 4.0);
    // column scales from the whole span
    Vec scale = Vec::Zero(set.count());
    for (double t : ts) scale = scale.cwiseMax(set.values(t).colwise().norm().transpose());
    for (int i = 0; i < scale.size(); ++i)
        if (scale(i) == 0.0) scale(i) = 1.0;
    const Mat D = scale.cwiseInverse().asDiagonal();
    auto det = [&](double t) { return (set.values(t) * D).determinant(); };
    auto rank_deficiency = [&](double t) {
        const Eigen::JacobiSVD<Mat> svd(set.values(t) * D);
        const Vec s = svd.singularValues();
        int count = 0;
        for (int i = 0; i < s.size(); ++i)
            if (s(i) < 1e-6) ++count;
        return count;
    };

    DeterminantScan out;
    for (double t : ts) {
        out.t.push_back(t);
        out.det.push_back(det(t));
    }
    auto add = [&](double t) {
        const int mult = rank_deficiency(t);
        if (mult == 0) return;
        for (const auto& z : out.zeros)
            if (std::abs(z.t - t) < 1e-6) return;
        out.zeros.push_back({t, mult});
    };
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
        const double d0 = out.det[k], d1 = out.det[k + 1];
        if (d0 == 0.0) {
            add(ts[k]);
            continue;
        }
        if (d0 * d1 < 0.0) {
            double lo = ts[k], hi = ts[k + 1], flo = d0;
            while (std::abs(hi - lo) > 1e-11) {
                const double mid = 0.5 * (lo + hi), fm = det(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if ((fm < 0) == (flo < 0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            add(0.5 * (lo + hi));
        } else if (k > 0 && std::abs(d0) < std::abs(out.det[k - 1]) && std::abs(d0) <= std::abs(d1) &&
                   (out.det[k - 1] * d0 > 0.0)) {
            // touching zero: golden-section on |det|
            double lo = ts[k - 1], hi = ts[k + 1];
            const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
            double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
            while (std::abs(hi - lo) > 1e-11) {
                if (std::abs(det(c)) < std::abs(det(d))) hi = d;
                else lo = c;
                c = hi - gr * (hi - lo);
                d = lo + gr * (hi - lo);
            }
            const double tm = 0.5 * (lo + hi);
            if (std::abs(det(tm)) < 1e-10) add(tm);
        }
    }
    std::sort(out.zeros.begin(), out.zeros.end(),
              [dir](const CriticalInstant& p, const CriticalInstant& q) { return dir * p.t < dir * q.t; });
    return out;
}

std::vector<CriticalInstant> conjugate_points(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                              const IntegratorOptions& opts)
{
    const int n = m.dim;
    const auto set = solve_jacobi_set(m, geodesic, Mat::Zero(n, n), Mat::Identity(n, n), opts);
    return scan_determinant(*set).zeros;
}

std::vector<CriticalInstant> focal_points(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                          const SubmanifoldPatch& P, const IntegratorOptions& opts)
{
    const auto basis = p_jacobi_basis(m, geodesic, P, opts);
    return scan_determinant(basis.front().set()).zeros;
}

WronskianReport wronskian(const JacobiField& J1, const JacobiField& J2, int samples)
{
    const JacobiSet &s1 = J1.set(), &s2 = J2.set();
    if (&s1 != &s2) {
        const double tol = 1e-12;
        if (s1.dim() != s2.dim() || std::abs(s1.a() - s2.a()) > tol || std::abs(s1.b() - s2.b()) > tol ||
            (s1.x0() - s2.x0()).norm() > tol || (s1.v0() - s2.v0()).norm() > tol || s1.metric().id != s2.metric().id)
            fail(ErrorCode::mismatched_geodesic, "Jacobi fields live on different geodesics");
    }
    WronskianReport out;
    for (int k = 0; k <= samples; ++k) {
        const double t = s1.a() + (s1.b() - s1.a()) * k / samples;
        const CurveJet c = s1.base(t);
        const Mat g = fundamental_tensor_unchecked(s1.metric(), c.x, c.dx);
        const double w = J1.value(t).dot(g * J2.derivative(t)) - J1.derivative(t).dot(g * J2.value(t));
        out.t.push_back(t);
        out.value.push_back(w);
        out.drift = std::max(out.drift, std::abs(w - out.value.front()));
    }
    return out;
}

Vec dexp(const MetricDefinition& m, const Vec& p, const Vec& v, const Vec& w, const IntegratorOptions& opts)
{
    GeodesicRecord geo;
    try {
        geo = integrate_geodesic(m, p, v, 0.0, 1.0, opts);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::domain_exit)
            fail(ErrorCode::not_in_exp_domain, std::string("geodesic does not reach t = 1: ") + e.what(), e.at_t());
        throw;
    }
    return solve_jacobi(m, geo, Vec::Zero(m.dim), w, opts).value(1.0);
}

OrthogonalityReport orthogonality_report(const JacobiField& J, int samples)
{
    const JacobiSet& set = J.set();
    const MetricDefinition& m = set.metric();
    const double a = set.a(), b = set.b();
    const double L = lagrangian_value(m, set.x0(), set.v0());
    const Mat g0 = fundamental_tensor(m, set.x0(), set.v0());
    if (std::abs(L) <= 1e-12 * g0.norm() * set.v0().squaredNorm())
        fail(ErrorCode::null_geodesic, "tangent/normal splitting needs a nonnull geodesic");

    auto h = [&](double t) {
        const CurveJet c = set.base(t);
        return J.value(t).dot(fundamental_tensor_unchecked(m, c.x, c.dx) * c.dx);
    };
    OrthogonalityReport rep;
    const double ha = h(a), hb = h(b);
    for (int k = 0; k <= samples; ++k) {
        const double t = a + (b - a) * k / samples;
        const CurveJet c = set.base(t);
        const Mat g = fundamental_tensor_unchecked(m, c.x, c.dx);
        const Mat A = jacobi_operator_spray(m, c.x, c.dx);
        const Vec Jt = J.value(t), dJ = J.derivative(t);
        const double ht = Jt.dot(g * c.dx);
        rep.affine_deviation = std::max(rep.affine_deviation, std::abs(ht - (ha + (hb - ha) * (t - a) / (b - a))));

        const Vec tan = (ht / L) * c.dx, nor = Jt - tan;
        const Vec AJ = A * Jt;
        const Vec tan_dd = (AJ.dot(g * c.dx) / L) * c.dx;
        rep.tan_residual = std::max(rep.tan_residual, (tan_dd - A * tan).norm());
        rep.nor_residual = std::max(rep.nor_residual, ((AJ - tan_dd) - A * nor).norm());

        // (tan J)' from the chart derivative of g(gammadot, J); J moves with E' = -Gamma(E, v)
        const PointGeometry pg(m, c.x, c.dx, 3);
        const Vec Jdot = dJ - pg.gamma().contract(Jt, c.dx);
        const double dh = Jdot.dot(g * c.dx) + Jt.dot(pg.g_derivative(c.dx, c.ddx) * c.dx) + Jt.dot(g * c.ddx);
        rep.commutation_residual =
            std::max(rep.commutation_residual, (std::abs(dh - dJ.dot(g * c.dx)) / std::abs(L)) * c.dx.norm());
    }
    return rep;
}

} // namespace finsler
