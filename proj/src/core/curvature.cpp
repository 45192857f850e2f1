#include "finsler/curvature.hpp"

#include "algebra.hpp"

namespace finsler {

namespace {

std::vector<double> seed_of(const Vec& dx, const Vec& dv)
{
    const int n = static_cast<int>(dx.size());
    std::vector<double> s(2 * n);
    for (int i = 0; i < n; ++i) s[i] = dx(i), s[n + i] = dv(i);
    return s;
}

// Gamma(Y, X)^k = Y^i X^j Gamma^k_ij over jets (flat index (k*n+i)*n+j).
std::vector<Jet> contract(const std::vector<Jet>& gamma, const std::vector<Jet>& Y, const std::vector<Jet>& X, int n)
{
    std::vector<Jet> out(n, Jet(0.0));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[k] += gamma[(k * n + i) * n + j] * Y[i] * X[j];
    return out;
}

std::vector<Jet> derivative(const std::vector<Jet>& f, int direction)
{
    std::vector<Jet> out;
    for (const auto& c : f) out.push_back(c.partial(direction));
    return out;
}

std::vector<Jet> truncated(const std::vector<Jet>& f, int order)
{
    std::vector<Jet> out;
    for (const auto& c : f) out.push_back(c.embed(c.directions(), order));
    return out;
}

Vec values(const std::vector<Jet>& f)
{
    Vec out(static_cast<int>(f.size()));
    for (int i = 0; i < out.size(); ++i) out(i) = f[i].value();
    return out;
}

Vec firsts(const std::vector<Jet>& f, int direction)
{
    Vec out(static_cast<int>(f.size()));
    for (int i = 0; i < out.size(); ++i) out(i) = f[i].first(direction);
    return out;
}

} // namespace

Mat spray_curvature(const PointGeometry& pg)
{
    const int n = pg.dim();
    const Vec G = pg.G();
    const Vec& v = pg.v();
    Mat N(n, n), dGx(n, n), vxv(n, n), Gvv(n, n);
    for (int k = 0; k < n; ++k) {
        std::vector<std::vector<double>> seeds{seed_of(v, Vec::Zero(n)), seed_of(Vec::Zero(n), G),
                                               seed_of(Vec::Zero(n), Vec::Unit(n, k)), seed_of(Vec::Unit(n, k), Vec::Zero(n))};
        const auto jet = pg.spray_jet(seeds, 2);
        for (int i = 0; i < n; ++i) {
            N(i, k) = jet[i].first(2);
            dGx(i, k) = jet[i].first(3);
            vxv(i, k) = jet[i].mixed(0, 2);
            Gvv(i, k) = jet[i].mixed(1, 2);
        }
    }
    return 2.0 * dGx - vxv + 2.0 * Gvv - N * N;
}

Mat spray_curvature(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_admissible(m, x, v);
    return spray_curvature(PointGeometry(m, x, v, 4));
}

Mat jacobi_operator_spray(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    return -spray_curvature(m, x, v);
}

Vec curvature_of_variation(const MetricDefinition& m, const SurfaceFunction& Lambda, const SurfaceFunction& Z, double t)
{
    const int n = m.dim;
    // directions: 0 = t, 1 = s
    const Jet tj = Jet::variable(t, 0, 2, 2), sj = Jet::variable(0.0, 1, 2, 2);
    auto lam = Lambda(tj, sj);
    auto z = Z(tj, sj);
    for (auto& c : lam) c = c.embed(2, 2);
    for (auto& c : z) c = c.embed(2, 2);
    if (static_cast<int>(lam.size()) != n || static_cast<int>(z.size()) != n)
        fail(ErrorCode::invalid_argument, "variation dimension mismatch");
    const auto lam_t = derivative(lam, 0), lam_s = derivative(lam, 1); // order 1
    const Vec x = values(lam), vt = values(lam_t);
    if (!is_admissible(m, x, vt)) fail(ErrorCode::inadmissible, "variation is not admissible", t);

    // Gamma(Lambda, Lambda_t) as an order-1 jet in (t, s)
    const PointGeometry pg(m, x, vt, 4);
    const std::vector<std::vector<double>> seeds{seed_of(values(lam_t), firsts(lam_t, 0)),
                                                 seed_of(values(lam_s), firsts(lam_t, 1))};
    const auto N = pg.nonlinear_jet(seeds);
    const detail::JetTable table(pg.table(), pg.v(), seeds, 1);
    const auto gamma = detail::christoffel<Jet>(table, N);
    std::vector<Jet> gamma0;
    for (const auto& c : gamma) gamma0.push_back(Jet(c.value()));

    const auto z1 = truncated(z, 1);
    // D_s Z and D_t Z as order-1 jets, then one more covariant derivative
    std::vector<Jet> Ds = derivative(z, 1), Dt = derivative(z, 0);
    const auto gs = contract(gamma, z1, lam_s, n), gt = contract(gamma, z1, lam_t, n);
    for (int i = 0; i < n; ++i) Ds[i] += gs[i], Dt[i] += gt[i];
    const auto DtDs_corr = contract(gamma0, std::vector<Jet>(Ds), lam_t, n);
    const auto DsDt_corr = contract(gamma0, std::vector<Jet>(Dt), lam_s, n);
    Vec out(n);
    for (int i = 0; i < n; ++i) {
        const double DtDs = Ds[i].first(0) + DtDs_corr[i].value();
        const double DsDt = Dt[i].first(1) + DsDt_corr[i].value();
        out(i) = DtDs - DsDt;
    }
    return out;
}

Vec jacobi_operator_variational(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& W,
                                const VectorFieldAlongCurve& Z, double t, VariationKind kind, Side side)
{
    // local Taylor data are all that enter at s = 0
    const CurveJet c = curve.eval(t, side);
    const FieldJet w = W.eval(t, side), z = Z.eval(t, side);
    const int n = m.dim;
    const SurfaceFunction Lambda = [&](const Jet& tt, const Jet& s) {
        const Jet tau = tt - t;
        std::vector<Jet> out;
        for (int i = 0; i < n; ++i) {
            const Jet Wi = w.value(i) + w.deriv(i) * tau;
            Jet xi = c.x(i) + c.dx(i) * tau + 0.5 * c.ddx(i) * tau * tau + s * Wi;
            if (kind == VariationKind::quadratic) xi += s * s * Wi;
            out.push_back(xi);
        }
        return out;
    };
    const SurfaceFunction Zext = [&](const Jet& tt, const Jet&) {
        const Jet tau = tt - t;
        std::vector<Jet> out;
        for (int i = 0; i < n; ++i) out.push_back(z.value(i) + z.deriv(i) * tau);
        return out;
    };
    return curvature_of_variation(m, Lambda, Zext, t);
}

double flag_denominator(const Mat& g, double L, const Vec& v, const Vec& w)
{
    const double den = L * w.dot(g * w) - std::pow(v.dot(g * w), 2);
    const double scale = std::pow(g.norm() * v.norm() * w.norm(), 2);
    if (!(std::abs(den) >= 1e-12 * scale)) fail(ErrorCode::degenerate_flag, "flag denominator vanishes");
    return den;
}

double flag_curvature(const MetricDefinition& m, const Vec& x, const Vec& v, const Vec& w)
{
    require_admissible(m, x, v);
    const PointGeometry pg(m, x, v, 4);
    const Mat g = pg.g();
    const double den = flag_denominator(g, pg.L(), v, w);
    return (spray_curvature(pg) * w).dot(g * w) / den;
}

double flag_curvature_variational(const MetricDefinition& m, const Vec& x, const Vec& v, const Vec& w)
{
    require_admissible(m, x, v);
    const PointGeometry pg(m, x, v, 2);
    const Mat g = pg.g();
    const double den = flag_denominator(g, pg.L(), v, w);
    const Vec acc = -2.0 * pg.G();
    const int n = m.dim;
    // geodesic through (x, v) to second order, W = Z = w constant
    const SurfaceFunction Lambda = [&](const Jet& t, const Jet& s) {
        std::vector<Jet> out;
        for (int i = 0; i < n; ++i) out.push_back(x(i) + v(i) * t + 0.5 * acc(i) * t * t + s * w(i));
        return out;
    };
    const SurfaceFunction Z = [&](const Jet&, const Jet&) {
        std::vector<Jet> out;
        for (int i = 0; i < n; ++i) out.push_back(Jet(w(i)));
        return out;
    };
    return curvature_of_variation(m, Lambda, Z, 0.0).dot(g * v) / den;
}

} // namespace finsler
