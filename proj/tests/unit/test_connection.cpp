#include <gtest/gtest.h>

#include "finsler/connection.hpp"
#include "support/fixtures.hpp"

using namespace finsler;
using namespace fixture;

namespace {

// Independent Christoffel oracle: finite differences of g and of G.
Tensor3 christoffel_fd(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    const int n = m.dim;
    auto G_at = [&](const Vec& vv) { return spray_unchecked(m, x, vv); };
    Mat N(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            N(i, j) = oracle::derivative([&](double s) { Vec vv = v; vv(j) = s; return G_at(vv)(i); }, v(j), 1e-3);
    auto g_entry = [&](const Vec& xx, const Vec& vv, int a, int b) { return fundamental_tensor_unchecked(m, xx, vv)(a, b); };
    // delta(i)(a,b)
    std::vector<Mat> delta(n, Mat::Zero(n, n));
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = oracle::derivative([&](double s) { Vec xx = x; xx(i) = s; return g_entry(xx, v, a, b); }, x(i), 1e-3);
                for (int q = 0; q < n; ++q)
                    acc -= N(q, i) * oracle::derivative([&](double s) { Vec vv = v; vv(q) = s; return g_entry(x, vv, a, b); }, v(q), 1e-3);
                delta[i](a, b) = acc;
            }
    const Mat ginv = fundamental_tensor_unchecked(m, x, v).inverse();
    Tensor3 out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double acc = 0.0;
                for (int s = 0; s < n; ++s) acc += ginv(k, s) * (delta[i](s, j) + delta[j](s, i) - delta[s](i, j));
                out(k, i, j) = 0.5 * acc;
            }
    return out;
}

double max_diff(const Tensor3& a, const Tensor3& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

} // namespace

TEST(Connection, FlatMetricsHaveZeroSprayAndSymbols)
{
    Rng rng(1);
    for (const auto& m : {catalog::euclidean(), catalog::quartic()}) {
        for (int s = 0; s < 5; ++s) {
            const auto [x, v] = sample_tangent(*m, rng);
            const SprayData sp = spray(*m, x, v);
            EXPECT_LT(sp.G.cwiseAbs().maxCoeff(), 1e-14);
            EXPECT_LT(sp.N.cwiseAbs().maxCoeff(), 1e-14);
            EXPECT_LT(christoffel(*m, x, v).max_abs(), 1e-13);
        }
    }
}

TEST(Connection, SphereValues)
{
    const auto m = catalog::sphere();
    const Vec x = vec({M_PI / 4, 0.2}), v = vec({0, 1});
    // Levi-Civita closed form: G^theta = 1/2 Gamma^theta_phiphi v_phi^2
    const double closed = 0.5 * (-std::sin(M_PI / 4) * std::cos(M_PI / 4));
    EXPECT_NEAR(spray(*m, x, v).G(0), closed, 1e-14);
    EXPECT_NEAR(closed, -0.25, 1e-15);
    const Tensor3 G = christoffel(*m, x, v);
    EXPECT_NEAR(G(0, 1, 1), -0.5, 1e-13);
    EXPECT_NEAR(G(1, 0, 1), 1.0, 1e-13);
    EXPECT_NEAR(G(1, 1, 0), 1.0, 1e-13);
}

TEST(Connection, RandersAgainstFiniteDifferenceOracle)
{
    const auto m = catalog::randers();
    Rng rng(9);
    for (int s = 0; s < 5; ++s) {
        const auto [x, v] = sample_tangent(*m, rng);
        const Tensor3 G = christoffel(*m, x, v);
        for (int k = 0; k < 2; ++k) EXPECT_EQ(G(k, 0, 1), G(k, 1, 0));
        EXPECT_LT(max_diff(G, christoffel(*m, x, 2.0 * v)), 1e-9);
        EXPECT_LT(max_diff(G, christoffel_fd(*m, x, v)), 1e-7);
    }
}

TEST(Connection, CatalogInvariants)
{
    Rng rng(17);
    for (const auto& m : catalog_metrics()) {
        for (int s = 0; s < 50; ++s) {
            const auto [x, v] = sample_tangent(*m, rng);
            const PointGeometry pg(*m, x, v, 3);
            const Tensor3 G = pg.gamma();
            for (int k = 0; k < m->dim; ++k)
                for (int i = 0; i < m->dim; ++i)
                    for (int j = 0; j < m->dim; ++j) ASSERT_EQ(G(k, i, j), G(k, j, i));
            for (double lambda : {0.5, 2.0, 5.0}) EXPECT_LT(max_diff(G, christoffel(*m, x, lambda * v)), 1e-9) << m->id;
            EXPECT_LT((G.contract(v, v) - 2.0 * pg.G()).cwiseAbs().maxCoeff(), 1e-9) << m->id;
            if (m->levi_civita) EXPECT_LT(max_diff(G, m->levi_civita(x)), 1e-9) << m->id;
        }
    }
}

TEST(Connection, GammaDerivativeMatchesFiniteDifferences)
{
    Rng rng(4);
    for (const auto& m : catalog_metrics()) {
        const auto [x, v] = sample_tangent(*m, rng);
        const Vec dx = 0.3 * rng.vector(m->dim, -1, 1), dv = rng.vector(m->dim, -1, 1);
        const Tensor3 jet = PointGeometry(*m, x, v, 4).gamma_derivative(dx, dv);
        const int n = m->dim;
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double fd = oracle::derivative(
                        [&](double s) { return PointGeometry(*m, x + s * dx, v + s * dv, 3).gamma()(k, i, j); }, 0.0, 1e-3);
                    EXPECT_NEAR(jet(k, i, j), fd, 1e-8) << m->id;
                }
    }
}

TEST(Connection, CovariantDerivativeExamples)
{
    const auto e = catalog::euclidean();
    const auto line = PiecewiseCurve::from_function([](const Jet& t) { return std::vector<Jet>{t, 2.0 * t}; }, 0, 2);
    const auto X = VectorFieldAlongCurve::from_function([](const Jet& t) { return std::vector<Jet>{t * t, Jet(1.0)}; }, 0, 2);
    const auto W = VectorFieldAlongCurve::velocity_of(line);
    const Vec D = covariant_derivative(*e, line, X, W, 1.0);
    EXPECT_NEAR(D(0), 2.0, 1e-14);
    EXPECT_NEAR(D(1), 0.0, 1e-14);

    const auto s = catalog::sphere();
    const auto equator = PiecewiseCurve::from_function(
        [](const Jet& t) { return std::vector<Jet>{Jet(M_PI / 2), t}; }, 0, 3);
    const auto vel = VectorFieldAlongCurve::velocity_of(equator);
    EXPECT_LT(covariant_derivative(*s, equator, vel, vel, 1.3).norm(), 1e-14);

    // Leibniz rule on a generic metric and curve
    const auto r = catalog::randers();
    Rng rng(3);
    const auto f = random_function(rng, vec({0.1, -0.1}), 0.5);
    const auto curve = PiecewiseCurve::from_function(f, 0, 1);
    const auto Y = VectorFieldAlongCurve::from_function(
        [](const Jet& t) { return std::vector<Jet>{cos(t), t * t + 0.5}; }, 0, 1);
    const auto ref = VectorFieldAlongCurve::velocity_of(curve);
    const auto fY = Y.scaled([](const Jet& t) { return t * t; });
    const double t0 = 0.6;
    const Vec lhs = covariant_derivative(*r, curve, fY, ref, t0);
    const Vec rhs = 2 * t0 * Y.eval(t0).value + t0 * t0 * covariant_derivative(*r, curve, Y, ref, t0);
    EXPECT_LT((lhs - rhs).norm(), 1e-9);
    // reference scaling
    const auto ref3 = ref.scaled([](const Jet&) { return Jet(3.0); });
    EXPECT_LT((covariant_derivative(*r, curve, Y, ref3, t0) - covariant_derivative(*r, curve, Y, ref, t0)).norm(), 1e-9);
}

TEST(Connection, BreakRequiresSide)
{
    const auto e = catalog::euclidean();
    const auto broken = PiecewiseCurve::from_functions(
        {[](const Jet& t) { return std::vector<Jet>{t, Jet(0.0)}; },
         [](const Jet& t) { return std::vector<Jet>{Jet(1.0), t - 1.0}; }},
        {0.0, 1.0, 2.0});
    const auto vel = VectorFieldAlongCurve::velocity_of(broken);
    EXPECT_EQ(error_of([&] { covariant_derivative(*e, broken, vel, vel, 1.0); }), ErrorCode::break_ambiguity);
    EXPECT_NO_THROW(covariant_derivative(*e, broken, vel, vel, 1.0, Side::left));
}

TEST(Connection, AlmostMetricCompatibility)
{
    const auto ts = grid(0, 1, 201);
    const auto e = catalog::euclidean();
    Rng rng(12);
    for (const auto& m : catalog_metrics()) {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const auto [x0, v0] = sample_tangent(*m, rng);
            const auto fc = random_function(rng, x0, 0.15);
            const auto curve = PiecewiseCurve::from_samples(ts, sample_function(fc, ts));
            const auto X = VectorFieldAlongCurve::from_samples(ts, sample_function(random_function(rng, Vec::Zero(m->dim), 1.0), ts));
            const auto Y = VectorFieldAlongCurve::from_samples(ts, sample_function(random_function(rng, Vec::Zero(m->dim), 1.0), ts));
            // reference: v0 plus a small smooth perturbation keeps it admissible
            const auto Wf = random_function(rng, v0, 0.1);
            const auto W = VectorFieldAlongCurve::from_samples(ts, sample_function(Wf, ts));
            for (double t : {0.1, 0.5, 0.83})
                worst = std::max(worst, check_almost_g_compat(*m, curve, X, Y, W, t));
        }
        EXPECT_LE(worst, m->id == "euclidean" ? 1e-12 : 1e-7) << m->id;
    }
}
