#include <gtest/gtest.h>

#include "finsler/connection.hpp"
#include "finsler/geodesic.hpp"
#include "finsler/quadrature.hpp"
#include "support/fixtures.hpp"

using namespace finsler;
using namespace fixture;

TEST(Quadrature, PolynomialsAndOscillation)
{
    EXPECT_NEAR(gauss_legendre8([](double t) { return std::pow(t, 15); }, 0, 1), 1.0 / 16, 1e-15);
    EXPECT_NEAR(integrate_adaptive([](double t) { return std::sin(40 * t); }, {0, 1}), (1 - std::cos(40.0)) / 40, 1e-13);
}

TEST(Spline, NotAKnotReproducesCubics)
{
    const auto ts = grid(0, 1, 11);
    std::vector<Vec> ys;
    for (double t : ts) ys.push_back(vec({t * t * t - t, 2 * t * t}));
    const CubicSpline sp(ts, ys);
    for (double t : {0.03, 0.5, 0.97}) {
        EXPECT_NEAR(sp.eval(t)(0), t * t * t - t, 1e-13);
        EXPECT_NEAR(sp.eval(t, 1)(0), 3 * t * t - 1, 1e-12);
        EXPECT_NEAR(sp.eval(t, 2)(1), 4.0, 1e-11);
    }
}

TEST(Geodesic, EuclideanLine)
{
    const auto e = catalog::euclidean();
    const auto g = integrate_geodesic(*e, vec({0, 0}), vec({1, 2}), 0, 1);
    for (double t : {0.0, 0.37, 1.0}) EXPECT_LT((g.position(t) - vec({t, 2 * t})).norm(), 1e-12);
    EXPECT_NEAR(g.energy, 2.5, 1e-12);
}

TEST(Geodesic, SphereMeridian)
{
    const auto s = catalog::sphere();
    const auto g = integrate_geodesic(*s, vec({M_PI / 2, 0}), vec({-1, 0}), 0, M_PI / 4);
    // great circle closed form: theta(t) = pi/2 - t, phi = 0
    EXPECT_NEAR(g.position(M_PI / 4)(0), M_PI / 4, 1e-8);
    EXPECT_NEAR(g.position(M_PI / 4)(1), 0.0, 1e-12);
    EXPECT_LT((exponential_map(*s, vec({M_PI / 2, 0}), vec({-M_PI / 4, 0})) - vec({M_PI / 4, 0})).norm(), 1e-8);
}

TEST(Geodesic, MeridianThroughPoleLeavesChart)
{
    const auto s = catalog::sphere();
    try {
        integrate_geodesic(*s, vec({1.5708, 0}), vec({-1, 0}), 0, 3.5);
        FAIL() << "expected a domain exit";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::domain_exit);
        ASSERT_TRUE(e.at_t().has_value());
        // g = diag(1, sin^2 theta) turns degenerate once sin theta < 1e-5
        EXPECT_NEAR(*e.at_t(), 1.5708 - std::asin(1e-5), 1e-7);
    }
    EXPECT_EQ(error_of([&] { exponential_map(*s, vec({0.3, 0}), vec({-1, 0})); }), ErrorCode::not_in_exp_domain);
}

TEST(Geodesic, LightlikeLine)
{
    const auto p = catalog::pseudo_euclidean({-1, 1});
    const auto g = integrate_geodesic(*p, vec({0, 0}), vec({1, 1}), 0, 1);
    EXPECT_EQ(g.L0, 0.0);
    EXPECT_LT(g.drift, 1e-14);
}

TEST(Geodesic, ConservationAndHomogeneity)
{
    Rng rng(5);
    for (const auto& m : catalog_metrics()) {
        for (int trial = 0; trial < 3; ++trial) {
            const auto [x, v0] = sample_tangent(*m, rng);
            const Vec v = 0.5 * v0;
            const auto g = integrate_geodesic(*m, x, v, 0, 1);
            EXPECT_LE(g.drift, 1e-8) << m->id;
            const auto g2 = integrate_geodesic(*m, x, 2.0 * v, 0, 0.5);
            for (double t : {0.1, 0.25, 0.5}) {
                EXPECT_LT((g2.position(t) - g.position(2 * t)).norm(), 1e-8) << m->id;
                EXPECT_LT((g2.velocity(t) - 2.0 * g.velocity(2 * t)).norm(), 1e-8) << m->id;
            }
            const auto gh = integrate_geodesic(*m, x, 0.5 * v, 0, 2);
            EXPECT_LT((gh.position(2) - g.position(1)).norm(), 1e-8) << m->id;
            for (double s : {0.25, 0.5, 1.0})
                EXPECT_LT((exponential_map(*m, x, s * v) - g.position(s)).norm(), 1e-8) << m->id;
        }
    }
}

TEST(Geodesic, ParallelTransportExamples)
{
    const auto e = catalog::euclidean();
    const auto curve = PiecewiseCurve::from_function([](const Jet& t) { return std::vector<Jet>{t, sin(t)}; }, 0, 2);
    const auto X = parallel_transport(*e, curve, vec({0.3, -1}));
    EXPECT_LT((X.eval(1.7).value - vec({0.3, -1})).norm(), 1e-14);

    // latitude circle: holonomy rotation by 2 pi cos(pi/3) = pi
    const auto s = catalog::sphere();
    const auto latitude = PiecewiseCurve::from_function(
        [](const Jet& t) { return std::vector<Jet>{Jet(M_PI / 3), t}; }, 0, 2 * M_PI);
    const auto T = parallel_transport(*s, latitude, vec({1, 0}));
    EXPECT_LT((T.eval(2 * M_PI).value - vec({-1, 0})).norm(), 1e-8);
}

TEST(Geodesic, TransportAlongGeodesics)
{
    Rng rng(8);
    for (const auto& m : catalog_metrics()) {
        const auto [x, v] = sample_tangent(*m, rng);
        const auto g = integrate_geodesic(*m, x, 0.5 * v, 0, 1);
        const auto curve = g.curve();
        const Mat g0 = fundamental_tensor(*m, x, 0.5 * v);
        Eigen::SelfAdjointEigenSolver<Mat> eig(g0);
        const int n = m->dim;
        std::vector<VectorFieldAlongCurve> frame;
        std::vector<double> eps;
        for (int i = 0; i < n; ++i) {
            const double lam = eig.eigenvalues()(i);
            frame.push_back(parallel_transport(*m, curve, eig.eigenvectors().col(i) / std::sqrt(std::abs(lam))));
            eps.push_back(lam > 0 ? 1.0 : -1.0);
        }
        for (double t : {0.3, 0.7, 1.0}) {
            const CurveJet c = g.eval(t);
            const Mat gt = fundamental_tensor(*m, c.x, c.dx);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double val = frame[i].eval(t).value.dot(gt * frame[j].eval(t).value);
                    EXPECT_NEAR(val, i == j ? eps[i] : 0.0, 1e-7) << m->id;
                }
            const auto vel = parallel_transport(*m, curve, 0.5 * v);
            EXPECT_LT((vel.eval(t).value - c.dx).norm(), 1e-8) << m->id;
        }
        // with a parallel reference field the Cartan term drops out
        const auto W = parallel_transport(*m, curve, 0.5 * v);
        const auto X = VectorFieldAlongCurve::from_function(
            [](const Jet& t) { return std::vector<Jet>{cos(t), t * t}; }, 0, 1);
        EXPECT_LE(check_almost_g_compat(*m, curve, X, frame[0], W, 0.4), 1e-7) << m->id;
    }
}
