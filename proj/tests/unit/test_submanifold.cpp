#include <gtest/gtest.h>

#include "finsler/connection.hpp"
#include "finsler/submanifold.hpp"
#include "support/fixtures.hpp"

using namespace finsler;
using namespace fixture;

namespace {

struct Setup {
    SubmanifoldPatch patch;
    Vec u;
    Vec N;
};

// Random patches through a sampled point, with a normal found from the Euclidean normal.
std::vector<Setup> random_setups(const MetricDefinition& m, Rng& rng, int count)
{
    std::vector<Setup> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count && attempts++ < 50 * count) {
        const auto [x, v] = sample_tangent(m, rng);
        const int kind = static_cast<int>(rng.index(3));
        std::optional<SubmanifoldPatch> P;
        Vec u;
        if (kind == 0) {
            const double th = rng.uniform(0, 2 * M_PI);
            P = SubmanifoldPatch::line(x, vec({std::cos(th), std::sin(th)}));
            u = vec({0.0});
        } else if (kind == 1) {
            const double rho = rng.uniform(0.3, 1.5), th = rng.uniform(0, 2 * M_PI);
            P = SubmanifoldPatch::circle(x - rho * vec({std::cos(th), std::sin(th)}), rho);
            u = vec({th});
        } else {
            const double c1 = rng.uniform(-1, 1), c2 = rng.uniform(-1, 1), c3 = rng.uniform(-1, 1);
            const double y0 = x(1) - c1 * x(0) - c2 * x(0) * x(0) - c3 * std::pow(x(0), 3);
            P = SubmanifoldPatch::graph({y0, c1, c2, c3});
            u = vec({x(0)});
        }
        const Vec e = P->tangent(u).col(0);
        Vec guess = vec({-e(1), e(0)});
        if (guess.dot(v) < 0) guess = -guess;
        try {
            const Vec N = find_normal(m, *P, u, guess);
            split_tan_nor(m, *P, u, N, N);
            out.push_back({*P, u, N});
        } catch (const Error&) {
        }
    }
    return out;
}

// Damped-Newton normal section differentiated by central differences.
Vec normal_sff_fd(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N, const Vec& U)
{
    const Vec a = P.coefficients(u, U);
    auto central = [&](double h) {
        return Vec((find_normal(m, P, u + h * a, N) - find_normal(m, P, u - h * a, N)) / (2 * h));
    };
    // rescaling of the section only changes the normal part
    const Vec dN = (4.0 * central(1e-4) - central(2e-4)) / 3.0;
    const Vec nabla = dN + christoffel(m, P.position(u), N).contract(N, U);
    return split_tan_nor(m, P, u, N, nabla).tan;
}

} // namespace

TEST(Submanifold, NormalityExamples)
{
    const auto e = catalog::euclidean();
    const auto axis = SubmanifoldPatch::line(vec({0, 0}), vec({1, 0}));
    const auto n1 = is_normal(*e, axis, vec({0}), vec({0, 1}));
    EXPECT_TRUE(n1.normal);
    EXPECT_EQ(n1.residual, 0.0);
    const auto n2 = is_normal(*e, axis, vec({0}), vec({1, 1}));
    EXPECT_FALSE(n2.normal);
    EXPECT_NEAR(n2.residual, 1.0, 1e-15);
    EXPECT_TRUE(is_normal(*e, axis, vec({0}), vec({0, 5})).normal);
}

TEST(Submanifold, RandersNormalIsNotEuclidean)
{
    const auto m = catalog::randers();
    const auto axis = SubmanifoldPatch::line(vec({0, 0}), vec({1, 0}));
    const Vec N = find_normal(*m, axis, vec({0}), vec({0, 1}));
    EXPECT_TRUE(is_normal(*m, axis, vec({0}), N).normal);
    EXPECT_LE(is_normal(*m, axis, vec({0}), N).residual, 1e-9);
    EXPECT_GT(std::abs(N(0)), 1e-3);
    // oracle: dL/dv1 = 0 along the unit circle of directions, bisection on the angle
    auto dL = [&](double phi) {
        return oracle::derivative([&](double s) { return lagrangian_value(*m, vec({0, 0}), vec({s, std::sin(phi)})); },
                                  std::cos(phi), 1e-3);
    };
    double lo = 0.5 * M_PI - 1.0, hi = 0.5 * M_PI + 1.0;
    ASSERT_LT(dL(lo) * dL(hi), 0.0);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dL(lo) * dL(mid) <= 0 ? hi : lo) = mid;
    }
    const double phi = 0.5 * (lo + hi);
    EXPECT_NEAR(std::atan2(N(1), N(0)), phi, 1e-8);
}

TEST(Submanifold, SplitExamples)
{
    const auto e = catalog::euclidean();
    const auto axis = SubmanifoldPatch::line(vec({0, 0}), vec({1, 0}));
    const auto s = split_tan_nor(*e, axis, vec({0}), vec({0, 1}), vec({3, 4}));
    EXPECT_LT((s.tan - vec({3, 0})).norm(), 1e-15);
    EXPECT_LT((s.nor - vec({0, 4})).norm(), 1e-15);

    Rng rng(2);
    for (const auto& m : catalog_metrics())
        for (const auto& st : random_setups(*m, rng, 5)) {
            const Vec e0 = st.patch.tangent(st.u).col(0);
            const auto t = split_tan_nor(*m, st.patch, st.u, st.N, e0);
            EXPECT_LT((t.tan - e0).norm(), 1e-12) << m->id;
            EXPECT_LT(t.nor.norm(), 1e-12) << m->id;
            const Vec Y = rng.vector(2, -1, 1);
            const auto y = split_tan_nor(*m, st.patch, st.u, st.N, Y);
            const auto yy = split_tan_nor(*m, st.patch, st.u, st.N, y.tan);
            EXPECT_LT((yy.tan - y.tan).norm(), 1e-12) << m->id;
            const Mat g = fundamental_tensor(*m, st.patch.position(st.u), st.N);
            EXPECT_LT(std::abs(y.nor.dot(g * e0)), 1e-12) << m->id;
        }

    const auto pe = catalog::pseudo_euclidean({-1, 1});
    const auto diag = SubmanifoldPatch::line(vec({0, 0}), vec({1, 1}));
    EXPECT_EQ(error_of([&] { split_tan_nor(*pe, diag, vec({0}), vec({1, 1}), vec({1, 0})); }),
              ErrorCode::degenerate_restriction);
}

TEST(Submanifold, SecondFundamentalFormExamples)
{
    const auto e = catalog::euclidean();
    const auto axis = SubmanifoldPatch::line(vec({0, 0}), vec({1, 0}));
    EXPECT_LT(second_fundamental_form(*e, axis, vec({0.3}), vec({0, 1}), vec({1, 0}), vec({2, 0})).norm(), 1e-15);
    EXPECT_LT(normal_second_fundamental_form(*e, axis, vec({0.3}), vec({0, 1}), vec({1, 0})).norm(), 1e-15);

    const auto circle = SubmanifoldPatch::circle(vec({0, 0}), 1.0);
    const Vec S = second_fundamental_form(*e, circle, vec({0}), vec({1, 0}), vec({0, 1}), vec({0, 1}));
    EXPECT_LT((S - vec({-1, 0})).norm(), 1e-12);
    const Vec St = normal_second_fundamental_form(*e, circle, vec({0}), vec({1, 0}), vec({0, 1}));
    EXPECT_LT((St - vec({0, 1})).norm(), 1e-12);

    const auto e3 = catalog::euclidean(3);
    const auto sph = SubmanifoldPatch::sphere(vec({0, 0, 0}), 2.0);
    const Vec u = vec({0.7, 0.4});
    const Vec x = sph.position(u), N = x / 2.0;
    const Mat E = sph.tangent(u);
    const Vec U = 0.3 * E.col(0) - 1.2 * E.col(1);
    const Vec SU = second_fundamental_form(*e3, sph, u, N, U, U);
    EXPECT_LT((SU + 0.5 * U.squaredNorm() * N).norm(), 1e-12);
}

TEST(Submanifold, RiemannianReductionMatchesLeviCivita)
{
    Rng rng(4);
    for (const auto& m : catalog_metrics()) {
        if (!m->quadratic) continue;
        for (const auto& st : random_setups(*m, rng, 5)) {
            const Vec U = st.patch.tangent(st.u).col(0);
            const Vec x = st.patch.position(st.u);
            const auto H = st.patch.hessian(st.u);
            const Vec classical = split_tan_nor(*m, st.patch, st.u, st.N, H[0] + m->levi_civita(x).contract(U, U)).nor;
            EXPECT_LT((second_fundamental_form(*m, st.patch, st.u, st.N, U, U) - classical).norm(), 1e-7) << m->id;
        }
    }
}

TEST(Submanifold, DualitySymmetryHomogeneity)
{
    Rng rng(6);
    auto metrics = catalog_metrics();
    for (const auto& m : metrics) {
        const auto setups = random_setups(*m, rng, 20);
        EXPECT_EQ(setups.size(), 20u) << m->id;
        double duality = 0, symmetry = 0, homog = 0, section = 0;
        for (const auto& st : setups) {
            const Mat E = st.patch.tangent(st.u);
            const Vec U = rng.uniform(-1, 1) * E.col(0), W = rng.uniform(-1, 1) * E.col(0);
            const Mat g = fundamental_tensor(*m, st.patch.position(st.u), st.N);
            const Vec S = second_fundamental_form(*m, st.patch, st.u, st.N, U, W);
            const Vec St = normal_second_fundamental_form(*m, st.patch, st.u, st.N, U);
            duality = std::max(duality, std::abs(S.dot(g * st.N) + St.dot(g * W)));
            symmetry = std::max(symmetry, (S - second_fundamental_form(*m, st.patch, st.u, st.N, W, U)).norm());
            homog = std::max(homog, (second_fundamental_form(*m, st.patch, st.u, 2.0 * st.N, U, W) - S).norm());
            homog = std::max(homog, (normal_second_fundamental_form(*m, st.patch, st.u, 2.0 * st.N, U) - 2.0 * St).norm());
            section = std::max(section, (normal_sff_fd(*m, st.patch, st.u, st.N, U) - St).norm());
        }
        EXPECT_LE(duality, 1e-7) << m->id;
        EXPECT_LE(symmetry, 1e-7) << m->id;
        EXPECT_LE(homog, 1e-7) << m->id;
        EXPECT_LE(section, 1e-6) << m->id;
    }
}

TEST(Submanifold, LocateAndErrors)
{
    const auto circle = SubmanifoldPatch::circle(vec({1, 0}), 2.0);
    const Vec u = circle.locate(vec({1, 2}));
    EXPECT_NEAR(u(0), M_PI / 2, 1e-12);
    EXPECT_EQ(error_of([&] { circle.locate(vec({1, 2.1})); }), ErrorCode::endpoint_off_submanifold);
    const auto e = catalog::euclidean();
    EXPECT_EQ(error_of([&] { second_fundamental_form(*e, circle, u, vec({1, 1}), vec({1, 0}), vec({1, 0})); }),
              ErrorCode::orthogonality_violation);
    const auto pt = SubmanifoldPatch::point(vec({0.5, 0.5}));
    EXPECT_TRUE(is_normal(*e, pt, Vec(0), vec({1, 0})).normal);
    EXPECT_NO_THROW(pt.locate(vec({0.5, 0.5})));
}
