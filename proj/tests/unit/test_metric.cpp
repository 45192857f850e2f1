#include <gtest/gtest.h>

#include <cmath>

#include "finsler/metric.hpp"
#include "support/oracles.hpp"

using namespace finsler;

namespace {

Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

ErrorCode error_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::schema;
}

// Plain-double L for finite differences.
oracle::Field plain_L(const MetricDefinition& m)
{
    return [&m](const std::vector<double>& z) {
        const int n = m.dim;
        Vec x(n), v(n);
        for (int i = 0; i < n; ++i) x(i) = z[i], v(i) = z[n + i];
        return lagrangian_value(m, x, v);
    };
}

std::vector<MetricPtr> all_metrics()
{
    std::vector<MetricPtr> out;
    for (const auto& id : catalog::ids()) out.push_back(catalog::by_id(id));
    return out;
}

} // namespace

TEST(Metric, LagrangianValues)
{
    EXPECT_DOUBLE_EQ(evaluate_L(*catalog::euclidean(), vec({0, 0}), vec({3, 4})), 25.0);
    EXPECT_DOUBLE_EQ(evaluate_L(*catalog::pseudo_euclidean({-1, 1}), vec({0, 0}), vec({1, 2})), 3.0);
    EXPECT_NEAR(evaluate_L(*catalog::quartic(), vec({0, 0}), vec({1, 1})), std::sqrt(2.0), 1e-15);
}

TEST(Metric, FundamentalTensorExamples)
{
    EXPECT_TRUE(fundamental_tensor(*catalog::euclidean(3), Vec::Zero(3), vec({0.3, -1, 2})).isIdentity(1e-15));

    const auto q = catalog::quartic();
    const Mat g = fundamental_tensor(*q, vec({0, 0}), vec({1, 1}));
    const auto L = plain_L(*q);
    const std::vector<double> z{0, 0, 1, 1};
    const double g11 = 0.5 * oracle::partial(L, z, {2, 2}, 1e-4);
    const double g12 = 0.5 * oracle::partial(L, z, {2, 3}, 1e-4);
    EXPECT_NEAR(g11, std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(g12, -std::sqrt(2.0) / 2, 1e-6);
    EXPECT_NEAR(g(0, 0), g11, 1e-6);
    EXPECT_NEAR(g(1, 1), g11, 1e-6);
    EXPECT_NEAR(g(0, 1), g12, 1e-6);

    const Mat gs = fundamental_tensor(*catalog::sphere(), vec({M_PI / 4, 0.3}), vec({0.2, -0.7}));
    EXPECT_NEAR(gs(0, 0), 1.0, 1e-14);
    EXPECT_NEAR(gs(1, 1), 0.5, 1e-14);
    EXPECT_NEAR(gs(0, 1), 0.0, 1e-14);
}

TEST(Metric, CartanTensorExamples)
{
    for (const auto& m : {catalog::euclidean(), catalog::sphere(), catalog::hyperbolic(),
                          catalog::pseudo_euclidean()}) {
        Rng rng(3);
        const auto [x, v] = sample_tangent(*m, rng);
        EXPECT_LT(cartan_tensor(*m, x, v).max_abs(), 1e-12) << m->id;
    }
    const auto q = catalog::quartic();
    const Tensor3 c = cartan_tensor(*q, vec({0, 0}), vec({1, 1}));
    const double fd = 0.5 * oracle::derivative(
                                [&](double s) { return fundamental_tensor(*q, vec({0, 0}), vec({s, 1}))(0, 0); },
                                1.0, 1e-3);
    EXPECT_NEAR(c(0, 0, 0), fd, 1e-7);

    Rng rng(11);
    for (const auto& m : all_metrics()) {
        const auto [x, v] = sample_tangent(*m, rng);
        const Tensor3 ct = cartan_tensor(*m, x, v);
        const Vec w1 = rng.gaussian(m->dim), w2 = rng.gaussian(m->dim);
        EXPECT_LT(ct.contract(w1, w2).dot(v), 1e-9) << m->id;
    }
}

TEST(Metric, AdmissibilityExamples)
{
    EXPECT_FALSE(is_admissible(*catalog::quartic(), vec({0, 0}), vec({1, 0})));
    EXPECT_FALSE(is_admissible(*catalog::euclidean(), vec({0, 0}), vec({0, 0})));
    const auto f = catalog::funk();
    Rng rng(5);
    for (int s = 0; s < 50; ++s) {
        Vec x = rng.vector(2, -0.7, 0.7);
        if (x.norm() >= 0.99) continue;
        Vec v = rng.gaussian(2);
        ASSERT_TRUE(is_admissible(*f, x, v));
        Eigen::SelfAdjointEigenSolver<Mat> eig(fundamental_tensor(*f, x, v));
        EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    }
    EXPECT_EQ(error_of([&] { evaluate_L(*catalog::quartic(), vec({0, 0}), vec({0, 1})); }),
              ErrorCode::degenerate_tensor);
    EXPECT_EQ(error_of([&] { evaluate_L(*catalog::sphere(), vec({-0.1, 0}), vec({0, 1})); }), ErrorCode::chart);
    EXPECT_EQ(error_of([&] { evaluate_L(*catalog::euclidean(), vec({0, 0}), vec({0, 0})); }),
              ErrorCode::inadmissible);
}

TEST(Metric, AuditExamples)
{
    EXPECT_LE(audit_metric(*catalog::euclidean(), 100, 1).worst(), 1e-10);
    EXPECT_LE(audit_metric(*catalog::randers(), 100, 1).worst(), 1e-8);
    EXPECT_GT(audit_metric(*catalog::broken(), 20, 1).max_violation.at("L_homogeneity"), 1e-2);
}

TEST(Metric, CatalogIdentities)
{
    for (const auto& m : all_metrics()) {
        const AuditReport r = audit_metric(*m, 100, 7);
        EXPECT_LE(r.max_violation.at("g_homogeneity"), 1e-9) << m->id;
        EXPECT_LE(r.max_violation.at("g_vv_equals_L"), 1e-9) << m->id;
        EXPECT_LE(r.max_violation.at("cartan_homogeneity"), 1e-9) << m->id;
        EXPECT_LE(r.max_violation.at("cartan_v_contraction"), 1e-9) << m->id;
        EXPECT_LE(r.max_violation.at("cartan_symmetry"), 1e-12) << m->id;
        EXPECT_LE(r.max_violation.at("L_homogeneity"), 1e-9) << m->id;
        EXPECT_EQ(r.max_violation.at("conic"), 0.0) << m->id;
    }
}

TEST(Metric, JetDerivativesMatchFiniteDifferences)
{
    Rng rng(21);
    for (const auto& m : all_metrics()) {
        const auto [x, v] = sample_tangent(*m, rng);
        const int n = m->dim;
        DerivativeTable t(m->lagrangian, {x.data(), std::size_t(n)}, {v.data(), std::size_t(n)}, 4);
        std::vector<double> z(2 * n);
        for (int i = 0; i < n; ++i) z[i] = x(i), z[n + i] = v(i);
        const auto L = plain_L(*m);
        const std::vector<std::vector<int>> picks{{0}, {3}, {1, 2}, {2, 2}, {0, 2, 3}, {3, 3, 3}, {0, 1, 2, 3}, {2, 2, 3, 3}};
        // orders 3 and 4: finite differences of second derivatives taken from an order-2 lift
        auto hessian_entry = [&](std::vector<int> pair) -> oracle::Field {
            return [&m, n, pair](const std::vector<double>& zz) {
                std::vector<Direction> dirs;
                for (int a : pair) dirs.push_back(a < n ? Direction{Space::x, a} : Direction{Space::v, a - n});
                if (pair[0] == pair[1]) dirs.pop_back();
                const Jet j = lift(m->lagrangian, {zz.data(), std::size_t(n)}, {zz.data() + n, std::size_t(n)}, dirs, 2);
                return pair[0] == pair[1] ? j.mixed(0, 0) : j.mixed(0, 1);
            };
        };
        for (const auto& idx : picks) {
            const double fd = idx.size() <= 2
                                  ? oracle::partial(L, z, idx)
                                  : oracle::partial(hessian_entry({idx[0], idx[1]}), z,
                                                    std::vector<int>(idx.begin() + 2, idx.end()));
            EXPECT_LE(std::abs(t.at(idx) - fd), 1e-6 * std::max(1.0, std::abs(fd))) << m->id << " " << idx.size() << " " << t.at(idx) << " " << fd;
        }
    }
}
