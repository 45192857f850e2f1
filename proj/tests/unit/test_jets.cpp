#include <gtest/gtest.h>

#include <cmath>

#include "finsler/jets.hpp"
#include "support/oracles.hpp"

using namespace finsler;

namespace {

struct Monomial {
    double coef;
    std::vector<int> exps;
};

// Exact Taylor coefficient (1/alpha!) d^alpha p along coordinate axes.
double poly_coeff(const std::vector<Monomial>& p, const std::vector<double>& z,
                  const std::vector<int>& axes, const MultiIndex& alpha)
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

template <typename T>
T poly_eval(const std::vector<Monomial>& p, std::span<const T> x, std::span<const T> v)
{
    T total(0.0);
    const std::size_t n = x.size();
    for (const auto& mono : p) {
        T term(mono.coef);
        for (std::size_t j = 0; j < 2 * n; ++j) {
            const T& base = j < n ? x[j] : v[j - n];
            for (int e = 0; e < mono.exps[j]; ++e) term = term * base;
        }
        total = total + term;
    }
    return total;
}

} // namespace

TEST(Jets, SquareOfSingleVariable)
{
    TangentFunction f = [](std::span<const Jet>, std::span<const Jet> v) { return v[0] * v[0]; };
    std::vector<double> x{0.0}, v{3.0};
    std::vector<Direction> dirs{{Space::v, 0}};
    Jet j = lift(f, x, v, dirs, 2);
    EXPECT_DOUBLE_EQ(j.value(), 9.0);
    EXPECT_DOUBLE_EQ(j.coeff({1, 0, 0, 0}), 6.0);
    EXPECT_DOUBLE_EQ(j.coeff({2, 0, 0, 0}), 1.0);
}

TEST(Jets, ConstantHasNoDerivatives)
{
    TangentFunction f = [](std::span<const Jet>, std::span<const Jet>) { return Jet(4.5); };
    std::vector<double> x{0.3, 0.1}, v{1.0, 2.0};
    std::vector<Direction> dirs{{Space::x, 0}, {Space::v, 1}, {Space::v, 0}};
    Jet j = lift(f, x, v, dirs, 4);
    EXPECT_DOUBLE_EQ(j.value(), 4.5);
    for (int k = 1; k < j.layout().size(); ++k) EXPECT_EQ(j.raw(k), 0.0);
}

TEST(Jets, QuarticMixedSecondDerivative)
{
    TangentFunction f = [](std::span<const Jet>, std::span<const Jet> v) {
        return sqrt(pow(v[0], 4) + pow(v[1], 4));
    };
    std::vector<double> x{0.0, 0.0}, v{1.0, 1.0};
    std::vector<Direction> dirs{{Space::v, 0}, {Space::v, 1}};
    const double jet = lift(f, x, v, dirs, 2).mixed(0, 1);

    oracle::Field plain = [](const std::vector<double>& z) {
        return std::sqrt(std::pow(z[0], 4) + std::pow(z[1], 4));
    };
    const double fd = oracle::partial(plain, {1.0, 1.0}, {0, 1}, 1e-4);
    EXPECT_NEAR(fd, -std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(jet, fd, 1e-6);
}

TEST(Jets, RandomPolynomialsExact)
{
    oracle::Rng rng(42);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 2;
        std::vector<Monomial> p;
        for (int t = 0; t < 6; ++t) {
            Monomial m{rng.uniform(-2, 2), std::vector<int>(2 * n, 0)};
            int budget = static_cast<int>(rng.uniform(0, 4.999));
            while (budget-- > 0) m.exps[static_cast<int>(rng.uniform(0, 2 * n - 1e-9))]++;
            p.push_back(m);
        }
        const std::vector<double> x = rng.vec(n, -1, 1), v = rng.vec(n, -1, 1);
        std::vector<double> z = x;
        z.insert(z.end(), v.begin(), v.end());
        TangentFunction f = [&](std::span<const Jet> xs, std::span<const Jet> vs) {
            return poly_eval<Jet>(p, xs, vs);
        };
        std::vector<Direction> dirs{{Space::x, 0}, {Space::v, 1}, {Space::x, 1}, {Space::v, 0}};
        std::vector<int> axes{0, 3, 1, 2};
        const Jet j = lift(f, x, v, dirs, 4);
        for (int k = 0; k < j.layout().size(); ++k) {
            EXPECT_NEAR(j.raw(k), poly_coeff(p, z, axes, j.layout().index(k)), 1e-12);
        }
        DerivativeTable table(f, x, v, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                for (int c = 0; c < 4; ++c) {
                    MultiIndex alpha{};
                    alpha[a]++, alpha[b]++, alpha[c]++;
                    std::vector<int> id{0, 1, 2, 3};
                    const double expect =
                        poly_coeff(p, z, id, alpha) * std::tgamma(alpha[0] + 1) *
                        std::tgamma(alpha[1] + 1) * std::tgamma(alpha[2] + 1) * std::tgamma(alpha[3] + 1);
                    EXPECT_NEAR(table.d(a, b, c), expect, 1e-11);
                }
    }
}

TEST(Jets, TableOverManyVariablesMatchesDirectLift)
{
    // 3-dimensional: 6 variables forces assembly over several 4-subsets.
    TangentFunction f = [](std::span<const Jet> x, std::span<const Jet> v) {
        return exp(x[0] * v[1]) * sin(x[2] + v[0]) + log(2.0 + x[1] * x[1]) * v[2] * v[2];
    };
    std::vector<double> x{0.2, -0.4, 0.7}, v{0.5, 1.1, -0.3};
    DerivativeTable t(f, x, v, 4);
    std::vector<Direction> dirs{{Space::x, 0}, {Space::v, 1}, {Space::x, 2}, {Space::v, 2}};
    const Jet j = lift(f, x, v, dirs, 4);
    EXPECT_NEAR(t.d(0, 4, 2, 5), j.derivative({1, 1, 1, 1}), 1e-12);
    EXPECT_NEAR(t.d(4, 4, 0, 0), j.derivative({2, 2, 0, 0}), 1e-12);
    EXPECT_NEAR(t.d(5, 5, 2), j.derivative({0, 0, 1, 2}), 1e-12);
    EXPECT_NEAR(t.d(1, 3, 1, 3), lift(f, x, v, std::vector<Direction>{{Space::x, 1}, {Space::v, 0}}, 4)
                                     .derivative({2, 2, 0, 0}),
                1e-12);

    oracle::Field plain = [](const std::vector<double>& z) {
        return std::exp(z[0] * z[4]) * std::sin(z[2] + z[3]) + std::log(2.0 + z[1] * z[1]) * z[5] * z[5];
    };
    std::vector<double> z{0.2, -0.4, 0.7, 0.5, 1.1, -0.3};
    EXPECT_NEAR(t.d(0, 4, 2, 5), oracle::partial(plain, z, {0, 4, 2, 5}), 1e-6);
    EXPECT_NEAR(t.d(1, 1, 5), oracle::partial(plain, z, {1, 1, 5}), 1e-6);
}

TEST(Jets, ShiftedMatchesLiftAlong)
{
    TangentFunction f = [](std::span<const Jet> x, std::span<const Jet> v) {
        return sqrt(1.0 + x[0] * x[0]) * (v[0] * v[0] + v[1] * v[1]) + x[1] * v[0] * v[1];
    };
    std::vector<double> x{0.3, -0.2}, v{0.9, 0.4};
    DerivativeTable t(f, x, v, 4);
    std::vector<std::vector<double>> seeds{{0.1, 0.2, -0.3, 0.5}, {0.0, 1.0, 0.4, 0.0}};
    const Jet direct = lift_along(f, x, v, seeds, 4);
    const Jet shifted = t.shifted(std::vector<int>{}, seeds, 4);
    for (int k = 0; k < direct.layout().size(); ++k) EXPECT_NEAR(direct.raw(k), shifted.raw(k), 1e-12);

    // d/dv0 of f along the same shift: partial of the lifted jet in an extra direction
    std::vector<std::vector<double>> seeds3 = seeds;
    seeds3.push_back({0, 0, 1, 0});
    const Jet with_dir = lift_along(f, x, v, seeds3, 3).partial(2).drop_direction(2);
    const Jet from_table = t.shifted(std::vector<int>{2}, seeds, 2);
    for (int k = 0; k < from_table.layout().size(); ++k)
        EXPECT_NEAR(from_table.raw(k), with_dir.raw(k), 1e-12);
}

TEST(Jets, ElementaryFunctionsAgainstClosedForms)
{
    const Jet t = Jet::variable(0.7, 0, 1, 4);
    auto check = [](const Jet& j, std::array<double, 5> derivs) {
        for (int k = 0; k <= 4; ++k)
            EXPECT_NEAR(j.derivative({static_cast<std::uint8_t>(k), 0, 0, 0}), derivs[k], 1e-12);
    };
    const double a = 0.7;
    check(exp(t), {std::exp(a), std::exp(a), std::exp(a), std::exp(a), std::exp(a)});
    check(sin(t), {std::sin(a), std::cos(a), -std::sin(a), -std::cos(a), std::sin(a)});
    check(log(t), {std::log(a), 1 / a, -1 / (a * a), 2 / (a * a * a), -6 / std::pow(a, 4)});
    check(sqrt(t), {std::sqrt(a), 0.5 / std::sqrt(a), -0.25 * std::pow(a, -1.5), 0.375 * std::pow(a, -2.5),
                    -0.9375 * std::pow(a, -3.5)});
    check(1.0 / t, {1 / a, -1 / (a * a), 2 / std::pow(a, 3), -6 / std::pow(a, 4), 24 / std::pow(a, 5)});
    const Jet at = atan(t);
    const Jet viatan = tan(at);
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(viatan.raw(k), t.raw(k), 1e-12);
    const Jet hyp = cosh(t) * cosh(t) - sinh(t) * sinh(t);
    EXPECT_NEAR(hyp.value(), 1.0, 1e-12);
    for (int k = 1; k < 5; ++k) EXPECT_NEAR(hyp.raw(k), 0.0, 1e-12);
}

TEST(Jets, DomainErrorsAreRaised)
{
    const Jet zero = Jet::variable(0.0, 0, 1, 2);
    const Jet neg = Jet::variable(-1.0, 0, 1, 2);
    auto code_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::schema;
    };
    EXPECT_EQ(code_of([&] { (void)sqrt(neg); }), ErrorCode::jet_domain);
    EXPECT_EQ(code_of([&] { (void)sqrt(zero); }), ErrorCode::jet_domain);
    EXPECT_EQ(code_of([&] { (void)log(zero); }), ErrorCode::jet_domain);
    EXPECT_EQ(code_of([&] { (void)(1.0 / zero); }), ErrorCode::jet_domain);
    EXPECT_EQ(code_of([&] { (void)pow(neg, 0.5); }), ErrorCode::jet_domain);
}

TEST(Jets, PartialAndDropDirection)
{
    // f = e1^2 e2 + 3 e1 + 2 over two directions
    Jet e1 = Jet::variable(0.0, 0, 2, 3), e2 = Jet::variable(0.0, 1, 2, 3);
    Jet f = e1 * e1 * e2 + 3.0 * e1 + 2.0;
    Jet d1 = f.partial(0); // 2 e1 e2 + 3
    EXPECT_EQ(d1.order(), 2);
    EXPECT_DOUBLE_EQ(d1.value(), 3.0);
    EXPECT_DOUBLE_EQ(d1.coeff({1, 1, 0, 0}), 2.0);
    Jet g = f.drop_direction(1); // e1 terms only: 3 e1 + 2
    EXPECT_EQ(g.directions(), 1);
    EXPECT_DOUBLE_EQ(g.coeff({1, 0, 0, 0}), 3.0);
    EXPECT_DOUBLE_EQ(g.coeff({2, 0, 0, 0}), 0.0);
}
