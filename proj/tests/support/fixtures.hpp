#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "finsler/curves.hpp"
#include "finsler/metric.hpp"
#include "support/oracles.hpp"

namespace fixture {

using namespace finsler;

inline Vec vec(std::initializer_list<double> xs)
{
    Vec v(static_cast<int>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline ErrorCode error_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::schema;
}

inline std::vector<MetricPtr> catalog_metrics()
{
    std::vector<MetricPtr> out;
    for (const auto& id : catalog::ids()) out.push_back(catalog::by_id(id));
    return out;
}

// Smooth random curve x0 + t a + t^2 b + c sin(3 t), sampled and splined.
struct RandomCurve {
    PiecewiseCurve curve;
    JetCurveFunction f;
};

inline JetCurveFunction random_function(Rng& rng, const Vec& x0, double size)
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

inline std::vector<Vec> sample_function(const JetCurveFunction& f, const std::vector<double>& ts)
{
    std::vector<Vec> out;
    for (double t : ts) {
        const auto xs = f(Jet(t));
        Vec v(static_cast<int>(xs.size()));
        for (int i = 0; i < v.size(); ++i) v(i) = xs[i].value();
        out.push_back(v);
    }
    return out;
}

inline std::vector<double> grid(double a, double b, int count)
{
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) t[i] = a + (b - a) * i / (count - 1);
    return t;
}

} // namespace fixture
