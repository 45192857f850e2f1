#include "finsler/metric.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace finsler {

namespace {

std::vector<Jet> constants(const Vec& a)
{
    std::vector<Jet> out;
    out.reserve(a.size());
    for (int i = 0; i < a.size(); ++i) out.emplace_back(a(i));
    return out;
}

std::span<const double> span_of(const Vec& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

} // namespace

double lagrangian_value(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    const auto xs = constants(x), vs = constants(v);
    return m.lagrangian(xs, vs).value();
}

bool is_degenerate(const Mat& g)
{
    const int n = static_cast<int>(g.rows());
    const double scale = g.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(scale > 0.0)) {
        return true;
    }
    return std::abs(g.determinant()) < 1e-10 * std::pow(scale, n);
}

Mat fundamental_tensor_unchecked(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    const int n = m.dim;
    Mat g(n, n);
    if (n <= JetLayout::kMaxDirections) {
        std::vector<Direction> dirs;
        for (int i = 0; i < n; ++i) dirs.push_back({Space::v, i});
        const Jet j = lift(m.lagrangian, span_of(x), span_of(v), dirs, 2);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) g(a, b) = 0.5 * j.mixed(a, b);
        return g;
    }
    for (int a = 0; a < n; ++a) {
        for (int b = a; b < n; ++b) {
            std::vector<Direction> dirs{{Space::v, a}};
            if (b != a) dirs.push_back({Space::v, b});
            const Jet j = lift(m.lagrangian, span_of(x), span_of(v), dirs, 2);
            g(a, b) = g(b, a) = 0.5 * (a == b ? j.mixed(0, 0) : j.mixed(0, 1));
        }
    }
    return g;
}

void require_chart(const MetricDefinition& m, const Vec& x)
{
    if (x.size() != m.dim) {
        fail(ErrorCode::invalid_argument, "point has dimension " + std::to_string(x.size()) +
                                              ", metric '" + m.id + "' expects " + std::to_string(m.dim));
    }
    if (!x.allFinite() || !m.chart_domain(x)) {
        fail(ErrorCode::chart, "point outside the chart domain of '" + m.id + "'");
    }
}

void require_admissible(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_chart(m, x);
    if (v.size() != m.dim) {
        fail(ErrorCode::invalid_argument, "vector dimension mismatch for metric '" + m.id + "'");
    }
    if (!v.allFinite() || v.isZero(0.0) || !m.admissible(x, v)) {
        fail(ErrorCode::inadmissible, "vector is not in the admissible cone of '" + m.id + "'");
    }
    if (is_degenerate(fundamental_tensor_unchecked(m, x, v))) {
        fail(ErrorCode::degenerate_tensor, "fundamental tensor is degenerate");
    }
}

double evaluate_L(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_admissible(m, x, v);
    return lagrangian_value(m, x, v);
}

Mat fundamental_tensor(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_admissible(m, x, v);
    return fundamental_tensor_unchecked(m, x, v);
}

Tensor3 cartan_tensor(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_admissible(m, x, v);
    const int n = m.dim;
    Tensor3 c(n);
    auto fill = [&](int a, int b, int e, double value) {
        std::array<int, 3> p{a, b, e};
        std::sort(p.begin(), p.end());
        do {
            c(p[0], p[1], p[2]) = value;
        } while (std::next_permutation(p.begin(), p.end()));
    };
    if (n <= JetLayout::kMaxDirections) {
        std::vector<Direction> dirs;
        for (int i = 0; i < n; ++i) dirs.push_back({Space::v, i});
        const Jet j = lift(m.lagrangian, span_of(x), span_of(v), dirs, 3);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                for (int e = b; e < n; ++e) {
                    MultiIndex alpha{};
                    alpha[a]++, alpha[b]++, alpha[e]++;
                    fill(a, b, e, 0.25 * j.derivative(alpha));
                }
        return c;
    }
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            for (int e = b; e < n; ++e) {
                std::vector<int> distinct{a};
                if (b != a) distinct.push_back(b);
                if (e != b) distinct.push_back(e);
                std::vector<Direction> dirs;
                for (int i : distinct) dirs.push_back({Space::v, i});
                const Jet j = lift(m.lagrangian, span_of(x), span_of(v), dirs, 3);
                MultiIndex alpha{};
                for (int i : {a, b, e})
                    alpha[std::find(distinct.begin(), distinct.end(), i) - distinct.begin()]++;
                fill(a, b, e, 0.25 * j.derivative(alpha));
            }
    return c;
}

bool is_admissible(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    try {
        require_admissible(m, x, v);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::pair<Vec, Vec> sample_tangent(const MetricDefinition& m, Rng& rng)
{
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Vec x = m.sample_point(rng);
        Vec v = m.sample_velocity(rng, x);
        if (is_admissible(m, x, v)) {
            return {x, v};
        }
    }
    fail(ErrorCode::invalid_argument, "could not sample an admissible vector for '" + m.id + "'");
}

double AuditReport::worst() const
{
    double w = 0.0;
    for (const auto& [name, value] : max_violation) w = std::max(w, value);
    return w;
}

AuditReport audit_metric(const MetricDefinition& m, int samples, std::uint64_t seed)
{
    Rng rng(seed);
    AuditReport report;
    report.samples = samples;
    auto& worst = report.max_violation;
    for (const char* key : {"L_homogeneity", "conic", "nondegenerate", "g_homogeneity", "g_vv_equals_L",
                            "cartan_homogeneity", "cartan_symmetry", "cartan_v_contraction"})
        worst[key] = 0.0;
    auto bump = [&](const char* key, double value) {
        worst[key] = std::max(worst[key], std::isfinite(value) ? value : 1e300);
    };
    const int n = m.dim;
    for (int s = 0; s < samples; ++s) {
        const auto [x, v] = sample_tangent(m, rng);
        const double L = lagrangian_value(m, x, v);
        for (double lambda : {0.5, 2.0, 7.0}) {
            bump("L_homogeneity", std::abs(lagrangian_value(m, x, lambda * v) - lambda * lambda * L));
            bump("conic", is_admissible(m, x, lambda * v) ? 0.0 : 1.0);
        }
        const Mat g = fundamental_tensor_unchecked(m, x, v);
        bump("nondegenerate", is_degenerate(g) ? 1.0 : 0.0);
        bump("g_vv_equals_L", std::abs(v.dot(g * v) - L));
        const Tensor3 c = cartan_tensor(m, x, v);
        for (double lambda : {0.5, 2.0}) {
            if (!is_admissible(m, x, lambda * v)) continue;
            bump("g_homogeneity", (fundamental_tensor_unchecked(m, x, lambda * v) - g).cwiseAbs().maxCoeff());
            const Tensor3 cl = cartan_tensor(m, x, lambda * v);
            double dev = 0.0;
            for (std::size_t k = 0; k < c.data().size(); ++k)
                dev = std::max(dev, std::abs(lambda * cl.data()[k] - c.data()[k]));
            bump("cartan_homogeneity", dev);
        }
        double sym = 0.0, contraction = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int e = 0; e < n; ++e) {
                    const double ref = c(a, b, e);
                    for (double other : {c(a, e, b), c(b, a, e), c(b, e, a), c(e, a, b), c(e, b, a)})
                        sym = std::max(sym, std::abs(ref - other));
                }
        for (int slot = 0; slot < 3; ++slot)
            for (int b = 0; b < n; ++b)
                for (int e = 0; e < n; ++e) {
                    double acc = 0.0;
                    for (int a = 0; a < n; ++a) {
                        acc += v(a) * (slot == 0 ? c(a, b, e) : slot == 1 ? c(b, a, e) : c(b, e, a));
                    }
                    contraction = std::max(contraction, std::abs(acc));
                }
        bump("cartan_symmetry", sym);
        bump("cartan_v_contraction", contraction);
    }
    return report;
}

} // namespace finsler
