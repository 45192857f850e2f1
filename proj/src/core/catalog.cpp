#include <cmath>

#include "finsler/metric.hpp"

namespace finsler::catalog {

namespace {

Vec sample_box(Rng& rng, int n, double half)
{
    return rng.vector(n, -half, half);
}

Vec sample_nonzero(Rng& rng, int n, double min_norm = 0.3)
{
    while (true) {
        Vec v = rng.vector(n, -1.0, 1.0);
        if (v.norm() >= min_norm) return v;
    }
}

Jet dot(std::span<const Jet> a, std::span<const Jet> b)
{
    Jet acc(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool always(const Vec&) { return true; }

bool in_unit_disk(const Vec& x) { return x.squaredNorm() < 1.0; }

} // namespace

MetricPtr euclidean(int n)
{
    if (n < 1) fail(ErrorCode::invalid_argument, "euclidean: dimension must be positive");
    auto m = std::make_shared<MetricDefinition>();
    m->id = "euclidean";
    m->dim = n;
    m->chart_domain = always;
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [](std::span<const Jet>, std::span<const Jet> v) { return dot(v, v); };
    m->quadratic = true;
    m->levi_civita = [n](const Vec&) { return Tensor3(n); };
    m->flag_curvature = 0.0;
    m->sample_point = [n](Rng& rng) { return sample_box(rng, n, 1.0); };
    m->sample_velocity = [n](Rng& rng, const Vec&) { return sample_nonzero(rng, n); };
    return m;
}

MetricPtr pseudo_euclidean(const std::vector<int>& signature)
{
    const int n = static_cast<int>(signature.size());
    if (n < 1) fail(ErrorCode::invalid_argument, "pseudo_euclidean: empty signature");
    for (int s : signature)
        if (s != 1 && s != -1) fail(ErrorCode::invalid_argument, "pseudo_euclidean: signature entries must be +1 or -1");
    auto m = std::make_shared<MetricDefinition>();
    m->id = "pseudo_euclidean";
    m->dim = n;
    m->chart_domain = always;
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [signature](std::span<const Jet>, std::span<const Jet> v) {
        Jet acc(0.0);
        for (std::size_t i = 0; i < v.size(); ++i) acc += static_cast<double>(signature[i]) * v[i] * v[i];
        return acc;
    };
    m->quadratic = true;
    m->levi_civita = [n](const Vec&) { return Tensor3(n); };
    m->flag_curvature = 0.0;
    m->sample_point = [n](Rng& rng) { return sample_box(rng, n, 1.0); };
    m->sample_velocity = [n](Rng& rng, const Vec&) { return sample_nonzero(rng, n); };
    return m;
}

MetricPtr sphere()
{
    auto m = std::make_shared<MetricDefinition>();
    m->id = "sphere";
    m->dim = 2;
    m->chart_domain = [](const Vec& x) { return x(0) > 0.0 && x(0) < M_PI; };
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [](std::span<const Jet> x, std::span<const Jet> v) {
        const Jet s = sin(x[0]);
        return v[0] * v[0] + s * s * v[1] * v[1];
    };
    m->quadratic = true;
    m->levi_civita = [](const Vec& x) {
        Tensor3 G(2);
        const double s = std::sin(x(0)), c = std::cos(x(0));
        G(0, 1, 1) = -s * c;
        G(1, 0, 1) = G(1, 1, 0) = c / s;
        return G;
    };
    m->flag_curvature = 1.0;
    m->sample_point = [](Rng& rng) {
        Vec x(2);
        x << rng.uniform(0.6, M_PI - 0.6), rng.uniform(-1.0, 1.0);
        return x;
    };
    m->sample_velocity = [](Rng& rng, const Vec&) { return sample_nonzero(rng, 2); };
    return m;
}

MetricPtr hyperbolic()
{
    auto m = std::make_shared<MetricDefinition>();
    m->id = "hyperbolic";
    m->dim = 2;
    m->chart_domain = in_unit_disk;
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [](std::span<const Jet> x, std::span<const Jet> v) {
        const Jet w = 1.0 - dot(x, x);
        return 4.0 * dot(v, v) / (w * w);
    };
    m->quadratic = true;
    m->levi_civita = [](const Vec& x) {
        // conformal factor e^{2 sigma}, d_i sigma = 2 x_i / (1 - |x|^2)
        Tensor3 G(2);
        const Vec ds = 2.0 * x / (1.0 - x.squaredNorm());
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    G(k, i, j) = (k == i ? ds(j) : 0.0) + (k == j ? ds(i) : 0.0) - (i == j ? ds(k) : 0.0);
        return G;
    };
    m->flag_curvature = -1.0;
    m->sample_point = [](Rng& rng) { return sample_box(rng, 2, 0.35); };
    m->sample_velocity = [](Rng& rng, const Vec&) { return sample_nonzero(rng, 2); };
    return m;
}

MetricPtr randers(RandersBase base, const Vec& beta_in, const Mat& grad_in)
{
    Vec beta = beta_in;
    Mat grad = grad_in;
    if (beta.size() == 0) {
        beta = Vec(2);
        beta << 0.3, 0.0;
    }
    if (grad.size() == 0) {
        grad = Mat(2, 2);
        grad << 0.0, -0.2, 0.2, 0.0;
    }
    const int n = static_cast<int>(beta.size());
    if (grad.rows() != n || grad.cols() != n)
        fail(ErrorCode::invalid_argument, "randers: beta_grad must be n x n");
    const bool hyper = base == RandersBase::hyperbolic;
    if (hyper && n != 2) fail(ErrorCode::invalid_argument, "randers: hyperbolic base is two-dimensional");

    // a-norm of the one-form beta(x) = beta + grad x
    auto beta_norm = [beta, grad, hyper](const Vec& x) {
        const Vec b = beta + grad * x;
        return hyper ? b.norm() * (1.0 - x.squaredNorm()) / 2.0 : b.norm();
    };
    auto m = std::make_shared<MetricDefinition>();
    m->id = "randers";
    m->dim = n;
    m->chart_domain = [beta_norm, hyper](const Vec& x) {
        return (!hyper || x.squaredNorm() < 1.0) && beta_norm(x) < 1.0;
    };
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [beta, grad, hyper, n](std::span<const Jet> x, std::span<const Jet> v) {
        Jet a = dot(v, v);
        if (hyper) {
            const Jet w = 1.0 - dot(x, x);
            a = 4.0 * a / (w * w);
        }
        Jet b(0.0);
        for (int i = 0; i < n; ++i) {
            Jet bi(beta(i));
            for (int j = 0; j < n; ++j) bi += grad(i, j) * x[j];
            b += bi * v[i];
        }
        const Jet F = sqrt(a) + b;
        return F * F;
    };
    m->sample_point = [n, hyper](Rng& rng) { return sample_box(rng, n, hyper ? 0.35 : 0.5); };
    m->sample_velocity = [n](Rng& rng, const Vec&) { return sample_nonzero(rng, n); };
    return m;
}

MetricPtr funk()
{
    auto m = std::make_shared<MetricDefinition>();
    m->id = "funk";
    m->dim = 2;
    m->chart_domain = in_unit_disk;
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [](std::span<const Jet> x, std::span<const Jet> v) {
        const Jet xx = dot(x, x), vv = dot(v, v), xv = dot(x, v);
        const Jet F = (sqrt(vv - (xx * vv - xv * xv)) + xv) / (1.0 - xx);
        return F * F;
    };
    m->flag_curvature = -0.25;
    m->sample_point = [](Rng& rng) { return sample_box(rng, 2, 0.35); };
    m->sample_velocity = [](Rng& rng, const Vec&) { return sample_nonzero(rng, 2); };
    return m;
}

MetricPtr quartic(int n)
{
    if (n < 2) fail(ErrorCode::invalid_argument, "quartic: dimension must be at least 2");
    auto m = std::make_shared<MetricDefinition>();
    m->id = "quartic";
    m->dim = n;
    m->chart_domain = always;
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [](std::span<const Jet>, std::span<const Jet> v) {
        Jet acc(0.0);
        for (const auto& c : v) acc += pow(c, 4);
        return sqrt(acc);
    };
    m->flag_curvature = 0.0;
    m->sample_point = [n](Rng& rng) { return sample_box(rng, n, 1.0); };
    // stay away from the coordinate axes, where g degenerates
    m->sample_velocity = [n](Rng& rng, const Vec&) {
        Vec v(n);
        if (n == 2) {
            const double angle = rng.uniform(0.25, M_PI / 2 - 0.25) + (M_PI / 2) * rng.index(4);
            const double r = rng.uniform(0.5, 2.0);
            v << r * std::cos(angle), r * std::sin(angle);
            return v;
        }
        for (int i = 0; i < n; ++i) v(i) = (rng.uniform() < 0.5 ? -1.0 : 1.0) * rng.uniform(0.4, 1.2);
        return v;
    };
    return m;
}

MetricPtr broken()
{
    auto m = std::make_shared<MetricDefinition>();
    m->id = "broken";
    m->dim = 2;
    m->chart_domain = always;
    m->admissible = [](const Vec&, const Vec& v) { return v.squaredNorm() > 0.0; };
    m->lagrangian = [](std::span<const Jet>, std::span<const Jet> v) {
        return dot(v, v) + 0.25 * pow(v[0], 4);
    };
    m->sample_point = [](Rng& rng) { return sample_box(rng, 2, 1.0); };
    m->sample_velocity = [](Rng& rng, const Vec&) { return sample_nonzero(rng, 2, 0.5); };
    return m;
}

const std::vector<std::string>& ids()
{
    static const std::vector<std::string> all{"euclidean", "pseudo_euclidean", "sphere", "hyperbolic",
                                              "randers",   "funk",             "quartic"};
    return all;
}

MetricPtr by_id(const std::string& id)
{
    if (id == "euclidean") return euclidean();
    if (id == "pseudo_euclidean") return pseudo_euclidean();
    if (id == "sphere") return sphere();
    if (id == "hyperbolic") return hyperbolic();
    if (id == "randers") return randers();
    if (id == "funk") return funk();
    if (id == "quartic") return quartic();
    if (id == "broken") return broken();
    fail(ErrorCode::invalid_argument, "unknown metric id '" + id + "'");
}

} // namespace finsler::catalog
