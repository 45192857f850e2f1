#include "finsler/connection.hpp"

#include "algebra.hpp"

namespace finsler {

namespace {

std::span<const double> span_of(const Vec& a) { return {a.data(), static_cast<std::size_t>(a.size())}; }

std::vector<double> unit_seed(int n, int index)
{
    std::vector<double> s(2 * n, 0.0);
    s[index] = 1.0;
    return s;
}

std::vector<double> seed_of(const Vec& dx, const Vec& dv)
{
    const int n = static_cast<int>(dx.size());
    std::vector<double> s(2 * n);
    for (int i = 0; i < n; ++i) s[i] = dx(i), s[n + i] = dv(i);
    return s;
}

} // namespace

PointGeometry::PointGeometry(const MetricDefinition& m, const Vec& x, const Vec& v, int order)
    : n_(m.dim), x_(x), v_(v), table_(m.lagrangian, span_of(x), span_of(v), order)
{}

Mat PointGeometry::g() const
{
    Mat out(n_, n_);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) out(a, b) = 0.5 * table_.d(n_ + a, n_ + b);
    return out;
}

Vec PointGeometry::G() const
{
    const detail::PlainTable t{table_, v_, n_};
    return to_vec(detail::spray<double>(t));
}

Mat PointGeometry::N() const
{
    Mat out(n_, n_);
    for (int k = 0; k < n_; ++k) {
        const std::vector<std::vector<double>> seeds{unit_seed(n_, n_ + k)};
        const auto G = spray_jet(seeds, 1);
        for (int i = 0; i < n_; ++i) out(i, k) = G[i].first(0);
    }
    return out;
}

Tensor3 PointGeometry::gamma() const
{
    const Mat N = this->N();
    std::vector<double> Nflat(n_ * n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) Nflat[i * n_ + j] = N(i, j);
    const detail::PlainTable t{table_, v_, n_};
    const auto flat = detail::christoffel<double>(t, Nflat);
    Tensor3 out(n_);
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(k, i, j) = flat[(k * n_ + i) * n_ + j];
    return out;
}

Tensor3 PointGeometry::cartan() const
{
    Tensor3 out(n_);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            for (int c = 0; c < n_; ++c) out(a, b, c) = 0.25 * table_.d(n_ + a, n_ + b, n_ + c);
    return out;
}

Mat PointGeometry::g_derivative(const Vec& dx, const Vec& dv) const
{
    Mat out = Mat::Zero(n_, n_);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b) {
            double acc = 0.0;
            for (int c = 0; c < n_; ++c)
                acc += table_.d(n_ + a, n_ + b, c) * dx(c) + table_.d(n_ + a, n_ + b, n_ + c) * dv(c);
            out(a, b) = 0.5 * acc;
        }
    return out;
}

std::vector<Jet> PointGeometry::spray_jet(std::span<const std::vector<double>> seeds, int order) const
{
    const detail::JetTable t(table_, v_, seeds, order);
    return detail::spray<Jet>(t);
}

std::vector<Jet> PointGeometry::nonlinear_jet(std::span<const std::vector<double>> seeds) const
{
    const int p = static_cast<int>(seeds.size());
    std::vector<Jet> N(n_ * n_);
    for (int k = 0; k < n_; ++k) {
        std::vector<std::vector<double>> extended(seeds.begin(), seeds.end());
        extended.push_back(unit_seed(n_, n_ + k));
        const auto G = spray_jet(extended, 2);
        for (int i = 0; i < n_; ++i) N[i * n_ + k] = G[i].partial(p).drop_direction(p);
    }
    return N;
}

Tensor3 PointGeometry::gamma_derivative(const Vec& dx, const Vec& dv) const
{
    const std::vector<std::vector<double>> seeds{seed_of(dx, dv)};
    const auto N = nonlinear_jet(seeds);
    const detail::JetTable t(table_, v_, seeds, 1);
    const auto flat = detail::christoffel<Jet>(t, N);
    Tensor3 out(n_);
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) out(k, i, j) = flat[(k * n_ + i) * n_ + j].first(0);
    return out;
}

SprayData spray(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_admissible(m, x, v);
    const PointGeometry pg(m, x, v, 3);
    return {pg.G(), pg.N()};
}

Tensor3 christoffel(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    require_admissible(m, x, v);
    return PointGeometry(m, x, v, 3).gamma();
}

Vec spray_unchecked(const MetricDefinition& m, const Vec& x, const Vec& v)
{
    return PointGeometry(m, x, v, 2).G();
}

namespace {

struct AlongData {
    CurveJet c;
    FieldJet w;
};

AlongData reference_at(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& W_ref,
                       double t, Side side)
{
    AlongData d{curve.eval(t, side), W_ref.eval(t, side)};
    if (!is_admissible(m, d.c.x, d.w.value))
        fail(ErrorCode::inadmissible, "reference vector is not admissible", t);
    return d;
}

} // namespace

Vec covariant_derivative(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& X,
                         const VectorFieldAlongCurve& W_ref, double t, Side side)
{
    const AlongData d = reference_at(m, curve, W_ref, t, side);
    const FieldJet x = X.eval(t, side);
    const Tensor3 gamma = PointGeometry(m, d.c.x, d.w.value, 3).gamma();
    return x.deriv + gamma.contract(x.value, d.c.dx);
}

double check_almost_g_compat(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& X,
                             const VectorFieldAlongCurve& Y, const VectorFieldAlongCurve& W_ref, double t, Side side)
{
    const AlongData d = reference_at(m, curve, W_ref, t, side);
    const FieldJet x = X.eval(t, side), y = Y.eval(t, side);
    const PointGeometry pg(m, d.c.x, d.w.value, 3);
    const Mat g = pg.g();
    const Tensor3 gamma = pg.gamma();
    const Vec DX = x.deriv + gamma.contract(x.value, d.c.dx);
    const Vec DY = y.deriv + gamma.contract(y.value, d.c.dx);
    const Vec DW = d.w.deriv + gamma.contract(d.w.value, d.c.dx);
    // d/dt g_W(X,Y) along t -> (x(t), W(t))
    const Mat dg = pg.g_derivative(d.c.dx, d.w.deriv);
    const double lhs = x.value.dot(dg * y.value) + x.deriv.dot(g * y.value) + x.value.dot(g * y.deriv);
    const double rhs = DX.dot(g * y.value) + x.value.dot(g * DY) +
                       2.0 * pg.cartan().contract_last(DW).cwiseProduct(x.value * y.value.transpose()).sum();
    return std::abs(lhs - rhs);
}

} // namespace finsler
