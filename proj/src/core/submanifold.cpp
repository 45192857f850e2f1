#include "finsler/submanifold.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "finsler/connection.hpp"

namespace finsler {

namespace {

std::vector<Jet> eval_map(const PatchMap& map, const Vec& u, int order)
{
    const int r = static_cast<int>(u.size());
    std::vector<Jet> uj;
    for (int a = 0; a < r; ++a) uj.push_back(Jet::variable(u(a), a, r, order));
    return map(uj);
}

void require_normal(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N)
{
    const NormalCheck c = is_normal(m, P, u, N);
    if (!c.normal) fail(ErrorCode::orthogonality_violation, "reference vector is not normal to the submanifold");
}

Vec gamma_contract(const Tensor3& gamma, const Vec& Y, const Vec& X) { return gamma.contract(Y, X); }

} // namespace

SubmanifoldPatch::SubmanifoldPatch(std::string kind, int dim, int rank, PatchMap map, std::function<Vec(const Vec&)> guess)
    : kind_(std::move(kind)), n_(dim), r_(rank), map_(std::move(map)), guess_(std::move(guess))
{
    if (r_ < 0 || r_ > n_ || r_ > JetLayout::kMaxDirections) fail(ErrorCode::invalid_argument, "bad patch dimension");
}

SubmanifoldPatch SubmanifoldPatch::point(const Vec& p)
{
    const int n = static_cast<int>(p.size());
    return SubmanifoldPatch(
        "point", n, 0,
        [p, n](std::span<const Jet>) {
            std::vector<Jet> out;
            for (int i = 0; i < n; ++i) out.push_back(Jet(p(i)));
            return out;
        },
        [](const Vec&) { return Vec(0); });
}

SubmanifoldPatch SubmanifoldPatch::line(const Vec& p, const Vec& d)
{
    Mat basis(p.size(), 1);
    basis.col(0) = d;
    SubmanifoldPatch out = plane(p, basis);
    out.kind_ = "line";
    return out;
}

SubmanifoldPatch SubmanifoldPatch::plane(const Vec& p, const Mat& basis)
{
    const int n = static_cast<int>(p.size()), r = static_cast<int>(basis.cols());
    if (basis.rows() != n) fail(ErrorCode::invalid_argument, "plane basis dimension mismatch");
    return SubmanifoldPatch(
        "plane", n, r,
        [p, basis, n, r](std::span<const Jet> u) {
            std::vector<Jet> out;
            for (int i = 0; i < n; ++i) {
                Jet xi(p(i));
                for (int a = 0; a < r; ++a) xi += basis(i, a) * u[a];
                out.push_back(xi);
            }
            return out;
        },
        [p, basis](const Vec& x) -> Vec { return basis.colPivHouseholderQr().solve(x - p); });
}

SubmanifoldPatch SubmanifoldPatch::parabola(const Vec& p, const Vec& d, const Vec& c)
{
    const int n = static_cast<int>(p.size());
    if (d.size() != n || c.size() != n) fail(ErrorCode::invalid_argument, "parabola dimension mismatch");
    return SubmanifoldPatch(
        "parabola", n, 1,
        [p, d, c, n](std::span<const Jet> u) {
            std::vector<Jet> out;
            for (int i = 0; i < n; ++i) out.push_back(p(i) + d(i) * u[0] + 0.5 * c(i) * u[0] * u[0]);
            return out;
        },
        [p, d](const Vec& x) {
            Vec u(1);
            u(0) = d.dot(x - p) / d.squaredNorm();
            return u;
        });
}

SubmanifoldPatch SubmanifoldPatch::circle(const Vec& c, double radius)
{
    if (c.size() != 2) fail(ErrorCode::invalid_argument, "circle needs a planar chart");
    return SubmanifoldPatch(
        "circle", 2, 1,
        [c, radius](std::span<const Jet> u) { return std::vector<Jet>{c(0) + radius * cos(u[0]), c(1) + radius * sin(u[0])}; },
        [c](const Vec& x) {
            Vec u(1);
            u(0) = std::atan2(x(1) - c(1), x(0) - c(0));
            return u;
        });
}

SubmanifoldPatch SubmanifoldPatch::sphere(const Vec& c, double radius)
{
    if (c.size() != 3) fail(ErrorCode::invalid_argument, "sphere patch needs a 3d chart");
    return SubmanifoldPatch(
        "sphere", 3, 2,
        [c, radius](std::span<const Jet> u) {
            const Jet s = sin(u[0]);
            return std::vector<Jet>{c(0) + radius * s * cos(u[1]), c(1) + radius * s * sin(u[1]), c(2) + radius * cos(u[0])};
        },
        [c](const Vec& x) {
            const Vec d = x - c;
            Vec u(2);
            u(0) = std::acos(std::clamp(d(2) / d.norm(), -1.0, 1.0));
            u(1) = std::atan2(d(1), d(0));
            return u;
        });
}

SubmanifoldPatch SubmanifoldPatch::graph(const std::vector<double>& coefficients)
{
    return SubmanifoldPatch(
        "graph", 2, 1,
        [coefficients](std::span<const Jet> u) {
            Jet y(0.0);
            for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * u[0] + *it;
            return std::vector<Jet>{u[0], y};
        },
        [](const Vec& x) {
            Vec u(1);
            u(0) = x(0);
            return u;
        });
}

Vec SubmanifoldPatch::position(const Vec& u) const
{
    if (u.size() != r_) fail(ErrorCode::invalid_argument, "parameter dimension mismatch");
    const auto x = eval_map(map_, u, 0);
    Vec out(n_);
    for (int i = 0; i < n_; ++i) out(i) = x[i].value();
    return out;
}

Mat SubmanifoldPatch::tangent(const Vec& u) const
{
    if (u.size() != r_) fail(ErrorCode::invalid_argument, "parameter dimension mismatch");
    Mat E(n_, r_);
    if (r_ == 0) return E;
    const auto x = eval_map(map_, u, 1);
    for (int i = 0; i < n_; ++i)
        for (int a = 0; a < r_; ++a) E(i, a) = x[i].first(a);
    const Eigen::JacobiSVD<Mat> svd(E);
    const auto& s = svd.singularValues();
    if (s(r_ - 1) < 1e-9 * std::max(1.0, s(0))) fail(ErrorCode::invalid_argument, "patch is not an immersion here");
    return E;
}

std::vector<Vec> SubmanifoldPatch::hessian(const Vec& u) const
{
    std::vector<Vec> out(r_ * r_, Vec::Zero(n_));
    if (r_ == 0) return out;
    const auto x = eval_map(map_, u, 2);
    for (int a = 0; a < r_; ++a)
        for (int b = 0; b < r_; ++b)
            for (int i = 0; i < n_; ++i) out[a * r_ + b](i) = x[i].mixed(a, b);
    return out;
}

Vec SubmanifoldPatch::locate(const Vec& x, double tolerance) const
{
    if (x.size() != n_) fail(ErrorCode::invalid_argument, "point dimension mismatch");
    Vec u = guess_(x);
    for (int it = 0; it < 50 && r_ > 0; ++it) {
        const Mat E = tangent(u);
        const Vec du = (E.transpose() * E).ldlt().solve(E.transpose() * (x - position(u)));
        u += du;
        if (du.norm() < 1e-15 * (1.0 + u.norm())) break;
    }
    const double dist = (position(u) - x).norm();
    if (!(dist <= tolerance)) fail(ErrorCode::endpoint_off_submanifold, "point is not on the submanifold");
    return u;
}

Vec SubmanifoldPatch::coefficients(const Vec& u, const Vec& U) const
{
    const Mat E = tangent(u);
    if (r_ == 0) {
        if (U.norm() > 1e-8 * (1.0 + U.norm())) fail(ErrorCode::invalid_argument, "vector is not tangent to the submanifold");
        return Vec(0);
    }
    const Vec c = (E.transpose() * E).ldlt().solve(E.transpose() * U);
    if ((E * c - U).norm() > 1e-8 * (1.0 + U.norm())) fail(ErrorCode::invalid_argument, "vector is not tangent to the submanifold");
    return c;
}

NormalCheck is_normal(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& v)
{
    const Vec x = P.position(u);
    const Mat g = fundamental_tensor(m, x, v);
    const Mat E = P.tangent(u);
    NormalCheck out;
    double scale = 0.0;
    for (int a = 0; a < P.rank(); ++a) {
        out.residual = std::max(out.residual, std::abs(v.dot(g * E.col(a))));
        scale = std::max(scale, g.norm() * v.norm() * E.col(a).norm());
    }
    out.normal = out.residual <= 1e-9 * std::max(scale, 1e-300) || P.rank() == 0;
    return out;
}

Mat restricted_gram(const Mat& g, const Mat& E)
{
    const Mat gram = E.transpose() * g * E;
    if (gram.size() > 0 && is_degenerate(gram))
        fail(ErrorCode::degenerate_restriction, "fundamental tensor restricted to the submanifold is degenerate");
    return gram;
}

TanNor split_tan_nor(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N, const Vec& Y)
{
    const Vec x = P.position(u);
    const Mat g = fundamental_tensor(m, x, N);
    const Mat E = P.tangent(u);
    TanNor out;
    if (P.rank() == 0) {
        out.tan = Vec::Zero(Y.size());
        out.nor = Y;
        return out;
    }
    const Mat gram = restricted_gram(g, E);
    out.tan = E * gram.lu().solve(E.transpose() * (g * Y));
    out.nor = Y - out.tan;
    return out;
}

Vec find_normal(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& guess)
{
    const Vec x = P.position(u);
    const Mat E = P.tangent(u);
    if (P.rank() == 0) return guess;
    auto residual = [&](const Vec& v) -> Vec { return E.transpose() * (fundamental_tensor(m, x, v) * v); };
    Vec v = guess;
    require_admissible(m, x, v);
    Vec F = residual(v);
    for (int it = 0; it < 100; ++it) {
        const double scale = std::max(1e-300, fundamental_tensor(m, x, v).norm() * v.norm() * E.norm());
        if (F.norm() <= 1e-12 * scale) {
            return v * (guess.norm() / v.norm());
        }
        const Mat gram = restricted_gram(fundamental_tensor(m, x, v), E);
        const Vec step = -E * gram.lu().solve(F);
        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, lambda *= 0.5) {
            const Vec trial = v + lambda * step;
            if (!is_admissible(m, x, trial)) continue;
            const Vec Ft = residual(trial);
            if (Ft.norm() < F.norm()) {
                v = trial;
                F = Ft;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    const double scale = std::max(1e-300, fundamental_tensor(m, x, v).norm() * v.norm() * E.norm());
    if (F.norm() <= 1e-10 * scale) return v * (guess.norm() / v.norm());
    fail(ErrorCode::no_normal_section, "no normal vector found near the initial direction");
}

Vec second_fundamental_form(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N,
                            const Vec& U, const Vec& W)
{
    require_normal(m, P, u, N);
    const int r = P.rank();
    if (r == 0) return Vec::Zero(P.dim());
    const Vec a = P.coefficients(u, U), b = P.coefficients(u, W);
    const auto H = P.hessian(u);
    Vec acc = Vec::Zero(P.dim());
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) acc += a(i) * b(j) * H[i * r + j];
    const PointGeometry pg(m, P.position(u), N, 3);
    acc += gamma_contract(pg.gamma(), W, U);
    return split_tan_nor(m, P, u, N, acc).nor;
}

Vec normal_second_fundamental_form(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N,
                                   const Vec& U)
{
    require_normal(m, P, u, N);
    const int r = P.rank();
    if (r == 0) return Vec::Zero(P.dim());
    const Vec a = P.coefficients(u, U);
    const Mat E = P.tangent(u);
    const auto H = P.hessian(u);
    const PointGeometry pg(m, P.position(u), N, 3);
    const Mat g = pg.g();
    const Mat gram = restricted_gram(g, E);
    // section N(u) = N + E(u) c(u) with g_N(N, e_a) = 0; differentiate implicitly
    const Mat dg = pg.g_derivative(U, Vec::Zero(P.dim()));
    Vec h(r);
    for (int b = 0; b < r; ++b) {
        Vec de = Vec::Zero(P.dim());
        for (int i = 0; i < r; ++i) de += a(i) * H[i * r + b];
        h(b) = N.dot(dg * E.col(b)) + N.dot(g * de);
    }
    const Vec dN = -E * gram.lu().solve(h);
    const Vec nabla = dN + gamma_contract(pg.gamma(), N, U);
    return split_tan_nor(m, P, u, N, nabla).tan;
}

} // namespace finsler
