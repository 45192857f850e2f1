#pragma once

#include <functional>
#include <string>

#include "finsler/metric.hpp"

namespace finsler {

// Immersion u in R^r -> x in the chart, evaluable on jets.
using PatchMap = std::function<std::vector<Jet>(std::span<const Jet> u)>;

class SubmanifoldPatch {
public:
    SubmanifoldPatch(std::string kind, int dim, int rank, PatchMap map, std::function<Vec(const Vec&)> guess);

    static SubmanifoldPatch point(const Vec& p);
    static SubmanifoldPatch line(const Vec& p, const Vec& direction);
    // p + basis * u; basis columns span the plane.
    static SubmanifoldPatch plane(const Vec& p, const Mat& basis);
    // p + u d + u^2 c / 2
    static SubmanifoldPatch parabola(const Vec& p, const Vec& d, const Vec& c);
    // center + radius (cos u, sin u)
    static SubmanifoldPatch circle(const Vec& center, double radius);
    // center + radius (sin u0 cos u1, sin u0 sin u1, cos u0)
    static SubmanifoldPatch sphere(const Vec& center, double radius);
    // (u, c0 + c1 u + c2 u^2 + ...)
    static SubmanifoldPatch graph(const std::vector<double>& coefficients);

    const std::string& kind() const noexcept { return kind_; }
    int dim() const noexcept { return n_; }
    int rank() const noexcept { return r_; }

    Vec position(const Vec& u) const;
    // n x r matrix of d x / d u^a; immersion rank is checked.
    Mat tangent(const Vec& u) const;
    // d^2 x / du^a du^b, entry a * r + b.
    std::vector<Vec> hessian(const Vec& u) const;
    // Parameter of the point x, raising endpoint_off_submanifold when x is not on the patch.
    Vec locate(const Vec& x, double tolerance = 1e-9) const;
    // Parameter coefficients of a tangent vector at u.
    Vec coefficients(const Vec& u, const Vec& U) const;

private:
    std::string kind_;
    int n_, r_;
    PatchMap map_;
    std::function<Vec(const Vec&)> guess_;
};

struct NormalCheck {
    bool normal = false;
    double residual = 0.0;
};

NormalCheck is_normal(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& v);

struct TanNor {
    Vec tan, nor;
};

// Y = tan + nor with tan tangent to P and nor g_N-orthogonal to it.
TanNor split_tan_nor(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N, const Vec& Y);

// g_N-normal vector near `guess` by damped Newton along guess + tangent combinations.
Vec find_normal(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& guess);

// S_N(U, W) = nor_N (nabla^N_U W); U, W tangent vectors in chart components.
Vec second_fundamental_form(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N,
                            const Vec& U, const Vec& W);

// S~_N(U) = tan_N (nabla^N_U N) for the normal section through N.
Vec normal_second_fundamental_form(const MetricDefinition& m, const SubmanifoldPatch& P, const Vec& u, const Vec& N,
                                   const Vec& U);

// Gram matrix of g_N on the tangent basis, with the nondegeneracy check.
Mat restricted_gram(const Mat& g, const Mat& E);

} // namespace finsler
