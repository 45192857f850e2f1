#pragma once

#include <span>
#include <vector>

#include "finsler/curves.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct SprayData {
    Vec G;
    Mat N; // N(i, j) = dG^i / dv^j
};

// Derived quantities of L at one point of the tangent bundle, all read off a
// single derivative table. Table order: 2 for g and G, 3 for N, Gamma and the
// Cartan tensor, 4 for derivatives of Gamma and for spray jets of order 2.
class PointGeometry {
public:
    PointGeometry(const MetricDefinition& m, const Vec& x, const Vec& v, int order = 3);

    int dim() const noexcept { return n_; }
    const Vec& x() const noexcept { return x_; }
    const Vec& v() const noexcept { return v_; }
    const DerivativeTable& table() const noexcept { return table_; }

    double L() const { return table_.value(); }
    Mat g() const;
    Vec G() const;
    Mat N() const;
    Tensor3 gamma() const;
    Tensor3 cartan() const;

    // Directional derivatives along (dx, dv) in tangent-bundle coordinates.
    Mat g_derivative(const Vec& dx, const Vec& dv) const;
    Tensor3 gamma_derivative(const Vec& dx, const Vec& dv) const;

    // G^i at z + sum_d eps_d seeds[d] as jets; seeds have length 2n.
    std::vector<Jet> spray_jet(std::span<const std::vector<double>> seeds, int order) const;
    // N as jets along seeds (at most three), order 1.
    std::vector<Jet> nonlinear_jet(std::span<const std::vector<double>> seeds) const;

private:
    int n_;
    Vec x_, v_;
    DerivativeTable table_;
};

SprayData spray(const MetricDefinition& m, const Vec& x, const Vec& v);
Tensor3 christoffel(const MetricDefinition& m, const Vec& x, const Vec& v);
// Spray coefficients without admissibility checks (integrator hot path).
Vec spray_unchecked(const MetricDefinition& m, const Vec& x, const Vec& v);

// D^W X = dX/dt + X^i xdot^j Gamma^k_ij(x, W)
Vec covariant_derivative(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& X,
                         const VectorFieldAlongCurve& W_ref, double t, Side side = Side::none);

// |d/dt g_W(X,Y) - g_W(DX,Y) - g_W(X,DY) - 2 C_W(DW,X,Y)|
double check_almost_g_compat(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& X,
                             const VectorFieldAlongCurve& Y, const VectorFieldAlongCurve& W_ref, double t,
                             Side side = Side::none);

} // namespace finsler
