#pragma once

#include <optional>

#include "finsler/curves.hpp"
#include "finsler/metric.hpp"
#include "finsler/submanifold.hpp"

namespace finsler {

// E = 1/2 int_a^b L(gammadot) dt
double energy(const MetricDefinition& m, const PiecewiseCurve& curve);

// Components of the covector w -> g_v(v, w).
Vec legendre(const MetricDefinition& m, const Vec& x, const Vec& v);

// dE/ds at s = 0 for any variation with field W, Legendre jumps at breaks included.
double first_variation(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& W);

// max |D gammadot gammadot| over `samples` points per segment
double geodesic_residual(const MetricDefinition& m, const PiecewiseCurve& curve, int samples = 50);

// d^2E/ds^2 at s = 0 along a geodesic. Without a transverse acceleration the
// chart-linear variation gamma + s W is assumed, whose transverse acceleration is Gamma(W, W).
double second_variation(const MetricDefinition& m, const PiecewiseCurve& geodesic, const VectorFieldAlongCurve& W,
                        const std::optional<VectorFieldAlongCurve>& transverse = std::nullopt,
                        double geodesic_tolerance = 1e-6);

struct CriticalReport {
    double geodesic_residual = 0.0;
    double legendre_jump = 0.0;
    double orthogonality_a = 0.0;
    double orthogonality_b = 0.0;
    double tolerance = 0.0;
    bool critical = false;
};

CriticalReport critical_point_test(const MetricDefinition& m, const PiecewiseCurve& curve, const SubmanifoldPatch& P,
                                   const SubmanifoldPatch& Q, int samples = 50, double tolerance = 1e-6);

// (P, Q)-index form; S^P enters at a and S^Q at b.
double index_form(const MetricDefinition& m, const PiecewiseCurve& geodesic, const SubmanifoldPatch& P,
                  const SubmanifoldPatch& Q, const VectorFieldAlongCurve& V, const VectorFieldAlongCurve& W,
                  double geodesic_tolerance = 1e-6);

} // namespace finsler
