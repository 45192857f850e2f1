#pragma once

#include <functional>

#include "finsler/connection.hpp"
#include "finsler/curves.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// Spray curvature R^i_k (Jacobi equation J'' + R J = 0 in this convention).
Mat spray_curvature(const PointGeometry& pg);
Mat spray_curvature(const MetricDefinition& m, const Vec& x, const Vec& v);

// Matrix A with A w = R^gamma(v, w) v, so that Jacobi fields obey J'' = A J.
Mat jacobi_operator_spray(const MetricDefinition& m, const Vec& x, const Vec& v);

// Two-parameter map (t, s) -> chart, and fields over it, evaluable on jets.
using SurfaceFunction = std::function<std::vector<Jet>(const Jet& t, const Jet& s)>;

// R^Lambda(Z) = D_t D_s Z - D_s D_t Z at (t, 0), reference Lambda_t,
// computed by differentiating the covariant derivatives through jets.
Vec curvature_of_variation(const MetricDefinition& m, const SurfaceFunction& Lambda, const SurfaceFunction& Z, double t);

enum class VariationKind { linear, quadratic };

// R^gamma(gammadot, W) Z from the chart-linear variation gamma + s W
// (quadratic: gamma + s W + s^2 W), Z extended constant in s.
Vec jacobi_operator_variational(const MetricDefinition& m, const PiecewiseCurve& curve, const VectorFieldAlongCurve& W,
                                const VectorFieldAlongCurve& Z, double t, VariationKind kind = VariationKind::linear,
                                Side side = Side::none);

// K_v(w) by the spray route.
double flag_curvature(const MetricDefinition& m, const Vec& x, const Vec& v, const Vec& w);
// K_v(w) with numerator g_v(R^gamma(v, W) W, v) from the variational route.
double flag_curvature_variational(const MetricDefinition& m, const Vec& x, const Vec& v, const Vec& w);

// L(v) g_v(w,w) - g_v(v,w)^2, raising degenerate_flag when it vanishes.
double flag_denominator(const Mat& g, double L, const Vec& v, const Vec& w);

} // namespace finsler
