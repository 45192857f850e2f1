#pragma once

#include <memory>

#include "finsler/curves.hpp"
#include "finsler/metric.hpp"
#include "finsler/ode.hpp"

namespace finsler {

// Integrated geodesic. Position is a quintic Hermite interpolant of
// (x, xdot, xddot) at the accepted steps; velocity and acceleration are its
// derivatives.
class GeodesicRecord {
public:
    GeodesicRecord() = default;
    GeodesicRecord(std::shared_ptr<const OdeSolution> solution, double a, double b);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    int dim() const { return static_cast<int>(solution_->y.front().size() / 2); }
    const OdeSolution& solution() const { return *solution_; }

    CurveJet eval(double t) const;
    Vec position(double t) const { return eval(t).x; }
    Vec velocity(double t) const { return eval(t).dx; }
    PiecewiseCurve curve() const;

    double energy = 0.0;
    double drift = 0.0;
    double L0 = 0.0;

private:
    std::shared_ptr<const OdeSolution> solution_;
    double a_ = 0.0, b_ = 0.0;
};

GeodesicRecord integrate_geodesic(const MetricDefinition& m, const Vec& x0, const Vec& v0, double a, double b,
                                  const IntegratorOptions& opts = {});

Vec exponential_map(const MetricDefinition& m, const Vec& p, const Vec& v, const IntegratorOptions& opts = {});

// D X = 0 along each smooth segment with reference xdot; continuous at breaks.
VectorFieldAlongCurve parallel_transport(const MetricDefinition& m, const PiecewiseCurve& curve, const Vec& w0,
                                         const IntegratorOptions& opts = {});

// Guard used by every integrator that carries a tangent vector.
bool admissible_state(const MetricDefinition& m, const Vec& x, const Vec& v);

} // namespace finsler
