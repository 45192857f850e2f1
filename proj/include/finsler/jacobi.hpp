#pragma once

#include <memory>

#include "finsler/geodesic.hpp"
#include "finsler/metric.hpp"
#include "finsler/submanifold.hpp"

namespace finsler {

// Jacobi fields co-integrated with their geodesic and a parallel frame E
// (E(a) = identity). In frame coordinates J = E y the equation reads
// y'' = E^-1 A E y, with A the spray-route Jacobi operator.
class JacobiSet {
public:
    JacobiSet(const MetricDefinition& m, const GeodesicRecord& geodesic, const Mat& J0, const Mat& dJ0,
              const IntegratorOptions& opts = {});

    int dim() const noexcept { return n_; }
    int count() const noexcept { return k_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    const Vec& x0() const noexcept { return x0_; }
    const Vec& v0() const noexcept { return v0_; }
    const MetricDefinition& metric() const noexcept { return metric_; }
    const OdeSolution& solution() const noexcept { return sol_; }

    // geodesic position, velocity, acceleration from the co-integrated state
    CurveJet base(double t) const;
    Mat frame(double t) const;
    // columns J_i(t) and their covariant derivatives
    Mat values(double t) const;
    Mat derivatives(double t) const;

private:
    MetricDefinition metric_;
    int n_, k_;
    double a_, b_;
    Vec x0_, v0_;
    OdeSolution sol_;
};

class JacobiField {
public:
    JacobiField(std::shared_ptr<const JacobiSet> set, int index) : set_(std::move(set)), index_(index) {}

    const JacobiSet& set() const { return *set_; }
    double a() const { return set_->a(); }
    double b() const { return set_->b(); }
    Vec value(double t) const { return set_->values(t).col(index_); }
    Vec derivative(double t) const { return set_->derivatives(t).col(index_); }
    // as a field along the geodesic, with chart derivative
    VectorFieldAlongCurve as_field() const;

private:
    std::shared_ptr<const JacobiSet> set_;
    int index_;
};

std::shared_ptr<const JacobiSet> solve_jacobi_set(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                                  const Mat& J0, const Mat& dJ0, const IntegratorOptions& opts = {});
JacobiField solve_jacobi(const MetricDefinition& m, const GeodesicRecord& geodesic, const Vec& J0, const Vec& dJ0,
                         const IntegratorOptions& opts = {});

// Geodesic record for a curve that must already be a geodesic.
GeodesicRecord as_geodesic(const MetricDefinition& m, const PiecewiseCurve& curve, double tolerance = 1e-6,
                           const IntegratorOptions& opts = {});

// r fields with J(a) = e_a, J'(a) = S~(e_a), then n - r with J(a) = 0 and
// J'(a) spanning the g-normal complement of T P.
std::vector<JacobiField> p_jacobi_basis(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                        const SubmanifoldPatch& P, const IntegratorOptions& opts = {});

struct CriticalInstant {
    double t = 0.0;
    int multiplicity = 0;
};

struct DeterminantScan {
    std::vector<double> t, det;
    std::vector<CriticalInstant> zeros;
};

// Zeros of det[J_1 ... J_n](t) for t > a.
DeterminantScan scan_determinant(const JacobiSet& set);

std::vector<CriticalInstant> conjugate_points(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                              const IntegratorOptions& opts = {});
std::vector<CriticalInstant> focal_points(const MetricDefinition& m, const GeodesicRecord& geodesic,
                                          const SubmanifoldPatch& P, const IntegratorOptions& opts = {});

struct WronskianReport {
    std::vector<double> t, value;
    double drift = 0.0;
};

// g(J1, J2') - g(J1', J2) along the common geodesic.
WronskianReport wronskian(const JacobiField& J1, const JacobiField& J2, int samples = 200);

// d exp_p(v)[w] = J(1) with J(0) = 0, J'(0) = w
Vec dexp(const MetricDefinition& m, const Vec& p, const Vec& v, const Vec& w, const IntegratorOptions& opts = {});

struct OrthogonalityReport {
    double affine_deviation = 0.0;
    double tan_residual = 0.0;
    double nor_residual = 0.0;
    double commutation_residual = 0.0;
};

OrthogonalityReport orthogonality_report(const JacobiField& J, int samples = 100);

} // namespace finsler
