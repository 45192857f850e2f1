#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "finsler/jets.hpp"
#include "finsler/linalg.hpp"

namespace finsler {

enum class Side { none, left, right };

// Not-a-knot cubic spline through vector-valued samples.
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> t, const std::vector<Vec>& y);

    int dim() const noexcept { return dim_; }
    double front() const { return t_.front(); }
    double back() const { return t_.back(); }
    // derivative order 0, 1, 2
    Vec eval(double t, int derivative = 0) const;

private:
    std::vector<double> t_;
    int dim_ = 0;
    // per interval and component: a + b h + c h^2 + d h^3
    std::vector<Mat> coef_;
};

struct CurveJet {
    Vec x, dx, ddx;
};

// Jet-valued parametrisation t -> x(t) for analytic curves and fields.
using JetCurveFunction = std::function<std::vector<Jet>(const Jet& t)>;

// Continuous, piecewise-smooth curve with explicit break instants.
class PiecewiseCurve {
public:
    using Segment = std::function<CurveJet(double t)>;

    PiecewiseCurve() = default;
    // knots = a, t_1, ..., t_h, b; one segment per interval (evaluable on its closure)
    PiecewiseCurve(std::vector<double> knots, std::vector<Segment> segments);

    static PiecewiseCurve smooth(double a, double b, Segment segment);
    static PiecewiseCurve from_function(const JetCurveFunction& f, double a, double b);
    static PiecewiseCurve from_functions(const std::vector<JetCurveFunction>& f, std::vector<double> knots);
    // samples include the break instants; each segment gets its own spline
    static PiecewiseCurve from_samples(const std::vector<double>& t, const std::vector<Vec>& x,
                                       const std::vector<double>& breaks = {});

    double a() const { return knots_.front(); }
    double b() const { return knots_.back(); }
    int dim() const;
    const std::vector<double>& knots() const noexcept { return knots_; }
    std::vector<double> breaks() const { return {knots_.begin() + 1, knots_.end() - 1}; }
    int segment_count() const { return static_cast<int>(segments_.size()); }

    bool is_break(double t) const;
    // segment index for t; at a break the side decides, otherwise break_ambiguity
    int segment_at(double t, Side side = Side::none) const;
    CurveJet eval(double t, Side side = Side::none) const;
    CurveJet eval_segment(int segment, double t) const { return segments_[segment](t); }
    Vec position(double t) const;

private:
    std::vector<double> knots_;
    std::vector<Segment> segments_;
};

struct FieldJet {
    Vec value, deriv;
};

class VectorFieldAlongCurve {
public:
    using Segment = std::function<FieldJet(double t)>;

    VectorFieldAlongCurve() = default;
    VectorFieldAlongCurve(std::vector<double> knots, std::vector<Segment> segments);

    static VectorFieldAlongCurve constant(const Vec& w, double a, double b);
    static VectorFieldAlongCurve from_function(const JetCurveFunction& f, double a, double b);
    static VectorFieldAlongCurve from_functions(const std::vector<JetCurveFunction>& f, std::vector<double> knots);
    static VectorFieldAlongCurve from_samples(const std::vector<double>& t, const std::vector<Vec>& w,
                                              const std::vector<double>& breaks = {});
    // velocity field of a curve
    static VectorFieldAlongCurve velocity_of(const PiecewiseCurve& curve);

    double a() const { return knots_.front(); }
    double b() const { return knots_.back(); }
    const std::vector<double>& knots() const noexcept { return knots_; }
    bool is_break(double t) const;
    int segment_at(double t, Side side = Side::none) const;
    FieldJet eval(double t, Side side = Side::none) const;
    FieldJet eval_segment(int segment, double t) const { return segments_[segment](t); }

    // f(t) * W(t), with f given as a jet function of t
    VectorFieldAlongCurve scaled(const std::function<Jet(const Jet&)>& f) const;
    VectorFieldAlongCurve plus(const VectorFieldAlongCurve& other) const;

private:
    std::vector<double> knots_;
    std::vector<Segment> segments_;
};

// Shared segment lookup with a relative break tolerance.
int locate_segment(const std::vector<double>& knots, double t, Side side);
bool matches_knot(const std::vector<double>& knots, double t);

} // namespace finsler
