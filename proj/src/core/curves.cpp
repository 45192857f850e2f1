#include "finsler/curves.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

CubicSpline::CubicSpline(std::vector<double> t, const std::vector<Vec>& y) : t_(std::move(t))
{
    const int count = static_cast<int>(t_.size());
    if (count < 2 || static_cast<int>(y.size()) != count)
        fail(ErrorCode::invalid_argument, "spline needs at least two samples with matching values");
    for (int i = 1; i < count; ++i)
        if (!(t_[i] > t_[i - 1])) fail(ErrorCode::invalid_argument, "spline sample times must increase");
    dim_ = static_cast<int>(y[0].size());
    const int N = count - 1;
    std::vector<double> h(N);
    std::vector<Vec> delta(N);
    for (int i = 0; i < N; ++i) {
        h[i] = t_[i + 1] - t_[i];
        delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    std::vector<Vec> s(count, Vec::Zero(dim_));
    if (N == 1) {
        s[0] = s[1] = delta[0];
    } else if (N == 2) {
        // the interpolating parabola
        const Vec c2 = (delta[1] - delta[0]) / (h[0] + h[1]);
        s[0] = delta[0] - c2 * h[0];
        s[1] = delta[0] + c2 * h[0];
        s[2] = delta[1] + c2 * h[1];
    } else {
        // tridiagonal system for the slopes with not-a-knot end rows
        std::vector<double> lo(count, 0.0), di(count, 0.0), up(count, 0.0);
        std::vector<Vec> rhs(count);
        di[0] = h[1];
        up[0] = h[0] + h[1];
        rhs[0] = ((h[0] + 2.0 * (h[0] + h[1])) * h[1] * delta[0] + h[0] * h[0] * delta[1]) / (h[0] + h[1]);
        for (int i = 1; i < N; ++i) {
            lo[i] = h[i];
            di[i] = 2.0 * (h[i - 1] + h[i]);
            up[i] = h[i - 1];
            rhs[i] = 3.0 * (h[i] * delta[i - 1] + h[i - 1] * delta[i]);
        }
        lo[N] = h[N - 1] + h[N - 2];
        di[N] = h[N - 2];
        rhs[N] = (h[N - 1] * h[N - 1] * delta[N - 2] + (2.0 * (h[N - 2] + h[N - 1]) + h[N - 1]) * h[N - 2] * delta[N - 1]) /
                 (h[N - 2] + h[N - 1]);
        for (int i = 1; i <= N; ++i) {
            const double w = lo[i] / di[i - 1];
            di[i] -= w * up[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        s[N] = rhs[N] / di[N];
        for (int i = N - 1; i >= 0; --i) s[i] = (rhs[i] - up[i] * s[i + 1]) / di[i];
    }
    coef_.resize(N);
    for (int i = 0; i < N; ++i) {
        Mat c(dim_, 4);
        c.col(0) = y[i];
        c.col(1) = s[i];
        c.col(2) = (3.0 * delta[i] - 2.0 * s[i] - s[i + 1]) / h[i];
        c.col(3) = (s[i] + s[i + 1] - 2.0 * delta[i]) / (h[i] * h[i]);
        coef_[i] = c;
    }
}

Vec CubicSpline::eval(double t, int derivative) const
{
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    int i = static_cast<int>(it - t_.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(coef_.size()) - 1);
    const double h = t - t_[i];
    const Mat& c = coef_[i];
    switch (derivative) {
    case 0: return c.col(0) + h * (c.col(1) + h * (c.col(2) + h * c.col(3)));
    case 1: return c.col(1) + h * (2.0 * c.col(2) + 3.0 * h * c.col(3));
    case 2: return 2.0 * c.col(2) + 6.0 * h * c.col(3);
    default: return Vec::Zero(dim_);
    }
}

namespace {

double knot_tolerance(const std::vector<double>& knots)
{
    return 1e-12 * std::max({1.0, std::abs(knots.front()), std::abs(knots.back())});
}

void check_knots(const std::vector<double>& knots, std::size_t segments)
{
    if (knots.size() < 2 || segments != knots.size() - 1)
        fail(ErrorCode::invalid_argument, "piecewise object needs knots.size() == segments + 1");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i] > knots[i - 1])) fail(ErrorCode::invalid_argument, "knots must be strictly increasing");
}

CurveJet curve_jet(const JetCurveFunction& f, double t)
{
    const auto xs = f(Jet::variable(t, 0, 1, 2));
    const int n = static_cast<int>(xs.size());
    CurveJet out{Vec(n), Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
        out.x(i) = xs[i].value();
        out.dx(i) = xs[i].first(0);
        out.ddx(i) = xs[i].mixed(0, 0);
    }
    return out;
}

FieldJet field_jet(const JetCurveFunction& f, double t)
{
    const auto ws = f(Jet::variable(t, 0, 1, 1));
    const int n = static_cast<int>(ws.size());
    FieldJet out{Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
        out.value(i) = ws[i].value();
        out.deriv(i) = ws[i].first(0);
    }
    return out;
}

// Splits sample indices at the break instants (each break must be a sample time).
std::vector<std::pair<int, int>> split_samples(const std::vector<double>& t, const std::vector<double>& breaks)
{
    std::vector<std::pair<int, int>> ranges;
    int start = 0;
    const double tol = 1e-12 * std::max({1.0, std::abs(t.front()), std::abs(t.back())});
    for (double br : breaks) {
        auto it = std::find_if(t.begin(), t.end(), [&](double s) { return std::abs(s - br) <= tol; });
        if (it == t.end()) fail(ErrorCode::invalid_argument, "break instant is not among the sample times");
        const int end = static_cast<int>(it - t.begin());
        if (end - start < 1) fail(ErrorCode::invalid_argument, "each segment needs at least two samples");
        ranges.emplace_back(start, end);
        start = end;
    }
    if (static_cast<int>(t.size()) - 1 - start < 1)
        fail(ErrorCode::invalid_argument, "each segment needs at least two samples");
    ranges.emplace_back(start, static_cast<int>(t.size()) - 1);
    return ranges;
}

} // namespace

bool matches_knot(const std::vector<double>& knots, double t)
{
    const double tol = knot_tolerance(knots);
    for (std::size_t k = 1; k + 1 < knots.size(); ++k)
        if (std::abs(t - knots[k]) <= tol) return true;
    return false;
}

int locate_segment(const std::vector<double>& knots, double t, Side side)
{
    const double tol = knot_tolerance(knots);
    const int segments = static_cast<int>(knots.size()) - 1;
    if (!(t >= knots.front() - tol && t <= knots.back() + tol))
        fail(ErrorCode::invalid_argument, "instant " + std::to_string(t) + " outside the curve interval");
    for (int k = 1; k < segments; ++k) {
        if (std::abs(t - knots[k]) <= tol) {
            if (side == Side::left) return k - 1;
            if (side == Side::right) return k;
            fail(ErrorCode::break_ambiguity, "evaluation at a break requires a side", t);
        }
    }
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    return std::clamp(static_cast<int>(it - knots.begin()) - 1, 0, segments - 1);
}

PiecewiseCurve::PiecewiseCurve(std::vector<double> knots, std::vector<Segment> segments)
    : knots_(std::move(knots)), segments_(std::move(segments))
{
    check_knots(knots_, segments_.size());
}

PiecewiseCurve PiecewiseCurve::smooth(double a, double b, Segment segment)
{
    return PiecewiseCurve({a, b}, {std::move(segment)});
}

PiecewiseCurve PiecewiseCurve::from_function(const JetCurveFunction& f, double a, double b)
{
    return smooth(a, b, [f](double t) { return curve_jet(f, t); });
}

PiecewiseCurve PiecewiseCurve::from_functions(const std::vector<JetCurveFunction>& f, std::vector<double> knots)
{
    std::vector<Segment> segs;
    for (const auto& fi : f) segs.push_back([fi](double t) { return curve_jet(fi, t); });
    return PiecewiseCurve(std::move(knots), std::move(segs));
}

PiecewiseCurve PiecewiseCurve::from_samples(const std::vector<double>& t, const std::vector<Vec>& x,
                                            const std::vector<double>& breaks)
{
    if (t.size() != x.size() || t.size() < 2) fail(ErrorCode::invalid_argument, "curve samples mismatch");
    std::vector<double> knots{t.front()};
    std::vector<Segment> segs;
    for (auto [lo, hi] : split_samples(t, breaks)) {
        auto spline = std::make_shared<CubicSpline>(std::vector<double>(t.begin() + lo, t.begin() + hi + 1),
                                                    std::vector<Vec>(x.begin() + lo, x.begin() + hi + 1));
        segs.push_back([spline](double s) { return CurveJet{spline->eval(s, 0), spline->eval(s, 1), spline->eval(s, 2)}; });
        knots.push_back(t[hi]);
    }
    return PiecewiseCurve(std::move(knots), std::move(segs));
}

int PiecewiseCurve::dim() const { return static_cast<int>(segments_.front()(a()).x.size()); }

bool PiecewiseCurve::is_break(double t) const { return matches_knot(knots_, t); }

int PiecewiseCurve::segment_at(double t, Side side) const { return locate_segment(knots_, t, side); }

CurveJet PiecewiseCurve::eval(double t, Side side) const { return segments_[segment_at(t, side)](t); }

Vec PiecewiseCurve::position(double t) const { return eval(t, is_break(t) ? Side::left : Side::none).x; }

VectorFieldAlongCurve::VectorFieldAlongCurve(std::vector<double> knots, std::vector<Segment> segments)
    : knots_(std::move(knots)), segments_(std::move(segments))
{
    check_knots(knots_, segments_.size());
}

VectorFieldAlongCurve VectorFieldAlongCurve::constant(const Vec& w, double a, double b)
{
    return VectorFieldAlongCurve({a, b}, {[w](double) { return FieldJet{w, Vec::Zero(w.size())}; }});
}

VectorFieldAlongCurve VectorFieldAlongCurve::from_function(const JetCurveFunction& f, double a, double b)
{
    return VectorFieldAlongCurve({a, b}, {[f](double t) { return field_jet(f, t); }});
}

VectorFieldAlongCurve VectorFieldAlongCurve::from_functions(const std::vector<JetCurveFunction>& f,
                                                            std::vector<double> knots)
{
    std::vector<Segment> segs;
    for (const auto& fi : f) segs.push_back([fi](double t) { return field_jet(fi, t); });
    return VectorFieldAlongCurve(std::move(knots), std::move(segs));
}

VectorFieldAlongCurve VectorFieldAlongCurve::from_samples(const std::vector<double>& t, const std::vector<Vec>& w,
                                                          const std::vector<double>& breaks)
{
    if (t.size() != w.size() || t.size() < 2) fail(ErrorCode::invalid_argument, "field samples mismatch");
    std::vector<double> knots{t.front()};
    std::vector<Segment> segs;
    for (auto [lo, hi] : split_samples(t, breaks)) {
        auto spline = std::make_shared<CubicSpline>(std::vector<double>(t.begin() + lo, t.begin() + hi + 1),
                                                    std::vector<Vec>(w.begin() + lo, w.begin() + hi + 1));
        segs.push_back([spline](double s) { return FieldJet{spline->eval(s, 0), spline->eval(s, 1)}; });
        knots.push_back(t[hi]);
    }
    return VectorFieldAlongCurve(std::move(knots), std::move(segs));
}

VectorFieldAlongCurve VectorFieldAlongCurve::velocity_of(const PiecewiseCurve& curve)
{
    std::vector<Segment> segs;
    for (int k = 0; k < curve.segment_count(); ++k)
        segs.push_back([curve, k](double t) {
            const CurveJet c = curve.eval_segment(k, t);
            return FieldJet{c.dx, c.ddx};
        });
    return VectorFieldAlongCurve(curve.knots(), std::move(segs));
}

bool VectorFieldAlongCurve::is_break(double t) const { return matches_knot(knots_, t); }

int VectorFieldAlongCurve::segment_at(double t, Side side) const { return locate_segment(knots_, t, side); }

FieldJet VectorFieldAlongCurve::eval(double t, Side side) const { return segments_[segment_at(t, side)](t); }

VectorFieldAlongCurve VectorFieldAlongCurve::scaled(const std::function<Jet(const Jet&)>& f) const
{
    std::vector<Segment> segs;
    for (const auto& seg : segments_)
        segs.push_back([seg, f](double t) {
            const Jet s = f(Jet::variable(t, 0, 1, 1));
            const FieldJet w = seg(t);
            return FieldJet{s.value() * w.value, s.first(0) * w.value + s.value() * w.deriv};
        });
    return VectorFieldAlongCurve(knots_, std::move(segs));
}

VectorFieldAlongCurve VectorFieldAlongCurve::plus(const VectorFieldAlongCurve& other) const
{
    if (other.knots_.size() != knots_.size())
        fail(ErrorCode::invalid_argument, "fields have different breaks");
    std::vector<Segment> segs;
    for (std::size_t k = 0; k < segments_.size(); ++k)
        segs.push_back([lhs = segments_[k], rhs = other.segments_[k]](double t) {
            const FieldJet p = lhs(t), q = rhs(t);
            return FieldJet{p.value + q.value, p.deriv + q.deriv};
        });
    return VectorFieldAlongCurve(knots_, std::move(segs));
}

} // namespace finsler
