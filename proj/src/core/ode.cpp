#include "finsler/ode.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

Vec hermite(double t0, const Vec& y0, const Vec& f0, double t1, const Vec& y1, const Vec& f1, double s)
{
    const double h = t1 - t0;
    const double u = (s - t0) / h;
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
    const double h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u);
    const double h11 = u * u * (u - 1);
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

struct Step {
    Vec y, err;
};

// Fehlberg 4(5) pair; y advanced with the fifth-order solution.
Step rkf45_step(const OdeRhs& rhs, double t, const Vec& y, const Vec& k1, double h)
{
    const Vec k2 = rhs(t + h / 4, y + h * (k1 / 4));
    const Vec k3 = rhs(t + 3 * h / 8, y + h * (3 * k1 / 32 + 9 * k2 / 32));
    const Vec k4 = rhs(t + 12 * h / 13, y + h * (1932 * k1 / 2197 - 7200 * k2 / 2197 + 7296 * k3 / 2197));
    const Vec k5 = rhs(t + h, y + h * (439 * k1 / 216 - 8 * k2 + 3680 * k3 / 513 - 845 * k4 / 4104));
    const Vec k6 = rhs(t + h / 2, y + h * (-8 * k1 / 27 + 2 * k2 - 3544 * k3 / 2565 + 1859 * k4 / 4104 - 11 * k5 / 40));
    const Vec y5 = y + h * (16 * k1 / 135 + 6656 * k3 / 12825 + 28561 * k4 / 56430 - 9 * k5 / 50 + 2 * k6 / 55);
    const Vec y4 = y + h * (25 * k1 / 216 + 1408 * k3 / 2565 + 2197 * k4 / 4104 - k5 / 5);
    return {y5, y5 - y4};
}

Vec rk4_step(const OdeRhs& rhs, double t, const Vec& y, const Vec& k1, double h)
{
    const Vec k2 = rhs(t + h / 2, y + h / 2 * k1);
    const Vec k3 = rhs(t + h / 2, y + h / 2 * k2);
    const Vec k4 = rhs(t + h, y + h * k3);
    return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
}

} // namespace

int OdeSolution::interval(double s) const
{
    const int last = static_cast<int>(t.size()) - 2;
    if (last < 0) return 0;
    if (t.back() >= t.front()) {
        auto it = std::upper_bound(t.begin(), t.end(), s);
        return std::clamp(static_cast<int>(it - t.begin()) - 1, 0, last);
    }
    auto it = std::upper_bound(t.begin(), t.end(), s, std::greater<>());
    return std::clamp(static_cast<int>(it - t.begin()) - 1, 0, last);
}

Vec OdeSolution::eval(double s) const
{
    if (t.size() == 1) return y.front();
    const int i = interval(s);
    return hermite(t[i], y[i], f[i], t[i + 1], y[i + 1], f[i + 1], s);
}

OdeSolution integrate(const OdeRhs& rhs, double t0, const Vec& y0, double t1, const IntegratorOptions& opts,
                      const OdeGuard& guard)
{
    OdeSolution sol;
    sol.t.push_back(t0);
    sol.y.push_back(y0);
    sol.f.push_back(rhs(t0, y0));
    if (t1 == t0) return sol;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    const double span = std::abs(t1 - t0);
    double h = opts.method == Integrator::rk4 ? opts.fixed_step : std::min(opts.initial_step, span);
    double t = t0;
    Vec y = y0;
    int steps = 0;

    while (dir * (t1 - t) > 0) {
        if (++steps > opts.max_steps) fail(ErrorCode::step_failure, "maximum number of steps exceeded", t);
        const bool last = h >= std::abs(t1 - t) * (1 - 1e-12);
        double step = last ? std::abs(t1 - t) : h;
        Vec y_new;
        const Vec& k1 = sol.f.back();
        Step s;
        try {
            if (opts.method == Integrator::rk4) {
                s.y = rk4_step(rhs, t, y, k1, dir * step);
            } else {
                s = rkf45_step(rhs, t, y, k1, dir * step);
            }
        } catch (const Error&) {
            // a stage left the domain: retry with a smaller step
            if (step <= opts.exit_tolerance)
                fail(ErrorCode::domain_exit, "trajectory left the admissible domain", t);
            h = step / 4;
            continue;
        }
        if (opts.method == Integrator::rk4) {
            y_new = s.y;
        } else {
            double err = 0.0;
            for (int i = 0; i < y.size(); ++i) {
                const double scale = opts.atol + opts.rtol * std::max(std::abs(y(i)), std::abs(s.y(i)));
                err = std::max(err, std::abs(s.err(i)) / scale);
            }
            if (!std::isfinite(err)) err = 1e10;
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            if (err > 1.0) {
                h = step * factor;
                if (h < 1e-14 * std::max(1.0, std::abs(t))) fail(ErrorCode::step_failure, "step size underflow", t);
                continue;
            }
            y_new = s.y;
            h = std::min(step * factor, opts.max_step);
        }
        const double t_new = last ? t1 : t + dir * step;
        if (!y_new.allFinite()) fail(ErrorCode::step_failure, "non-finite state", t_new);
        if (guard && !guard(t_new, y_new)) {
            // bisect on the Hermite interpolant of the tentative step
            Vec f_new;
            bool have_f = true;
            try {
                f_new = rhs(t_new, y_new);
                have_f = f_new.allFinite();
            } catch (const Error&) {
                have_f = false;
            }
            double lo = t, hi = t_new;
            while (std::abs(hi - lo) > opts.exit_tolerance) {
                const double mid = 0.5 * (lo + hi);
                const Vec ym = have_f ? hermite(t, y, k1, t_new, y_new, f_new, mid)
                                      : y + (mid - t) / (t_new - t) * (y_new - y);
                if (guard(mid, ym)) lo = mid; else hi = mid;
            }
            fail(ErrorCode::domain_exit, "trajectory left the admissible domain", 0.5 * (lo + hi));
        }
        Vec f_new;
        try {
            f_new = rhs(t_new, y_new);
        } catch (const Error& e) {
            fail(ErrorCode::domain_exit, std::string("trajectory left the admissible domain: ") + e.what(), t_new);
        }
        t = t_new;
        y = y_new;
        sol.t.push_back(t);
        sol.y.push_back(y);
        sol.f.push_back(f_new);
    }
    return sol;
}

} // namespace finsler
