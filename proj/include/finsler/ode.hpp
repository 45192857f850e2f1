#pragma once

#include <functional>
#include <vector>

#include "finsler/linalg.hpp"

namespace finsler {

enum class Integrator { rkf45, rk4 };

struct IntegratorOptions {
    Integrator method = Integrator::rkf45;
    double rtol = 1e-10;
    double atol = 1e-10;
    double initial_step = 1e-2;
    double fixed_step = 1e-3; // rk4 only
    double max_step = 0.02;
    int max_steps = 2000000;
    double exit_tolerance = 1e-9;
};

using OdeRhs = std::function<Vec(double t, const Vec& y)>;
// false when the state has left the valid region
using OdeGuard = std::function<bool(double t, const Vec& y)>;

// Accepted-step trajectory with cubic Hermite dense output.
class OdeSolution {
public:
    std::vector<double> t;
    std::vector<Vec> y;
    std::vector<Vec> f;

    double front() const { return t.front(); }
    double back() const { return t.back(); }
    Vec eval(double s) const;
    // index of the step interval containing s
    int interval(double s) const;
};

// Integrates from t0 to t1 (t1 may be smaller than t0). A guard failure is
// refined by bisection on the dense output and raised as domain_exit.
OdeSolution integrate(const OdeRhs& rhs, double t0, const Vec& y0, double t1, const IntegratorOptions& opts,
                      const OdeGuard& guard = nullptr);

} // namespace finsler
