#pragma once

#include <functional>
#include <vector>

namespace finsler {

// Eight-point Gauss-Legendre rule on [a, b].
double gauss_legendre8(const std::function<double(double)>& f, double a, double b);

// Adaptive bisection on top of the eight-point rule; knots are never straddled.
double integrate_adaptive(const std::function<double(double)>& f, const std::vector<double>& knots,
                          double rtol = 1e-12);

} // namespace finsler
