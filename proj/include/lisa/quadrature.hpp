#pragma once

#include <functional>

namespace lisa::quad {

// Adaptive bisection driven by a nested 7/15-point Gauss pair per interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-8, double abs_tol = 0.0);

// Integral over [a, inf) via the rational substitution x = a + t/(1-t).
double integrate_to_inf(const std::function<double(double)>& f, double a,
                        double rel_tol = 1e-8);

}  // namespace lisa::quad
