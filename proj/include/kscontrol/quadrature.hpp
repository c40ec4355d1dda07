#ifndef KSCONTROL_QUADRATURE_HPP
#define KSCONTROL_QUADRATURE_HPP

#include <functional>

namespace ksc {

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Recursion splits until the
/// embedded error estimate meets abs_tol + rel_tol*|I| or depth runs out.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 30);

/// Convergence failure is reported by throwing Error(numeric).
double integrate_checked(const std::function<double(double)>& f, double a, double b,
                         double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 30);

} // namespace ksc

#endif
