#include "kscontrol/quadrature.hpp"

#include <cmath>

#include "kscontrol/spectrum.hpp"

namespace ksc {

namespace {

// Kronrod-15 abscissae/weights on [-1,1] and the embedded Gauss-7 weights.
const double xk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898,  0.0,                0.207784955007898,
     0.405845151377397,  0.586087235467691,  0.741531185599394,
     0.864864423359769,  0.949107912342759,  0.991455371120813};
const double wk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
const double wg[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469, 0.381830050505119, 0.279705391489277,
    0.129484966168870};

struct Panel { double value, error; };

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        double fx = f(c + h * xk[i]);
        k += wk[i] * fx;
        if (i % 2 == 1) g += wg[i / 2] * fx;
    }
    return {h * k, std::abs(h * (k - g))};
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double abs_tol, double rel_tol, int depth, bool* ok) {
    Panel p = gk15(f, a, b);
    if (p.error <= abs_tol + rel_tol * std::abs(p.value)) return p.value;
    if (depth <= 0) {
        *ok = false;
        return p.value;
    }
    double c = 0.5 * (a + b);
    return adapt(f, a, c, abs_tol * 0.5, rel_tol, depth - 1, ok) +
           adapt(f, c, b, abs_tol * 0.5, rel_tol, depth - 1, ok);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, int max_depth) {
    bool ok = true;
    return adapt(f, a, b, abs_tol, rel_tol, max_depth, &ok);
}

double integrate_checked(const std::function<double(double)>& f, double a, double b,
                         double abs_tol, double rel_tol, int max_depth) {
    bool ok = true;
    double v = adapt(f, a, b, abs_tol, rel_tol, max_depth, &ok);
    if (!ok) throw Error(Error::numeric, "quadrature did not converge");
    return v;
}

} // namespace ksc
