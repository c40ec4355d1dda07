#include "kscontrol/special.hpp"

#include <cmath>

namespace ksc {

namespace {
// Lanczos g=7, n=9 coefficients (Godfrey).
const double lanczos_g = 7.0;
const double lanczos_c[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7};
} // namespace

double gamma_fn(double x) {
    if (x < 0.5) {
        // reflection
        return M_PI / (std::sin(M_PI * x) * gamma_fn(1.0 - x));
    }
    x -= 1.0;
    double a = lanczos_c[0];
    double t = x + lanczos_g + 0.5;
    for (int i = 1; i < 9; ++i) a += lanczos_c[i] / (x + i);
    return std::sqrt(2.0 * M_PI) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

} // namespace ksc
