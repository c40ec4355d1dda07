#ifndef KSCONTROL_SPECIAL_HPP
#define KSCONTROL_SPECIAL_HPP

namespace ksc {

double gamma_fn(double x);  // Lanczos, <= ~1e-12 relative on (0, 2] and beyond

} // namespace ksc

#endif
