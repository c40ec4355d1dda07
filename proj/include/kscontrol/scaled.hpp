#ifndef KSCONTROL_SCALED_HPP
#define KSCONTROL_SCALED_HPP

#include <cmath>
#include <complex>
#include <limits>

namespace ksc {

using cplx = std::complex<double>;

/// Complex value carried as mantissa * exp(log_scale), so that products of
/// many exponentially large/small factors never leave the double range.
struct Scaled {
    cplx m{0.0, 0.0};
    double e{0.0};

    Scaled() = default;
    Scaled(cplx v) : m(v), e(0.0) { normalize(); }
    Scaled(double v) : m(v, 0.0), e(0.0) { normalize(); }
    Scaled(cplx mant, double lg) : m(mant), e(lg) { normalize(); }

    static Scaled exp_of(cplx z) {
        // exp(z) with the real part kept in the scale slot
        return Scaled(std::polar(1.0, z.imag()), z.real());
    }
    static Scaled zero() { return Scaled(); }
    static Scaled one() { return Scaled(cplx(1.0, 0.0), 0.0); }

    bool is_zero() const { return m == cplx(0.0, 0.0); }

    void normalize() {
        if (is_zero()) { e = 0.0; return; }
        double a = std::abs(m);
        if (a > 1e100 || a < 1e-100) {
            double s = std::log(a);
            m /= std::exp(s);
            e += s;
        }
    }

    double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(m)) + e;
    }
    double arg() const { return std::arg(m); }

    /// Collapse to a plain complex; may under/overflow by design.
    cplx value() const {
        if (is_zero()) return {0.0, 0.0};
        return m * std::exp(e);
    }

    Scaled conj() const { return Scaled(std::conj(m), e); }

    friend Scaled operator*(const Scaled& a, const Scaled& b) {
        if (a.is_zero() || b.is_zero()) return Scaled();
        Scaled r(a.m * b.m, a.e + b.e);
        return r;
    }
    friend Scaled operator*(const Scaled& a, cplx b) { return a * Scaled(b); }
    friend Scaled operator*(cplx a, const Scaled& b) { return Scaled(a) * b; }
    friend Scaled operator/(const Scaled& a, const Scaled& b) {
        Scaled r(a.m / b.m, a.e - b.e);
        return r;
    }
    friend Scaled operator+(const Scaled& a, const Scaled& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.e >= b.e) {
            double d = b.e - a.e;
            cplx add = d < -745.0 ? cplx(0, 0) : b.m * std::exp(d);
            return Scaled(a.m + add, a.e);
        }
        return b + a;
    }
    friend Scaled operator-(const Scaled& a, const Scaled& b) {
        return a + Scaled(-b.m, b.e);
    }
    Scaled operator-() const { return Scaled(-m, e); }

    Scaled& operator*=(const Scaled& o) { *this = *this * o; return *this; }
    Scaled& operator+=(const Scaled& o) { *this = *this + o; return *this; }
};

inline double abs_value(const Scaled& s) {
    if (s.is_zero()) return 0.0;
    return std::exp(s.log_abs());
}

} // namespace ksc

#endif
