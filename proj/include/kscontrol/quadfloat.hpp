#ifndef KSCONTROL_QUADFLOAT_HPP
#define KSCONTROL_QUADFLOAT_HPP

#include <quadmath.h>
#include <complex>

namespace ksc {

using qreal = __float128;

/// Minimal complex type over binary128. Only what the Gram solver and the
/// exact Duhamel sums need: field ops, conj, abs, exp, expm1.
struct qcplx {
    qreal re{0}, im{0};

    qcplx() = default;
    qcplx(qreal r) : re(r), im(0) {}
    qcplx(qreal r, qreal i) : re(r), im(i) {}
    qcplx(std::complex<double> z) : re(z.real()), im(z.imag()) {}

    std::complex<double> to_double() const {
        return {static_cast<double>(re), static_cast<double>(im)};
    }

    friend qcplx operator+(const qcplx& a, const qcplx& b) { return {a.re + b.re, a.im + b.im}; }
    friend qcplx operator-(const qcplx& a, const qcplx& b) { return {a.re - b.re, a.im - b.im}; }
    friend qcplx operator-(const qcplx& a) { return {-a.re, -a.im}; }
    friend qcplx operator*(const qcplx& a, const qcplx& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend qcplx operator*(qreal a, const qcplx& b) { return {a * b.re, a * b.im}; }
    friend qcplx operator/(const qcplx& a, const qcplx& b) {
        // scale by the larger component to avoid spurious overflow
        qreal br = fabsq(b.re), bi = fabsq(b.im);
        if (br >= bi) {
            qreal r = b.im / b.re;
            qreal d = b.re + b.im * r;
            return {(a.re + a.im * r) / d, (a.im - a.re * r) / d};
        }
        qreal r = b.re / b.im;
        qreal d = b.re * r + b.im;
        return {(a.re * r + a.im) / d, (a.im * r - a.re) / d};
    }
    qcplx& operator+=(const qcplx& o) { re += o.re; im += o.im; return *this; }
    qcplx& operator-=(const qcplx& o) { re -= o.re; im -= o.im; return *this; }
    qcplx& operator*=(const qcplx& o) { *this = *this * o; return *this; }
};

inline qcplx conj(const qcplx& z) { return {z.re, -z.im}; }
inline qreal abs(const qcplx& z) { return hypotq(z.re, z.im); }
inline qcplx exp(const qcplx& z) {
    qreal m = expq(z.re);
    return {m * cosq(z.im), m * sinq(z.im)};
}
/// exp(z) - 1, accurate near z = 0.
inline qcplx expm1(const qcplx& z) {
    if (fabsq(z.re) < qreal(0.5) && fabsq(z.im) < qreal(0.5)) {
        // expm1(x)·cos(y) + (cos y - 1) + i·exp(x)·sin(y), all cancellation-free
        qreal ex = expm1q(z.re);
        qreal cy = cosq(z.im), sy = sinq(z.im);
        qreal cm1 = -2 * sinq(z.im / 2) * sinq(z.im / 2);
        return {ex * cy + cm1, (ex + 1) * sy};
    }
    return exp(z) - qcplx(1);
}

} // namespace ksc

#endif
