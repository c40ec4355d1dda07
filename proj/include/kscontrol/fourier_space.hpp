#ifndef KSCONTROL_FOURIER_SPACE_HPP
#define KSCONTROL_FOURIER_SPACE_HPP

#include <complex>
#include <vector>

#include "kscontrol/spectrum.hpp"

namespace ksc {

/// Band-limited periodic function f(x) = sum_{|k|<=kmax} c_k e^{ikx},
/// c_k = (1/2pi) int_0^{2pi} f e^{-ikx} dx.
class PeriodicField {
public:
    PeriodicField() = default;
    explicit PeriodicField(int kmax) : kmax_(kmax), c_(2 * kmax + 1) {}

    int kmax() const { return kmax_; }
    cplx coeff(int k) const {
        if (std::abs(k) > kmax_) return {0.0, 0.0};
        return c_[k + kmax_];
    }
    void set_coeff(int k, cplx v);
    PeriodicField resized(int kmax) const;  // zero-pad or truncate

    cplx sample(double x) const;  // pointwise synthesis
    bool conjugate_symmetric(double tol = 1e-12) const;  // real-valuedness

    friend PeriodicField operator+(const PeriodicField& a, const PeriodicField& b);
    friend PeriodicField operator*(cplx s, const PeriodicField& f);

private:
    int kmax_ = 0;
    std::vector<cplx> c_{cplx(0.0, 0.0)};
};

struct StatePair {
    PeriodicField u, v;
};

double sobolev_norm(const PeriodicField& f, double s);
// 2pi sum_k c_k(w) conj(c_k(phi)); equals the Z product int w conj(phi) for w in L^2
cplx duality_pairing(const PeriodicField& w, const PeriodicField& phi);
cplx mean(const PeriodicField& f);  // 2pi c_0
PeriodicField project_mean_zero(const PeriodicField& f);

double state_dual_norm(const StatePair& s);  // ||u||_{(H^2)*} + ||v||_{(H^1)*}

} // namespace ksc

#endif
