#include "kscontrol/fourier_space.hpp"

#include <cmath>

namespace ksc {

void PeriodicField::set_coeff(int k, cplx v) {
    if (std::abs(k) > kmax_)
        throw Error(Error::usage, "coefficient index outside the band limit");
    c_[k + kmax_] = v;
}

PeriodicField PeriodicField::resized(int kmax) const {
    PeriodicField out(kmax);
    int m = std::min(kmax, kmax_);
    for (int k = -m; k <= m; ++k) out.set_coeff(k, coeff(k));
    return out;
}

cplx PeriodicField::sample(double x) const {
    cplx acc(0.0, 0.0);
    for (int k = -kmax_; k <= kmax_; ++k)
        acc += coeff(k) * std::polar(1.0, k * x);
    return acc;
}

bool PeriodicField::conjugate_symmetric(double tol) const {
    for (int k = 0; k <= kmax_; ++k)
        if (std::abs(coeff(k) - std::conj(coeff(-k))) > tol) return false;
    return true;
}

PeriodicField operator+(const PeriodicField& a, const PeriodicField& b) {
    int kmax = std::max(a.kmax(), b.kmax());
    PeriodicField out(kmax);
    for (int k = -kmax; k <= kmax; ++k) out.set_coeff(k, a.coeff(k) + b.coeff(k));
    return out;
}

PeriodicField operator*(cplx s, const PeriodicField& f) {
    PeriodicField out(f.kmax());
    for (int k = -f.kmax(); k <= f.kmax(); ++k) out.set_coeff(k, s * f.coeff(k));
    return out;
}

double sobolev_norm(const PeriodicField& f, double s) {
    double acc = 0.0;
    for (int k = -f.kmax(); k <= f.kmax(); ++k) {
        double w = std::pow(1.0 + double(k) * k, s);
        acc += w * std::norm(f.coeff(k));
    }
    return std::sqrt(acc);
}

cplx duality_pairing(const PeriodicField& w, const PeriodicField& phi) {
    int kmax = std::max(w.kmax(), phi.kmax());
    cplx acc(0.0, 0.0);
    for (int k = -kmax; k <= kmax; ++k)
        acc += w.coeff(k) * std::conj(phi.coeff(k));
    return 2.0 * M_PI * acc;
}

cplx mean(const PeriodicField& f) { return 2.0 * M_PI * f.coeff(0); }

PeriodicField project_mean_zero(const PeriodicField& f) {
    PeriodicField out = f;
    out.set_coeff(0, cplx(0.0, 0.0));
    return out;
}

double state_dual_norm(const StatePair& s) {
    return sobolev_norm(s.u, -2.0) + sobolev_norm(s.v, -1.0);
}

} // namespace ksc
