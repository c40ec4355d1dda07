#ifndef KSCONTROL_SPECTRUM_HPP
#define KSCONTROL_SPECTRUM_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ksc {

using cplx = std::complex<double>;

enum class Branch { plus, minus };

inline const char* branch_name(Branch b) { return b == Branch::plus ? "+" : "-"; }

/// Error with a CLI exit-code category attached.
struct Error : std::runtime_error {
    enum Code { usage = 2, numeric = 3, constraint = 4 };
    Code code;
    Error(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

/// One eigenvalue record of the adjoint generator at mode k.
struct SpectralNode {
    int k = 0;
    Branch branch = Branch::plus;
    cplx lambda;    // eigenvalue of A*
    cplx mu;        // conj(lambda), the exponent of the moment problems
    cplx eta;
    cplx theta;     // eta / lambda
    cplx mu_tilde;  // sgn(k)·(-mu)^{1/2} (plus) or sgn(k)·(-mu)^{1/4} (minus)
    bool tie_warning = false;
};

struct SpectrumTable {
    int kmax = 0;
    std::vector<SpectralNode> nodes;  // 0 < |k| <= kmax, both branches
    // mode 0 carries the double eigenvalue 0 with eigenvectors (1,0),(0,1)
};

constexpr int kmax_guard = 10000;  // k^6 ~ 1e24 still has ~1e-8 relative slack

// coefficients of lambda^2 + p·lambda + q = 0 at mode k
std::pair<cplx, cplx> modal_quadratic(int k);

// the two roots, branch-assigned by proximity to -k^2+ik / -k^4-ik^3+k^2
struct EigenPair {
    cplx lambda_plus, lambda_minus;
    bool tie_warning = false;
};
EigenPair eigenvalues(int k);

std::pair<cplx, cplx> eta_theta(int k, Branch branch);  // (eta, theta)
cplx mu_tilde(int k, Branch branch);

SpectralNode spectral_node(int k, Branch branch);
SpectrumTable build_table(int kmax);

struct GapReport {
    double min_gap = 0.0;
    int k_a = 0, k_b = 0;
    Branch br_a = Branch::plus, br_b = Branch::plus;
    bool includes_zero = false;  // argmin pair involves lambda_0 = 0
};
// minimum pairwise distance among {0} and all lambda_k^pm, 0<|k|<=kmax
GapReport spectral_gap(int kmax);

struct DenominatorRow {
    int k;
    Branch branch;
    double den_boundary_u;   // |ik^3+k^2-ik+conj(theta)|
    double den_boundary_v;   // |1+(1-ik)conj(theta)|, the classical plotted form
    double den_boundary_v_used;  // |-1+(1-ik)conj(theta)|, the synthesis denominator
};
struct DenominatorReport {
    double min_boundary_u = 0.0;
    double min_boundary_v = 0.0;
    double min_boundary_v_used = 0.0;
    std::vector<DenominatorRow> rows;
};
DenominatorReport denominator_check(int kmax);

} // namespace ksc

#endif
