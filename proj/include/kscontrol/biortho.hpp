#ifndef KSCONTROL_BIORTHO_HPP
#define KSCONTROL_BIORTHO_HPP

#include <string>
#include <vector>

#include "kscontrol/entire_functions.hpp"
#include "kscontrol/quadfloat.hpp"
#include "kscontrol/scaled.hpp"
#include "kscontrol/spectrum.hpp"

namespace ksc {

struct FamilyLabel {
    int k = 0;               // 0 marks the zero exponent
    Branch branch = Branch::plus;
};

/// Exponents mu of the window family {e^{-mu t}} on [-T/2, T/2].
struct ExponentFamily {
    double T = 0.0;
    int Kc = 0;
    std::vector<cplx> mu;
    std::vector<FamilyLabel> labels;
};
// {0} union {conj(lambda_k^pm): 0<|k|<=Kc}; |mu| = 4 Kc + 1
ExponentFamily build_family(double T, int Kc);
int family_index(const ExponentFamily& fam, int k, Branch br);

/// closed-form pair integral int_{-T/2}^{T/2} e^{-(mu_a + conj(mu_b)) t} dt
Scaled pair_integral(cplx mu_a, cplx mu_b, double T);
qcplx pair_integral_mantissa(qcplx mu_a, qcplx mu_b, qreal T, double* log_scale);

// plain dense Gram matrix; overflows for wide families, meant for small ones
std::vector<std::vector<cplx>> gram_matrix(const ExponentFamily& fam);

/// Biorthogonal family via the normalized Gram system, solved in binary128.
/// Theta_j(t) = sum_m chat[j][m] e^{-conj(mu_m) t} * exp(-logD[m] - logD[j]).
struct BiorthogonalFamily {
    ExponentFamily family;
    std::string method = "gram";
    std::vector<double> logD;                 // 0.5 log B_mm per exponent
    std::vector<std::vector<cplx>> chat;      // normalized coefficients (double copy)
    std::vector<std::vector<qcplx>> chat_q;   // same, solver precision
    std::vector<double> log_l2_norm;          // log ||Theta_j||_{L2}
    double cond_estimate = 0.0;               // of the normalized Gram
    double max_residual = 0.0;                // normalized-frame biorthogonality
    int floored_pivots = 0;                   // Cholesky pivots clamped to the eps floor

    // internals reused by the moment solver
    std::vector<std::vector<qcplx>> chol;     // lower Cholesky factor of Ghat
    std::vector<std::vector<qcplx>> ghat;     // normalized Gram (solver precision)
};

// condition gate sized for the binary128 solver, not for double
BiorthogonalFamily gram_biorthogonal(const ExponentFamily& fam, double cond_gate = 1e35);

cplx theta_eval(const BiorthogonalFamily& bio, int j, double t);
// int_{-T/2}^{T/2} Theta_j(t) e^{-mu t} dt for arbitrary mu (leak probes)
Scaled theta_moment(const BiorthogonalFamily& bio, int j, cplx mu);

/// residual of the normalized system for an arbitrary coefficient vector
std::vector<qcplx> gram_solve_normalized(const BiorthogonalFamily& bio,
                                         const std::vector<qcplx>& rhs,
                                         int refine_steps = 2);

struct NormReportRow {
    int k = 0;
    Branch branch = Branch::plus;
    double log_norm = 0.0;      // log ||Theta||
    double log_envelope = 0.0;  // log of the branch envelope without its constant
};
struct NormReport {
    std::vector<NormReportRow> rows;
    double fitted_logC_plus = 0.0;   // max over plus rows of log_norm - log_envelope
    double fitted_logC_minus = 0.0;
    double log_norm_zero = 0.0;
};
NormReport norm_report(const BiorthogonalFamily& bio);

/// ---- Paley-Wiener route ----

struct PWGrid {
    double X = 400.0;
    int n = 65536;
    double h = 0.0;
    std::vector<double> xs;
    std::vector<cplx> PM;  // P(x) M1(x) M2(x), collapsed to double
};
PWGrid build_pw_grid(const PsiContext& ctx, double X = 400.0, int n = 65536);

struct SampledTheta {
    NodeId id;
    std::vector<double> ts;   // uniform on [-T, T], includes +-T/2
    std::vector<cplx> vals;
    double mass_inside = 0.0;   // L2 mass on [-T/2, T/2]
    double mass_total = 0.0;    // over one aliasing period (Plancherel)
    double suggested_X = 0.0;   // set when the support check fails
};
SampledTheta theta_from_psi(const PsiContext& ctx, const PWGrid& grid, NodeId j,
                            int nt = 4096, double mass_tol = 0.01);

// windowed moment of the sampled inversion, exact in its exponential-sum form
cplx pw_moment(const PsiContext& ctx, const PWGrid& grid, NodeId j, cplx mu_l);
// conditioning of that verification functional; columns beyond the gate are
// not numerically checkable in double precision
double pw_moment_condition(cplx mu_l, double T);

} // namespace ksc

#endif
