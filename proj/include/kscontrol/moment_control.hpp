#ifndef KSCONTROL_MOMENT_CONTROL_HPP
#define KSCONTROL_MOMENT_CONTROL_HPP

#include <string>
#include <vector>

#include "kscontrol/biortho.hpp"
#include "kscontrol/fourier_space.hpp"

namespace ksc {

enum class ScenarioKind { interior_u, interior_v, boundary_u, boundary_v };
const char* scenario_name(ScenarioKind k);
ScenarioKind scenario_from_name(const std::string& s);

/// Quadratic irrational rho in (0,1) given by its integer minimal polynomial
/// a X^2 + b X + c (irreducible over Q).
struct RhoSpec {
    long a = 1, b = 2, c = -1;  // default: sqrt(2) - 1
    double value = 0.0;
};
RhoSpec make_rho(long a, long b, long c);

struct ControlScenario {
    ScenarioKind kind = ScenarioKind::interior_u;
    double alpha = 1.0;  // indicator profile [alpha, alpha + rho*pi]
    RhoSpec rho = make_rho(1, 2, -1);
};

// f_k = e^{-ik alpha}(1 - e^{-ik rho pi})/(ik), f_0 = rho*pi
cplx profile_fk(double alpha, double rho, int k);

struct LiouvilleReport {
    double analytic_C = 0.0;      // |rho - p/q| >= C/q^2
    double empirical_min = 0.0;   // min_{q<=qmax} q^2 dist(q rho, Z)
    double min_k2_fk = 0.0;       // min_{|k|<=qmax} k^2 |f_k|
    long qmax = 0;
};
LiouvilleReport liouville_constant(const RhoSpec& rho, long qmax = 10000);

// scenario targets; pairings through fourier_space, denominators from spectrum
cplx gamma_target(const ControlScenario& sc, const StatePair& init, int k, Branch br);
cplx gamma_zero(const ControlScenario& sc, const StatePair& init);

/// Enforced moment equations int_{-T/2}^{T/2} e^{-mu_l t} gtilde(t) dt = target_l.
struct MomentProblem {
    ControlScenario scenario;
    double T = 0.0;
    int Kc = 0;
    ExponentFamily family;
    std::vector<Scaled> targets;  // aligned with family indices
};
// throws Error(constraint) naming the violated scenario hypothesis
MomentProblem assemble_moment_problem(const ControlScenario& sc, const StatePair& init,
                                      double T, int Kc, double mean_tol = 1e-10);

/// g(t) on [0,T] as sum_m mant_m e^{lg_m} e^{rate_m (t - t0)} with t0 = T/2:
/// the moment window is symmetric, and keeping the origin explicit means the
/// shifted integrals recombine without any scale rounding. The mantissas stay
/// in solver precision for the exact Duhamel sums.
struct ControlSignal {
    ScenarioKind kind = ScenarioKind::interior_u;
    double T = 0.0;
    double t0 = 0.0;
    std::vector<cplx> rate;
    std::vector<qcplx> mant;
    std::vector<double> lg;

    cplx eval(double t) const;
    double l2_norm() const;  // closed form over [0, T]
};

ControlSignal synthesize(const MomentProblem& problem, const BiorthogonalFamily& bio);

struct MomentResidualRow {
    int k = 0;
    Branch branch = Branch::plus;
    bool enforced = true;
    double weighted = 0.0;   // |e^{mu T/2} (I_l - target_l)|, the terminal-defect scale
    double raw_log = 0.0;    // log |I_l - target_l| (leakage rows: log |I_l|)
};
struct MomentResiduals {
    std::vector<MomentResidualRow> rows;
    double max_enforced_weighted = 0.0;
};
MomentResiduals moment_residuals(const ControlSignal& g, const MomentProblem& problem,
                                 int K_report = 0);

} // namespace ksc

#endif
