#ifndef KSCONTROL_PDE_SIM_HPP
#define KSCONTROL_PDE_SIM_HPP

#include <array>
#include <vector>

#include "kscontrol/moment_control.hpp"

namespace ksc {

/// per-mode forward matrix M_k = [[-k^4+ik^3+k^2, ik],[ik, -k^2-ik]]
std::array<cplx, 4> mode_matrix(int k);
// eigenvalues of M_k are conj(lambda_k^pm), eigenvectors (1, conj(theta^pm))
std::pair<cplx, cplx> mode_matrix_eigenvalues(int k);

// boundary jump forcing: d/dt (u_k, v_k) = M_k (u_k, v_k) + (b_u, b_v) q(t)/(2pi)
std::pair<cplx, cplx> boundary_forcing(int k, ScenarioKind kind);

struct Trajectory {
    std::vector<double> times;
    std::vector<StatePair> states;
};

struct ModeTerminal {
    int k = 0;
    qcplx u, v;
};

struct SimResult {
    Trajectory traj;
    std::vector<ModeTerminal> terminal;  // exact per-mode values at t = T
    int kmax = 0;
};

SimResult evolve_free(const StatePair& init, double T, int kmax_sim, int nt = 32);
SimResult evolve_interior(const StatePair& init, const ControlScenario& sc,
                          const ControlSignal& g, int kmax_sim, int nt = 32);
SimResult evolve_boundary(const StatePair& init, ScenarioKind kind,
                          const ControlSignal& q, int kmax_sim, int nt = 32);

/// adjoint system solved in reversed time from the terminal data; sources are
/// constant-in-time per-mode pairs (enough for the verification suites)
struct AdjointSource {
    PeriodicField h1, h2;
};
struct AdjointResult {
    Trajectory traj;        // states at the original times t in [0, T]
    StatePair at_zero;      // (phi, psi)(0)
};
AdjointResult adjoint_solve(const StatePair& terminal, const AdjointSource& src,
                            double T, int kmax_sim, int nt = 32);

/// |LHS - RHS| of the transposition identity for the scenario; both sides in
/// closed form. The control is ignored for kind-free (pass empty signal).
double duality_residual(ScenarioKind kind, const StatePair& init,
                        const StatePair& terminal, const ControlSignal& control,
                        const ControlScenario* profile_scenario, double T, int kmax);

struct EnergyCheck {
    double max_violation_L2 = 0.0;   // d/dt||.||_Z^2 inequality slack overshoot
    double max_violation_H = 0.0;    // H^2 x H^1 analogue
    double estimate_ratio = 0.0;     // ||(phi,psi)||_{C(H)} / (||h|| + ||Phi_T||)
};
EnergyCheck energy_check(const StatePair& terminal, const AdjointSource& src,
                         double T, int kmax, int nt = 200);

struct TerminalReport {
    double dual_norm = 0.0;          // ||u||_{(H^2)*} + ||v||_{(H^1)*}
    double enforced_dual = 0.0;      // same, modes |k| <= Kc
    double leaked_dual = 0.0;        // modes |k| > Kc
    double enforced_max_mode = 0.0;  // max per-mode dual magnitude, |k| <= Kc
    std::vector<std::pair<int, double>> mode_log_mag;  // per |k| combined log size
};
TerminalReport terminal_report(const SimResult& sim, int Kc);

} // namespace ksc

#endif
