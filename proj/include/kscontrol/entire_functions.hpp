#ifndef KSCONTROL_ENTIRE_FUNCTIONS_HPP
#define KSCONTROL_ENTIRE_FUNCTIONS_HPP

#include <optional>
#include <vector>

#include "kscontrol/scaled.hpp"
#include "kscontrol/spectrum.hpp"

namespace ksc {

/// Zero data of the canonical product: mu_k^{+-} for 0<|k|<=kmax_nodes plus
/// mu_0 = 0. Only k>0 is stored; mu_{-k} = conj(mu_k) and
/// mutilde_{-k} = -conj(mutilde_k).
struct NodeSet {
    double T = 0.0;
    int kmax_nodes = 0;
    std::vector<cplx> mu_plus, mu_minus;    // index k-1
    std::vector<cplx> mut_plus, mut_minus;  // mu_tilde, same layout
};
NodeSet build_nodes(double T, int kmax_nodes);

/// (k, branch) with signed k; k == 0 stands for the zero node of P.
struct NodeId {
    int k = 0;
    Branch branch = Branch::plus;
    bool operator==(const NodeId&) const = default;
};
cplx mu_of(const NodeSet& n, NodeId id);
inline cplx node_point(const NodeSet& n, NodeId id) { return cplx(0, -1) * mu_of(n, id); }

struct TruncationPolicy {
    int N_P = 512;    // product truncation of P
    int N_M = 4000;   // multiplier truncation
    bool tails = true;  // Euler-Maclaurin continuation of both truncated tails
};

struct PEval {
    Scaled value;
    bool node_hit = false;  // z landed on a zero; value is exactly 0
    NodeId hit{};
    double tail_log = 0.0;  // |log| of the applied tail continuation
};

PEval canonical_P(cplx z, const NodeSet& nodes, const TruncationPolicy& pol);
// product with the factor of `skip` removed (skip.k==0 removes the leading z)
Scaled P_removed(cplx z, NodeId skip, const NodeSet& nodes, const TruncationPolicy& pol);
Scaled P_prime_at_node(NodeId id, const NodeSet& nodes, const TruncationPolicy& pol);

enum class SineFactor { Q1, Q2, R1, R2 };
Scaled sine_factor(cplx z, SineFactor which, const NodeSet& nodes, int N);
// P1(z) = z prod(1+z/(i mu_k^+)), P2 likewise on the minus branch
Scaled P1_truncated(cplx z, const NodeSet& nodes, int N);
Scaled P2_truncated(cplx z, const NodeSet& nodes, int N);

/// One Beurling-Malliavin multiplier: atomized zero set of s(t) = a t - b t^gamma.
struct MultiplierSpec {
    double a = 0.0, b = 0.0, gamma = 0.0, B = 0.0;
    std::vector<double> taus;  // s(tau_n) = n, strictly increasing, tau_1 > B
};
enum class Multiplier { M1, M2 };
// b1 = sqrt(2); b2 = 8-4*sqrt(2), i.e. 4*sqrt(2)*tan(pi/8): the x^{1/4}
// compensation is 4*sqrt(2)*pi, strictly above P2's real-axis growth
// 2*pi*(cos(pi/8)+sin(pi/8)), so P*M1*M2 decays on the real line.
MultiplierSpec build_multiplier(double T, Multiplier which, int N_M);
double s_of(const MultiplierSpec& spec, double t);

// prod_n (1 - (z-i)^2/tau_n^2), with tail continuation; needs tau_N >= 2|z-i|
Scaled eval_multiplier(cplx z, const MultiplierSpec& spec, bool tail = true);

/// Cached data for evaluating the interpolating family Psi.
struct PsiContext {
    NodeSet nodes;
    MultiplierSpec m1, m2;
    TruncationPolicy pol;
    std::vector<NodeId> ids;        // 0 then (k,+-) for 0<|k|<=kmax_psi
    std::vector<Scaled> pprime;     // P'(-i mu) per id
    std::vector<Scaled> m_at_node;  // M(-i mu) per id
};
PsiContext build_psi_context(double T, int kmax_psi, const TruncationPolicy& pol);

// Psi_j(z) = P(z) M(z) / (P'(node_j)(z + i mu_j) M(node_j)); exact 0/1 at nodes
Scaled psi(const PsiContext& ctx, NodeId j, cplx z);
int psi_index(const PsiContext& ctx, NodeId j);

struct AppendixB {
    double integral = 0.0, lower = 0.0, upper = 0.0;
};
AppendixB verify_appendix_B(double x);  // corrected Beta-ratio bounds

double appendix_A_theta(double x);            // int_0^1 log|1-x^2/t^2| d(t - t^{1/4})
double multiplier_U(double x, const MultiplierSpec& spec);  // continuous log-potential

} // namespace ksc

#endif
