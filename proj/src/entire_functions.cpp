#include "kscontrol/entire_functions.hpp"

#include <cmath>

#include "kscontrol/quadrature.hpp"
#include "kscontrol/special.hpp"

namespace ksc {

namespace {

const cplx I_unit(0.0, 1.0);

struct ContinuumPair { cplx lambda_plus, lambda_minus; };

// the modal quadratic continued to real rank kappa; smooth for kappa >> 1
ContinuumPair eigen_continuum(double kappa) {
    double k2 = kappa * kappa, k3 = k2 * kappa, k4 = k2 * k2, k6 = k3 * k3;
    cplx p(k4, k3 - kappa), q(k6 + k2, k3);
    cplx s = std::sqrt(p * p - 4.0 * q);
    if (std::real(std::conj(p) * s) < 0.0) s = -s;
    cplx r1 = -0.5 * (p + s);
    cplx r2 = q / r1;
    cplx anchor_plus(-k2, kappa);
    if (std::abs(r1 - anchor_plus) <= std::abs(r2 - anchor_plus)) return {r1, r2};
    return {r2, r1};
}

// sum of the four log-factors of P at rank kappa
cplx p_tail_term(double kappa, cplx z) {
    ContinuumPair ev = eigen_continuum(kappa);
    cplx mu_p = std::conj(ev.lambda_plus), mu_m = std::conj(ev.lambda_minus);
    return std::log(1.0 + z / (I_unit * mu_p)) + std::log(1.0 + z / (I_unit * ev.lambda_plus)) +
           std::log(1.0 + z / (I_unit * mu_m)) + std::log(1.0 + z / (I_unit * ev.lambda_minus));
}

// fixed-panel Kronrod-15 of a complex integrand on [0,1]
template <class F>
cplx gk15_panels01(F f, int panels) {
    static const double xk[15] = {
        -0.991455371120813, -0.949107912342759, -0.864864423359769,
        -0.741531185599394, -0.586087235467691, -0.405845151377397,
        -0.207784955007898,  0.0,                0.207784955007898,
         0.405845151377397,  0.586087235467691,  0.741531185599394,
         0.864864423359769,  0.949107912342759,  0.991455371120813};
    static const double wk[15] = {
        0.022935322010529, 0.063092092629979, 0.104790010322250,
        0.140653259715525, 0.169004726639267, 0.190350578064785,
        0.204432940075298, 0.209482141084728, 0.204432940075298,
        0.190350578064785, 0.169004726639267, 0.140653259715525,
        0.104790010322250, 0.063092092629979, 0.022935322010529};
    cplx acc(0.0, 0.0);
    double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        double c = (p + 0.5) * h;
        for (int i = 0; i < 15; ++i) acc += wk[i] * f(c + 0.5 * h * xk[i]);
    }
    return acc * (0.5 * h);
}

// Euler-Maclaurin continuation of sum_{k>N} of the P log-factors
cplx p_tail(cplx z, int N) {
    if (std::abs(z) > 0.25 * double(N) * N)
        throw Error(Error::numeric, "P truncation too small for |z|; raise N_P");
    double a = N + 1;
    cplx integral = gk15_panels01(
        [&](double u) { return p_tail_term(a / u, z) * (a / (u * u)); }, 8);
    cplx h0 = p_tail_term(a, z);
    double d = 1.0 / 64.0;
    cplx h1 = (p_tail_term(a + d, z) - p_tail_term(a - d, z)) / (2.0 * d);
    return integral + 0.5 * h0 - h1 / 12.0;
}

bool factor_is_zero(cplx factor, double scale) { return std::abs(factor) <= 1e-12 * scale; }

// series for int_X^inf log(1 - w^2/t^2) d(a t - b t^gamma); needs |w| <= X/2
cplx stieltjes_log_tail(cplx w2, double X, double a, double b, double gamma) {
    cplx acc(0.0, 0.0);
    cplx w2m(1.0, 0.0);
    double X2 = X * X;
    for (int m = 1; m <= 60; ++m) {
        w2m *= w2 / X2;
        cplx term = w2m * (-a * X / (m * (2.0 * m - 1.0)) +
                           b * gamma * std::pow(X, gamma) / (m * (2.0 * m - gamma)));
        acc += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) break;
    }
    return acc;
}

} // namespace

NodeSet build_nodes(double T, int kmax_nodes) {
    if (T <= 0.0) throw Error(Error::usage, "window length T must be positive");
    NodeSet n;
    n.T = T;
    n.kmax_nodes = kmax_nodes;
    n.mu_plus.resize(kmax_nodes);
    n.mu_minus.resize(kmax_nodes);
    n.mut_plus.resize(kmax_nodes);
    n.mut_minus.resize(kmax_nodes);
    for (int k = 1; k <= kmax_nodes; ++k) {
        EigenPair ev = eigenvalues(k);
        n.mu_plus[k - 1] = std::conj(ev.lambda_plus);
        n.mu_minus[k - 1] = std::conj(ev.lambda_minus);
        n.mut_plus[k - 1] = mu_tilde(k, Branch::plus);
        n.mut_minus[k - 1] = mu_tilde(k, Branch::minus);
    }
    return n;
}

cplx mu_of(const NodeSet& n, NodeId id) {
    if (id.k == 0) return {0.0, 0.0};
    int a = std::abs(id.k);
    if (a > n.kmax_nodes) throw Error(Error::usage, "node outside the node set");
    cplx mu = id.branch == Branch::plus ? n.mu_plus[a - 1] : n.mu_minus[a - 1];
    return id.k > 0 ? mu : std::conj(mu);
}

namespace {

// shared core of canonical_P / P_removed
PEval p_product(cplx z, const NodeSet& nodes, const TruncationPolicy& pol,
                std::optional<NodeId> skip) {
    if (pol.N_P > nodes.kmax_nodes)
        throw Error(Error::usage, "N_P exceeds the available node set");
    PEval out;
    Scaled prod = Scaled::one();

    bool skip_zero = skip && skip->k == 0;
    if (!skip_zero) {
        if (std::abs(z) <= 1e-14) {
            out.node_hit = true;
            out.hit = NodeId{0, Branch::plus};
            out.value = Scaled::zero();
            return out;
        }
        prod = Scaled(z);
    }

    for (int k = 1; k <= pol.N_P; ++k) {
        for (Branch br : {Branch::plus, Branch::minus}) {
            cplx mu = br == Branch::plus ? nodes.mu_plus[k - 1] : nodes.mu_minus[k - 1];
            for (int sgn : {1, -1}) {
                cplx mu_s = sgn > 0 ? mu : std::conj(mu);
                if (skip && skip->k == sgn * k && skip->branch == br) continue;
                cplx factor = 1.0 + z / (I_unit * mu_s);
                double scale = 1.0 + std::abs(z) / std::abs(mu_s);
                if (factor_is_zero(factor, scale)) {
                    out.node_hit = true;
                    out.hit = NodeId{sgn * k, br};
                    out.value = Scaled::zero();
                    return out;
                }
                prod *= Scaled(factor);
            }
        }
    }
    if (pol.tails) {
        cplx t = p_tail(z, pol.N_P);
        out.tail_log = std::abs(t);
        prod *= Scaled::exp_of(t);
    }
    out.value = prod;
    return out;
}

} // namespace

PEval canonical_P(cplx z, const NodeSet& nodes, const TruncationPolicy& pol) {
    return p_product(z, nodes, pol, std::nullopt);
}

Scaled P_removed(cplx z, NodeId skip, const NodeSet& nodes, const TruncationPolicy& pol) {
    PEval pe = p_product(z, nodes, pol, skip);
    if (pe.node_hit)
        throw Error(Error::numeric, "P_removed hit a second node; nodes not distinct?");
    return pe.value;
}

Scaled P_prime_at_node(NodeId id, const NodeSet& nodes, const TruncationPolicy& pol) {
    cplx p = node_point(nodes, id);
    Scaled rest = P_removed(p, id, nodes, pol);
    if (id.k == 0) return rest;  // d/dz of the leading factor z is 1
    cplx mu = mu_of(nodes, id);
    return rest * Scaled(1.0 / (I_unit * mu));
}

Scaled P1_truncated(cplx z, const NodeSet& nodes, int N) {
    Scaled prod(z);
    for (int k = 1; k <= N; ++k) {
        cplx mu = nodes.mu_plus[k - 1];
        prod *= Scaled(1.0 + z / (I_unit * mu));
        prod *= Scaled(1.0 + z / (I_unit * std::conj(mu)));
    }
    return prod;
}

Scaled P2_truncated(cplx z, const NodeSet& nodes, int N) {
    Scaled prod(z);
    for (int k = 1; k <= N; ++k) {
        cplx mu = nodes.mu_minus[k - 1];
        prod *= Scaled(1.0 + z / (I_unit * mu));
        prod *= Scaled(1.0 + z / (I_unit * std::conj(mu)));
    }
    return prod;
}

Scaled sine_factor(cplx z, SineFactor which, const NodeSet& nodes, int N) {
    if (N > nodes.kmax_nodes) throw Error(Error::usage, "N exceeds the node set");
    Scaled prod = Scaled::one();
    switch (which) {
        case SineFactor::Q1:
        case SineFactor::R1: {
            const auto& mt = which == SineFactor::Q1 ? nodes.mut_plus : nodes.mut_minus;
            prod = Scaled(z);
            for (int k = 1; k <= N; ++k) {
                prod *= Scaled(1.0 - z / mt[k - 1]);
                prod *= Scaled(1.0 + z / std::conj(mt[k - 1]));  // mutilde_{-k} = -conj
            }
            return prod;
        }
        case SineFactor::Q2: {
            prod = Scaled(z * z);
            for (int k = 1; k <= N; ++k) {
                cplx mu = nodes.mu_plus[k - 1];
                prod *= Scaled(1.0 + z * z / mu);
                prod *= Scaled(1.0 + z * z / std::conj(mu));
            }
            return prod;
        }
        case SineFactor::R2: {
            cplx z4 = z * z * z * z;
            prod = Scaled(z4);
            for (int k = 1; k <= N; ++k) {
                cplx mu = nodes.mu_minus[k - 1];
                prod *= Scaled(1.0 + z4 / mu);
                prod *= Scaled(1.0 + z4 / std::conj(mu));
            }
            return prod;
        }
    }
    return prod;
}

double s_of(const MultiplierSpec& spec, double t) {
    return spec.a * t - spec.b * std::pow(t, spec.gamma);
}

MultiplierSpec build_multiplier(double T, Multiplier which, int N_M) {
    if (T <= 0.0) throw Error(Error::usage, "T must be positive");
    MultiplierSpec spec;
    spec.a = T / (4.0 * M_PI);
    if (which == Multiplier::M1) {
        spec.b = std::sqrt(2.0);
        spec.gamma = 0.5;
    } else {
        spec.b = 8.0 - 4.0 * std::sqrt(2.0);
        spec.gamma = 0.25;
    }
    spec.B = std::pow(spec.b / spec.a, 1.0 / (1.0 - spec.gamma));
    spec.taus.reserve(N_M);
    double lo = spec.B;
    for (int n = 1; n <= N_M; ++n) {
        double hi = (n + spec.b * std::pow(std::max(lo, 1.0), spec.gamma) + 1.0) / spec.a;
        while (s_of(spec, hi) < n) {
            hi *= 2.0;
            if (hi > 1e300) throw Error(Error::numeric, "multiplier bisection bracket overflow");
        }
        double a = lo, b = hi;
        for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
            double m = 0.5 * (a + b);
            (s_of(spec, m) < n ? a : b) = m;
        }
        double tau = 0.5 * (a + b);
        spec.taus.push_back(tau);
        lo = tau;
    }
    return spec;
}

Scaled eval_multiplier(cplx z, const MultiplierSpec& spec, bool tail) {
    cplx w = z - I_unit;
    cplx w2 = w * w;
    size_t N = spec.taus.size();
    if (N == 0) throw Error(Error::usage, "empty multiplier spec");
    Scaled prod = Scaled::one();
    size_t last = tail ? N - 1 : N;  // with a tail, atom N anchors the continuation
    for (size_t n = 0; n < last; ++n) {
        double t2 = spec.taus[n] * spec.taus[n];
        prod *= Scaled(1.0 - w2 / t2);
    }
    if (tail) {
        double X = spec.taus[N - 1];
        if (std::abs(w) > 0.5 * X)
            throw Error(Error::numeric, "multiplier truncation too small for |z-i|; raise N_M");
        cplx integral = stieltjes_log_tail(w2, X, spec.a, spec.b, spec.gamma);
        cplx g0 = std::log(1.0 - w2 / (X * X));
        cplx fprime = 2.0 * w2 / (X * (X * X - w2));
        double sprime = spec.a - spec.gamma * spec.b * std::pow(X, spec.gamma - 1.0);
        cplx gprime = fprime / sprime;
        prod *= Scaled::exp_of(integral + 0.5 * g0 - gprime / 12.0);
    }
    return prod;
}

PsiContext build_psi_context(double T, int kmax_psi, const TruncationPolicy& pol) {
    PsiContext ctx;
    ctx.nodes = build_nodes(T, std::max(pol.N_P, kmax_psi));
    ctx.m1 = build_multiplier(T, Multiplier::M1, pol.N_M);
    ctx.m2 = build_multiplier(T, Multiplier::M2, pol.N_M);
    ctx.pol = pol;
    ctx.ids.push_back(NodeId{0, Branch::plus});
    for (int k = 1; k <= kmax_psi; ++k)
        for (int sgn : {1, -1})
            for (Branch br : {Branch::plus, Branch::minus})
                ctx.ids.push_back(NodeId{sgn * k, br});
    for (const NodeId& id : ctx.ids) {
        Scaled pp = P_prime_at_node(id, ctx.nodes, ctx.pol);
        if (pp.log_abs() < -690.0)
            throw Error(Error::numeric, "P'(node) underflow; raise N_P or reduce kmax");
        ctx.pprime.push_back(pp);
        cplx p = node_point(ctx.nodes, id);
        ctx.m_at_node.push_back(eval_multiplier(p, ctx.m1, pol.tails) *
                                eval_multiplier(p, ctx.m2, pol.tails));
    }
    return ctx;
}

int psi_index(const PsiContext& ctx, NodeId j) {
    for (size_t i = 0; i < ctx.ids.size(); ++i)
        if (ctx.ids[i] == j) return int(i);
    throw Error(Error::usage, "node not in psi context");
}

Scaled psi(const PsiContext& ctx, NodeId j, cplx z) {
    int idx = psi_index(ctx, j);
    PEval pe = canonical_P(z, ctx.nodes, ctx.pol);
    if (pe.node_hit) {
        if (pe.hit == j) return Scaled::one();  // removable singularity, own node
        return Scaled::zero();
    }
    Scaled M = eval_multiplier(z, ctx.m1, ctx.pol.tails) *
               eval_multiplier(z, ctx.m2, ctx.pol.tails);
    cplx mu = mu_of(ctx.nodes, j);
    Scaled denom = ctx.pprime[idx] * Scaled(z + I_unit * mu) * ctx.m_at_node[idx];
    return pe.value * M / denom;
}

AppendixB verify_appendix_B(double x) {
    AppendixB out;
    // I(x) = int_R |s|^{1/4} / (1+(x-s)^2) ds, folded to s>0 and mapped s = u^4
    double S = std::max(1e4, 1000.0 * std::abs(x));
    double U = std::pow(S, 0.25);
    auto integrand = [&](double u) {
        double s = u * u * u * u;
        double a = x - s, b = x + s;
        return 4.0 * u * u * u * u * (1.0 / (1.0 + a * a) + 1.0 / (1.0 + b * b));
    };
    double I = integrate_checked(integrand, 0.0, U, 1e-10, 1e-10, 40);
    // analytic remainder of the s-tail: 2 s^{-2} (1 + (3x^2-1)/s^2 + ...)
    I += (8.0 / 3.0) * std::pow(S, -0.75) + 2.0 * (3.0 * x * x - 1.0) * std::pow(S, -2.75) / 2.75;
    out.integral = I;
    double pref = std::sqrt(M_PI) * std::pow(1.0 + x * x, 0.125);
    out.lower = pref * gamma_fn(5.0 / 8.0) / gamma_fn(9.0 / 8.0);
    out.upper = pref * gamma_fn(3.0 / 8.0) / gamma_fn(7.0 / 8.0);
    if (!(out.lower <= I && I <= out.upper))
        throw Error(Error::numeric, "appendix-B inequality violated");
    return out;
}

double appendix_A_theta(double x) {
    if (x <= 0.0) throw Error(Error::usage, "appendix-A theta needs x > 0");
    // t = u^4 regularizes the t^{-3/4} part of the measure
    auto integrand = [&](double u) {
        double u4 = u * u * u * u;
        double r = x / u4;
        double lg = std::log(std::abs(1.0 - r * r));
        return lg * (4.0 * u * u * u - 1.0);
    };
    double us = std::pow(x, 0.25);  // interior log singularity when x < 1
    if (us > 0.0 && us < 1.0) {
        double left = integrate(integrand, 0.0, us, 1e-9, 1e-9, 40);
        double right = integrate(integrand, us, 1.0, 1e-9, 1e-9, 40);
        return left + right;
    }
    return integrate(integrand, 0.0, 1.0, 1e-9, 1e-9, 40);
}

double multiplier_U(double x, const MultiplierSpec& spec) {
    double ax = std::abs(x);
    double X0 = std::max(4.0 * ax, 4.0 * spec.B);
    auto ds = [&](double t) { return spec.a - spec.gamma * spec.b * std::pow(t, spec.gamma - 1.0); };
    auto integrand = [&](double t) {
        double r = ax / t;
        return std::log(std::abs(1.0 - r * r)) * ds(t);
    };
    double I = 0.0;
    if (ax > spec.B) {
        I += integrate(integrand, spec.B, ax, 1e-9, 1e-9, 40);
        I += integrate(integrand, ax, X0, 1e-9, 1e-9, 40);
    } else {
        I += integrate(integrand, spec.B, X0, 1e-9, 1e-9, 40);
    }
    I += stieltjes_log_tail(cplx(ax * ax, 0.0), X0, spec.a, spec.b, spec.gamma).real();
    return I;
}

} // namespace ksc
