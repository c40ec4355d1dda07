#include "kscontrol/spectrum.hpp"

#include <algorithm>
#include <cmath>

namespace ksc {

namespace {

void check_k(int k) {
    if (k == 0) throw Error(Error::numeric, "mode k=0 has the double eigenvalue 0; use the zero-mode record");
    if (std::abs(k) > kmax_guard) throw Error(Error::usage, "|k| exceeds the overflow guard 1e4");
}

} // namespace

std::pair<cplx, cplx> modal_quadratic(int k) {
    double kd = k;
    double k2 = kd * kd, k3 = k2 * kd, k4 = k2 * k2, k6 = k3 * k3;
    cplx p(k4, k3 - kd);
    cplx q(k6 + k2, k3);
    return {p, q};
}

EigenPair eigenvalues(int k) {
    check_k(k);
    auto [p, q] = modal_quadratic(k);
    cplx s = std::sqrt(p * p - 4.0 * q);
    // pick the sign that adds magnitudes, then recover the other root by Vieta
    if (std::real(std::conj(p) * s) < 0.0) s = -s;
    cplx r1 = -0.5 * (p + s);
    cplx r2 = q / r1;

    double kd = k;
    cplx anchor_plus(-kd * kd, kd);
    cplx anchor_minus(-kd * kd * kd * kd + kd * kd, -kd * kd * kd);
    double d11 = std::abs(r1 - anchor_plus) + std::abs(r2 - anchor_minus);
    double d21 = std::abs(r2 - anchor_plus) + std::abs(r1 - anchor_minus);

    EigenPair out;
    if (d11 < d21) {
        out.lambda_plus = r1;
        out.lambda_minus = r2;
    } else if (d21 < d11) {
        out.lambda_plus = r2;
        out.lambda_minus = r1;
    } else {
        out.tie_warning = true;
        if (r1.real() >= r2.real()) { out.lambda_plus = r1; out.lambda_minus = r2; }
        else                        { out.lambda_plus = r2; out.lambda_minus = r1; }
    }
    return out;
}

std::pair<cplx, cplx> eta_theta(int k, Branch branch) {
    check_k(k);
    EigenPair ev = eigenvalues(k);
    cplx lambda = branch == Branch::plus ? ev.lambda_plus : ev.lambda_minus;
    if (std::abs(lambda) < 1e-14)
        throw Error(Error::numeric, "lambda vanishes away from k=0: branch or mode error");
    double kd = k;
    double k2 = kd * kd, k5 = k2 * k2 * kd;
    cplx eta = cplx(0, -k5) - (1.0 + lambda) * cplx(0, kd) + k2 - lambda;
    cplx theta = eta / lambda;
    if (std::abs(eta) == 0.0 || std::abs(theta) == 0.0)
        throw Error(Error::numeric, "eta/theta vanished for k != 0");
    return {eta, theta};
}

cplx mu_tilde(int k, Branch branch) {
    check_k(k);
    EigenPair ev = eigenvalues(k);
    cplx lambda = branch == Branch::plus ? ev.lambda_plus : ev.lambda_minus;
    cplx neg_mu = -std::conj(lambda);
    // principal roots; -mu never touches the negative real axis for k != 0
    if (neg_mu.real() < 0.0 && std::abs(neg_mu.imag()) < 1e-12 * std::abs(neg_mu))
        throw Error(Error::numeric, "-mu on the negative real axis");
    double sgn = k > 0 ? 1.0 : -1.0;
    cplx r = std::sqrt(neg_mu);
    if (branch == Branch::minus) r = std::sqrt(r);
    return sgn * r;
}

SpectralNode spectral_node(int k, Branch branch) {
    SpectralNode n;
    n.k = k;
    n.branch = branch;
    EigenPair ev = eigenvalues(k);
    n.tie_warning = ev.tie_warning;
    n.lambda = branch == Branch::plus ? ev.lambda_plus : ev.lambda_minus;
    n.mu = std::conj(n.lambda);
    std::tie(n.eta, n.theta) = eta_theta(k, branch);
    n.mu_tilde = mu_tilde(k, branch);
    return n;
}

SpectrumTable build_table(int kmax) {
    if (kmax < 0) throw Error(Error::usage, "kmax must be >= 0");
    if (kmax > kmax_guard) throw Error(Error::usage, "kmax exceeds the overflow guard 1e4");
    SpectrumTable t;
    t.kmax = kmax;
    for (int k = 1; k <= kmax; ++k) {
        for (int s : {k, -k}) {
            t.nodes.push_back(spectral_node(s, Branch::plus));
            t.nodes.push_back(spectral_node(s, Branch::minus));
        }
    }
    return t;
}

GapReport spectral_gap(int kmax) {
    if (kmax < 1) throw Error(Error::usage, "spectral_gap needs kmax >= 1");
    struct Item { cplx v; int k; Branch br; };
    std::vector<Item> items;
    items.push_back({cplx(0, 0), 0, Branch::plus});  // lambda_0 = 0
    for (int k = 1; k <= kmax; ++k) {
        for (int s : {k, -k}) {
            EigenPair ev = eigenvalues(s);
            items.push_back({ev.lambda_plus, s, Branch::plus});
            items.push_back({ev.lambda_minus, s, Branch::minus});
        }
    }
    GapReport rep;
    rep.min_gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < items.size(); ++i) {
        for (size_t j = i + 1; j < items.size(); ++j) {
            double d = std::abs(items[i].v - items[j].v);
            if (d < rep.min_gap) {
                rep.min_gap = d;
                rep.k_a = items[i].k; rep.br_a = items[i].br;
                rep.k_b = items[j].k; rep.br_b = items[j].br;
                rep.includes_zero = (items[i].k == 0 || items[j].k == 0);
            }
        }
    }
    return rep;
}

DenominatorReport denominator_check(int kmax) {
    if (kmax < 1) throw Error(Error::usage, "denominator_check needs kmax >= 1");
    DenominatorReport rep;
    rep.min_boundary_u = rep.min_boundary_v = rep.min_boundary_v_used =
        std::numeric_limits<double>::infinity();
    for (int k = 1; k <= kmax; ++k) {
        for (int s : {k, -k}) {
            for (Branch br : {Branch::plus, Branch::minus}) {
                auto [eta, theta] = eta_theta(s, br);
                (void)eta;
                double kd = s;
                cplx tb = std::conj(theta);
                cplx d1 = cplx(kd * kd, kd * kd * kd - kd) + tb;
                cplx d2 = 1.0 + (1.0 - cplx(0, kd)) * tb;
                cplx d2u = -1.0 + (1.0 - cplx(0, kd)) * tb;
                DenominatorRow row{s, br, std::abs(d1), std::abs(d2), std::abs(d2u)};
                rep.rows.push_back(row);
                rep.min_boundary_u = std::min(rep.min_boundary_u, row.den_boundary_u);
                rep.min_boundary_v = std::min(rep.min_boundary_v, row.den_boundary_v);
                rep.min_boundary_v_used = std::min(rep.min_boundary_v_used, row.den_boundary_v_used);
            }
        }
    }
    return rep;
}

} // namespace ksc
