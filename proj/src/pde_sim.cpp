#include "kscontrol/pde_sim.hpp"

#include <cmath>
#include <functional>

namespace ksc {

namespace {

struct ModeBasis {
    int k = 0;
    qcplx nu_p, nu_m;  // eigenvalues of M_k (= conj(lambda^pm))
    qcplx th_p, th_m;  // second eigenvector components (= conj(theta^pm))
};

ModeBasis mode_basis(int k) {
    ModeBasis mb;
    mb.k = k;
    if (k == 0) return mb;
    EigenPair ev = eigenvalues(k);
    mb.nu_p = qcplx(std::conj(ev.lambda_plus));
    mb.nu_m = qcplx(std::conj(ev.lambda_minus));
    auto [ep, tp] = eta_theta(k, Branch::plus);
    auto [em, tm] = eta_theta(k, Branch::minus);
    (void)ep; (void)em;
    mb.th_p = qcplx(std::conj(tp));
    mb.th_m = qcplx(std::conj(tm));
    if (abs(mb.th_m - mb.th_p) < qreal(1e-12))
        throw Error(Error::numeric, "eigenvector basis degenerate");
    return mb;
}

// int_0^t e^{nu (t-s)} e^{r s + c0} ds = (e^{r t + c0} - e^{nu t + c0})/(r - nu);
// exponents stay O(1) because c0 carries the term's log scale and time origin
qcplx duhamel_offset(qcplx nu, qcplx r, qreal t, qcplx c0) {
    qcplx w = r - nu;
    if (abs(w) < qreal(1e-8)) {
        qcplx wt = t * w;
        return t * exp(nu * qcplx(t) + c0) *
               (qcplx(qreal(1)) + wt * qreal(0.5) + wt * wt * (qreal(1) / 6) +
                wt * wt * wt * (qreal(1) / 24));
    }
    return (exp(r * qcplx(t) + c0) - exp(nu * qcplx(t) + c0)) / w;
}

struct SignalRef {
    const std::vector<cplx>* rate = nullptr;
    const std::vector<qcplx>* mant = nullptr;
    const std::vector<double>* lg = nullptr;
    double t0 = 0.0;
};

struct Forcing {
    qcplx fu, fv;  // per-mode forcing vector multiplying the scalar signal
    SignalRef sig;
};

// offset exponent of term m: c0 = lg_m - rate_m * t0
qcplx term_offset(const SignalRef& s, size_t m) {
    return qcplx(qreal((*s.lg)[m])) - qcplx((*s.rate)[m]) * qreal(s.t0);
}

// state of mode k at time t under M_k evolution plus the forcing
std::pair<qcplx, qcplx> mode_state(const ModeBasis& mb, qcplx u0, qcplx v0,
                                   const Forcing& f, qreal t) {
    if (mb.k == 0) {
        qcplx u = u0, v = v0;
        if (f.sig.rate) {
            for (size_t m = 0; m < f.sig.rate->size(); ++m) {
                cplx r = (*f.sig.rate)[m];
                qcplx c0 = term_offset(f.sig, m);
                qcplx integ;
                if (std::abs(r) < 1e-13) integ = qcplx(t) * exp(c0);
                else integ = (exp(qcplx(r) * t + c0) - exp(c0)) / qcplx(r);
                u += f.fu * (*f.sig.mant)[m] * integ;
                v += f.fv * (*f.sig.mant)[m] * integ;
            }
        }
        return {u, v};
    }
    qcplx det = mb.th_m - mb.th_p;
    qcplx Ap = (u0 * mb.th_m - v0) / det;
    qcplx Am = (v0 - u0 * mb.th_p) / det;
    qcplx cp = Ap * exp(mb.nu_p * qcplx(t));
    qcplx cm = Am * exp(mb.nu_m * qcplx(t));
    if (f.sig.rate) {
        qcplx bp = (f.fu * mb.th_m - f.fv) / det;
        qcplx bm = (f.fv - f.fu * mb.th_p) / det;
        for (size_t m = 0; m < f.sig.rate->size(); ++m) {
            qcplx r((*f.sig.rate)[m]);
            qcplx c0 = term_offset(f.sig, m);
            qcplx co = (*f.sig.mant)[m];
            cp += bp * co * duhamel_offset(mb.nu_p, r, t, c0);
            cm += bm * co * duhamel_offset(mb.nu_m, r, t, c0);
        }
    }
    return {cp + cm, cp * mb.th_p + cm * mb.th_m};
}

SimResult evolve_common(const StatePair& init, double T, int kmax_sim, int nt,
                        const std::function<Forcing(int)>& make_forcing) {
    if (kmax_sim < std::max(init.u.kmax(), init.v.kmax()))
        throw Error(Error::usage, "kmax_sim must cover the initial data band");
    SimResult out;
    out.kmax = kmax_sim;
    std::vector<ModeBasis> basis;
    for (int k = -kmax_sim; k <= kmax_sim; ++k) basis.push_back(mode_basis(k));
    for (int i = 0; i <= nt; ++i) {
        double t = T * i / nt;
        PeriodicField u(kmax_sim), v(kmax_sim);
        for (int k = -kmax_sim; k <= kmax_sim; ++k) {
            const ModeBasis& mb = basis[k + kmax_sim];
            Forcing f = make_forcing(k);
            auto [uk, vk] = mode_state(mb, qcplx(init.u.coeff(k)), qcplx(init.v.coeff(k)),
                                       f, qreal(t));
            u.set_coeff(k, uk.to_double());
            v.set_coeff(k, vk.to_double());
            if (i == nt) out.terminal.push_back({k, uk, vk});
        }
        out.traj.times.push_back(t);
        out.traj.states.push_back({u, v});
    }
    return out;
}

SignalRef signal_ref(const ControlSignal& g) {
    SignalRef s;
    s.rate = &g.rate;
    s.mant = &g.mant;
    s.lg = &g.lg;
    s.t0 = g.t0;
    return s;
}

} // namespace

std::array<cplx, 4> mode_matrix(int k) {
    double kd = k;
    double k2 = kd * kd, k3 = k2 * kd, k4 = k2 * k2;
    return {cplx(-k4 + k2, k3), cplx(0, kd), cplx(0, kd), cplx(-k2, -kd)};
}

std::pair<cplx, cplx> mode_matrix_eigenvalues(int k) {
    auto m = mode_matrix(k);
    cplx tr = m[0] + m[3];
    cplx det = m[0] * m[3] - m[1] * m[2];
    cplx s = std::sqrt(tr * tr - 4.0 * det);
    if (std::real(std::conj(tr) * s) < 0.0) s = -s;
    cplx r1 = 0.5 * (tr + s);
    cplx r2 = det / r1;
    return {r1, r2};
}

std::pair<cplx, cplx> boundary_forcing(int k, ScenarioKind kind) {
    double kd = k;
    if (kind == ScenarioKind::boundary_u)
        return {cplx(-kd * kd, -(kd * kd * kd - kd)), cplx(-1.0, 0.0)};
    if (kind == ScenarioKind::boundary_v)
        return {cplx(-1.0, 0.0), cplx(1.0, -kd)};
    throw Error(Error::usage, "boundary_forcing needs a boundary scenario");
}

SimResult evolve_free(const StatePair& init, double T, int kmax_sim, int nt) {
    return evolve_common(init, T, kmax_sim, nt, [](int) { return Forcing{}; });
}

SimResult evolve_interior(const StatePair& init, const ControlScenario& sc,
                          const ControlSignal& g, int kmax_sim, int nt) {
    if (sc.kind != ScenarioKind::interior_u && sc.kind != ScenarioKind::interior_v)
        throw Error(Error::usage, "evolve_interior needs an interior scenario");
    SignalRef sig = signal_ref(g);
    bool on_u = sc.kind == ScenarioKind::interior_u;
    auto mk = [&sc, on_u, sig](int k) {
        Forcing f;
        cplx ck = profile_fk(sc.alpha, sc.rho.value, k) / (2.0 * M_PI);
        f.fu = on_u ? qcplx(ck) : qcplx();
        f.fv = on_u ? qcplx() : qcplx(ck);
        f.sig = sig;
        return f;
    };
    return evolve_common(init, g.T, kmax_sim, nt, mk);
}

SimResult evolve_boundary(const StatePair& init, ScenarioKind kind,
                          const ControlSignal& q, int kmax_sim, int nt) {
    SignalRef sig = signal_ref(q);
    auto mk = [kind, sig](int k) {
        Forcing f;
        auto [bu, bv] = boundary_forcing(k, kind);
        f.fu = qcplx(bu / (2.0 * M_PI));
        f.fv = qcplx(bv / (2.0 * M_PI));
        f.sig = sig;
        return f;
    };
    return evolve_common(init, q.T, kmax_sim, nt, mk);
}

AdjointResult adjoint_solve(const StatePair& terminal, const AdjointSource& src,
                            double T, int kmax_sim, int nt) {
    if (kmax_sim < std::max(terminal.u.kmax(), terminal.v.kmax()))
        throw Error(Error::usage, "kmax_sim must cover the terminal data band");
    AdjointResult out;
    std::vector<cplx> zero_rate{cplx(0.0, 0.0)};
    std::vector<qcplx> one_mant{qcplx(qreal(1))};
    std::vector<double> zero_lg{0.0};
    // forward variable s = T - t: Phi~' = N_k Phi~ + H, N_k = conj(M_k);
    // eigenvalues lambda^pm, eigenvectors (1, theta^pm)
    std::vector<StatePair> by_s;
    for (int i = 0; i <= nt; ++i) {
        double s = T * i / nt;
        PeriodicField phi(kmax_sim), psi(kmax_sim);
        for (int k = -kmax_sim; k <= kmax_sim; ++k) {
            ModeBasis mb = mode_basis(k);
            ModeBasis adj = mb;
            adj.nu_p = conj(mb.nu_p);
            adj.nu_m = conj(mb.nu_m);
            adj.th_p = conj(mb.th_p);
            adj.th_m = conj(mb.th_m);
            Forcing f;
            f.fu = qcplx(src.h1.coeff(k));
            f.fv = qcplx(src.h2.coeff(k));
            f.sig.rate = &zero_rate;
            f.sig.mant = &one_mant;
            f.sig.lg = &zero_lg;
            f.sig.t0 = 0.0;
            auto [pk, sk] = mode_state(adj, qcplx(terminal.u.coeff(k)),
                                       qcplx(terminal.v.coeff(k)), f, qreal(s));
            phi.set_coeff(k, pk.to_double());
            psi.set_coeff(k, sk.to_double());
        }
        by_s.push_back({phi, psi});
    }
    for (int i = 0; i <= nt; ++i) {
        double t = T * i / nt;
        out.traj.times.push_back(t);
        out.traj.states.push_back(by_s[nt - i]);  // Phi(t) = Phi~(T - t)
    }
    out.at_zero = by_s[nt];
    return out;
}

double duality_residual(ScenarioKind kind, const StatePair& init,
                        const StatePair& terminal, const ControlSignal& control,
                        const ControlScenario* profile_scenario, double T, int kmax) {
    bool has_control = !control.rate.empty();
    SimResult fwd;
    if (!has_control) {
        fwd = evolve_free(init, T, kmax, 2);
    } else if (kind == ScenarioKind::interior_u || kind == ScenarioKind::interior_v) {
        if (!profile_scenario) throw Error(Error::usage, "interior duality needs the profile");
        ControlScenario sc = *profile_scenario;
        sc.kind = kind;
        fwd = evolve_interior(init, sc, control, kmax, 2);
    } else {
        fwd = evolve_boundary(init, kind, control, kmax, 2);
    }
    AdjointSource no_src{PeriodicField(0), PeriodicField(0)};
    AdjointResult adj = adjoint_solve(terminal, no_src, T, kmax, 2);

    const StatePair& stT = fwd.traj.states.back();
    cplx lhs = duality_pairing(stT.u, terminal.u) + duality_pairing(stT.v, terminal.v) -
               duality_pairing(init.u, adj.at_zero.u) -
               duality_pairing(init.v, adj.at_zero.v);

    cplx rhs(0.0, 0.0);
    if (has_control) {
        SignalRef sig = signal_ref(control);
        qcplx acc;
        for (int k = -kmax; k <= kmax; ++k) {
            qcplx phiT(terminal.u.coeff(k)), psiT(terminal.v.coeff(k));
            // forcing weights of this mode (against 2pi-normalized pairing)
            qcplx wu, wv;
            if (kind == ScenarioKind::interior_u || kind == ScenarioKind::interior_v) {
                cplx ck = profile_fk(profile_scenario->alpha, profile_scenario->rho.value, k);
                if (kind == ScenarioKind::interior_u) wu = qcplx(ck);
                else wv = qcplx(ck);
            } else {
                auto [bu, bv] = boundary_forcing(k, kind);
                wu = qcplx(bu);
                wv = qcplx(bv);
            }
            if (k == 0) {
                qcplx factor = wu * conj(phiT) + wv * conj(psiT);
                for (size_t m = 0; m < sig.rate->size(); ++m) {
                    cplx r = (*sig.rate)[m];
                    qcplx c0 = term_offset(sig, m);
                    qcplx integ;
                    if (std::abs(r) < 1e-13) integ = qcplx(qreal(T)) * exp(c0);
                    else integ = (exp(qcplx(r) * qreal(T) + c0) - exp(c0)) / qcplx(r);
                    acc += factor * (*sig.mant)[m] * integ;
                }
                continue;
            }
            ModeBasis mb = mode_basis(k);
            qcplx th_p = conj(mb.th_p), th_m = conj(mb.th_m);  // theta^pm
            qcplx det = th_m - th_p;
            qcplx Ap = (phiT * th_m - psiT) / det;
            qcplx Am = (psiT - phiT * th_p) / det;
            for (int b = 0; b < 2; ++b) {
                qcplx A = b == 0 ? Ap : Am;
                qcplx th = b == 0 ? th_p : th_m;
                qcplx mu = b == 0 ? mb.nu_p : mb.nu_m;  // conj(lambda^pm)
                qcplx weight = conj(A) * (wu + wv * conj(th));
                // int_0^T e^{mu (T-t)} e^{rate t + c0} dt, same offset kernel
                for (size_t m = 0; m < sig.rate->size(); ++m)
                    acc += weight * (*sig.mant)[m] *
                           duhamel_offset(mu, qcplx((*sig.rate)[m]), qreal(T),
                                          term_offset(sig, m));
            }
        }
        rhs = acc.to_double();
    }
    return std::abs(lhs - rhs);
}

EnergyCheck energy_check(const StatePair& terminal, const AdjointSource& src,
                         double T, int kmax, int nt) {
    EnergyCheck out;
    int nx = std::max(512, 8 * kmax);
    double sup_H = 0.0;
    std::vector<cplx> zero_rate{cplx(0.0, 0.0)};
    std::vector<qcplx> one_mant{qcplx(qreal(1))};
    std::vector<double> zero_lg{0.0};
    for (int i = 0; i <= nt; ++i) {
        double s = T * i / nt;
        PeriodicField phi(kmax), psi(kmax), dphi(kmax), dpsi(kmax);
        for (int k = -kmax; k <= kmax; ++k) {
            ModeBasis mb = mode_basis(k);
            ModeBasis adj = mb;
            adj.nu_p = conj(mb.nu_p);
            adj.nu_m = conj(mb.nu_m);
            adj.th_p = conj(mb.th_p);
            adj.th_m = conj(mb.th_m);
            Forcing f;
            f.fu = qcplx(src.h1.coeff(k));
            f.fv = qcplx(src.h2.coeff(k));
            f.sig.rate = &zero_rate;
            f.sig.mant = &one_mant;
            f.sig.lg = &zero_lg;
            f.sig.t0 = 0.0;
            auto [pk, sk] = mode_state(adj, qcplx(terminal.u.coeff(k)),
                                       qcplx(terminal.v.coeff(k)), f, qreal(s));
            cplx p = pk.to_double(), q = sk.to_double();
            phi.set_coeff(k, p);
            psi.set_coeff(k, q);
            // N_k rows: phi' = (-k^4-ik^3+k^2) phi - ik psi + h1
            double kd = k;
            cplx a(-kd * kd * kd * kd + kd * kd, -kd * kd * kd);
            cplx d(-kd * kd, kd);
            cplx ik(0, kd);
            dphi.set_coeff(k, a * p - ik * q + src.h1.coeff(k));
            dpsi.set_coeff(k, d * q - ik * p + src.h2.coeff(k));
        }
        double E = 0, D1 = 0, D2 = 0, dE = 0, E2 = 0, dE2 = 0, D4 = 0;
        for (int k = -kmax; k <= kmax; ++k) {
            double k2 = double(k) * k, k4 = k2 * k2;
            cplx p = phi.coeff(k), q = psi.coeff(k), dp = dphi.coeff(k), dq = dpsi.coeff(k);
            E += std::norm(p) + std::norm(q);
            D1 += k4 * std::norm(p);
            D2 += k2 * std::norm(q);
            dE += 2.0 * (std::real(dp * std::conj(p)) + std::real(dq * std::conj(q)));
            E2 += k4 * std::norm(p) + k2 * std::norm(q);
            dE2 += 2.0 * (k4 * std::real(dp * std::conj(p)) + k2 * std::real(dq * std::conj(q)));
            D4 += k4 * k4 * std::norm(p) + k4 * std::norm(q);
        }
        double tp = 2.0 * M_PI;
        E *= tp; D1 *= tp; D2 *= tp; dE *= tp; E2 *= tp; dE2 *= tp; D4 *= tp;
        (void)E;
        double q_h1phi = 0, q_h2psi = 0, q_phi2 = 0;
        for (int m = 0; m < nx; ++m) {
            double x = 2.0 * M_PI * m / nx;
            cplx pv = phi.sample(x), h1v = src.h1.sample(x), h2v = src.h2.sample(x);
            cplx qv = psi.sample(x);
            q_h1phi += std::abs(h1v * std::conj(pv));
            q_h2psi += std::abs(h2v * std::conj(qv));
            q_phi2 += std::norm(pv);
        }
        double w = 2.0 * M_PI / nx;
        q_h1phi *= w; q_h2psi *= w; q_phi2 *= w;
        double lhsL2 = dE + D1 + 2.0 * D2;
        double rhsL2 = 2.0 * q_h1phi + 2.0 * q_h2psi + q_phi2;
        double scale = std::max({1.0, std::abs(lhsL2), rhsL2});
        out.max_violation_L2 = std::max(out.max_violation_L2, (lhsL2 - rhsL2) / scale);
        // H^2 x H^1 level with pinned Young constants (epsilon = 1/2)
        cplx ip1(0, 0), ip2(0, 0);
        for (int k = -kmax; k <= kmax; ++k) {
            double k2 = double(k) * k, k4 = k2 * k2;
            ip1 += src.h1.coeff(k) * k4 * std::conj(phi.coeff(k));
            ip2 += src.h2.coeff(k) * (-k2) * std::conj(psi.coeff(k));
        }
        double lhsH = dE2 + D4;
        double rhsH = 4.0 * E2 + 2.0 * tp * std::abs(ip1) + 2.0 * tp * std::abs(ip2);
        double scaleH = std::max({1.0, std::abs(lhsH), rhsH});
        out.max_violation_H = std::max(out.max_violation_H, (lhsH - rhsH) / scaleH);
        double normH = std::sqrt(sobolev_norm(phi, 2.0) * sobolev_norm(phi, 2.0) +
                                 sobolev_norm(psi, 1.0) * sobolev_norm(psi, 1.0));
        sup_H = std::max(sup_H, normH);
    }
    double h_norm = std::sqrt(T) * std::sqrt(sobolev_norm(src.h1, 0.0) * sobolev_norm(src.h1, 0.0) +
                                             sobolev_norm(src.h2, 0.0) * sobolev_norm(src.h2, 0.0));
    double term_norm = std::sqrt(sobolev_norm(terminal.u, 2.0) * sobolev_norm(terminal.u, 2.0) +
                                 sobolev_norm(terminal.v, 1.0) * sobolev_norm(terminal.v, 1.0));
    out.estimate_ratio = sup_H / std::max(1e-300, h_norm + term_norm);
    return out;
}

TerminalReport terminal_report(const SimResult& sim, int Kc) {
    TerminalReport rep;
    double uu_all = 0, vv_all = 0, uu_leak = 0, vv_leak = 0, uu_enf = 0, vv_enf = 0;
    for (const ModeTerminal& m : sim.terminal) {
        double k2 = double(m.k) * m.k;
        double wu = std::pow(1.0 + k2, -2.0), wv = std::pow(1.0 + k2, -1.0);
        qreal au = abs(m.u), av = abs(m.v);
        double u2 = double(au * au), v2 = double(av * av);
        uu_all += wu * u2;
        vv_all += wv * v2;
        double mode_mag = std::sqrt(wu * u2 + wv * v2);
        if (std::abs(m.k) <= Kc) {
            uu_enf += wu * u2;
            vv_enf += wv * v2;
            rep.enforced_max_mode = std::max(rep.enforced_max_mode, mode_mag);
        } else {
            uu_leak += wu * u2;
            vv_leak += wv * v2;
        }
        double lg = mode_mag > 0.0 ? std::log(mode_mag)
                                   : (au > 0 || av > 0 ? double(logq(au + av)) : -1e308);
        rep.mode_log_mag.push_back({m.k, lg});
    }
    rep.dual_norm = std::sqrt(uu_all) + std::sqrt(vv_all);
    rep.enforced_dual = std::sqrt(uu_enf) + std::sqrt(vv_enf);
    rep.leaked_dual = std::sqrt(uu_leak) + std::sqrt(vv_leak);
    return rep;
}

} // namespace ksc
