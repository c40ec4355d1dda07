#include "kscontrol/moment_control.hpp"

#include <cmath>

namespace ksc {

const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::interior_u: return "interior_u";
        case ScenarioKind::interior_v: return "interior_v";
        case ScenarioKind::boundary_u: return "boundary_u";
        case ScenarioKind::boundary_v: return "boundary_v";
    }
    return "?";
}

ScenarioKind scenario_from_name(const std::string& s) {
    if (s == "interior_u") return ScenarioKind::interior_u;
    if (s == "interior_v") return ScenarioKind::interior_v;
    if (s == "boundary_u") return ScenarioKind::boundary_u;
    if (s == "boundary_v") return ScenarioKind::boundary_v;
    throw Error(Error::usage, "unknown scenario: " + s);
}

RhoSpec make_rho(long a, long b, long c) {
    if (a == 0) throw Error(Error::usage, "rho polynomial must be quadratic");
    double disc = double(b) * b - 4.0 * double(a) * c;
    if (disc <= 0.0) throw Error(Error::usage, "rho polynomial has no real roots");
    double sq = std::sqrt(disc);
    long isq = std::lround(sq);
    if (isq * isq == (long)(double(b) * b - 4.0 * double(a) * c))
        throw Error(Error::usage, "rho polynomial is reducible: rational roots");
    RhoSpec spec{a, b, c, 0.0};
    double r1 = (-b + sq) / (2.0 * a), r2 = (-b - sq) / (2.0 * a);
    if (r1 > 0.0 && r1 < 1.0) spec.value = r1;
    else if (r2 > 0.0 && r2 < 1.0) spec.value = r2;
    else throw Error(Error::usage, "rho polynomial has no root in (0,1)");
    return spec;
}

cplx profile_fk(double alpha, double rho, int k) {
    if (k == 0) return cplx(rho * M_PI, 0.0);
    cplx ik(0.0, double(k));
    cplx v = std::exp(-ik * alpha) / ik * (1.0 - std::exp(-ik * (rho * M_PI)));
    if (std::abs(v) == 0.0)
        throw Error(Error::numeric, "profile coefficient vanished; rho not irrational?");
    return v;
}

LiouvilleReport liouville_constant(const RhoSpec& rho, long qmax) {
    LiouvilleReport rep;
    rep.qmax = qmax;
    double r = rho.value;
    double M = std::max(std::abs(2.0 * rho.a * (r - 1.0) + rho.b),
                        std::abs(2.0 * rho.a * (r + 1.0) + rho.b));
    rep.analytic_C = 1.0 / (M + 1.0);
    double emin = 1e308, fmin = 1e308;
    for (long q = 1; q <= qmax; ++q) {
        double x = q * r;
        double dist = std::abs(x - std::round(x));
        emin = std::min(emin, double(q) * q * dist);
        double fk = 2.0 * std::abs(std::sin(q * r * M_PI / 2.0)) / q;
        fmin = std::min(fmin, double(q) * q * fk);
    }
    rep.empirical_min = emin;
    rep.min_k2_fk = fmin;
    if (emin < rep.analytic_C)
        throw Error(Error::numeric, "empirical Diophantine scan fell below the analytic bound");
    return rep;
}

namespace {

cplx boundary_u_denominator(int k, cplx theta_bar) {
    double kd = k;
    return cplx(kd * kd, kd * kd * kd - kd) + theta_bar;
}
cplx boundary_v_denominator(int k, cplx theta_bar) {
    double kd = k;
    return -1.0 + (1.0 - cplx(0, kd)) * theta_bar;
}

} // namespace

cplx gamma_target(const ControlScenario& sc, const StatePair& init, int k, Branch br) {
    if (k == 0) throw Error(Error::usage, "mode-0 target is gamma_zero");
    auto [eta, theta] = eta_theta(k, br);
    (void)eta;
    cplx tb = std::conj(theta);
    PeriodicField e(std::abs(k));
    e.set_coeff(k, cplx(1.0, 0.0));
    cplx base = duality_pairing(init.u, e) + tb * duality_pairing(init.v, e);
    switch (sc.kind) {
        case ScenarioKind::interior_u:
        case ScenarioKind::interior_v:
            return base;
        case ScenarioKind::boundary_u: {
            cplx den = boundary_u_denominator(k, tb);
            if (std::abs(den) < 1e-12)
                throw Error(Error::numeric, "boundary_u denominator vanished");
            return base / den;
        }
        case ScenarioKind::boundary_v: {
            cplx den = boundary_v_denominator(k, tb);
            if (std::abs(den) < 1e-12)
                throw Error(Error::numeric, "boundary_v denominator vanished");
            return base / den;
        }
    }
    return {};
}

cplx gamma_zero(const ControlScenario& sc, const StatePair& init) {
    switch (sc.kind) {
        case ScenarioKind::interior_u: return mean(init.u);
        case ScenarioKind::interior_v: return mean(init.v);
        case ScenarioKind::boundary_u: return mean(init.v);
        case ScenarioKind::boundary_v: return cplx(0.0, 0.0);  // no Theta_0 term
    }
    return {};
}

MomentProblem assemble_moment_problem(const ControlScenario& sc, const StatePair& init,
                                      double T, int Kc, double mean_tol) {
    double mu = std::abs(mean(init.u)), mv = std::abs(mean(init.v));
    switch (sc.kind) {
        case ScenarioKind::interior_u:
            if (mv > mean_tol)
                throw Error(Error::constraint,
                            "compatibility condition violated: interior_u (control in the "
                            "fourth-order component) requires <v0,1> = 0");
            break;
        case ScenarioKind::interior_v:
            if (mu > mean_tol)
                throw Error(Error::constraint,
                            "compatibility condition violated: interior_v (control in the "
                            "heat component) requires <u0,1> = 0");
            break;
        case ScenarioKind::boundary_u:
            if (mu > mean_tol)
                throw Error(Error::constraint,
                            "compatibility condition violated: boundary_u (jump control on "
                            "the fourth-order component) requires <u0,1> = 0");
            break;
        case ScenarioKind::boundary_v:
            if (mu > mean_tol || mv > mean_tol)
                throw Error(Error::constraint,
                            "compatibility condition violated: boundary_v (jump control on "
                            "the heat component) requires <u0,1> = 0 and <v0,1> = 0");
            break;
    }

    MomentProblem pb;
    pb.scenario = sc;
    pb.T = T;
    pb.Kc = Kc;
    pb.family = build_family(T, Kc);
    pb.targets.resize(pb.family.mu.size());

    for (size_t l = 0; l < pb.family.mu.size(); ++l) {
        FamilyLabel lb = pb.family.labels[l];
        if (lb.k == 0) {
            switch (sc.kind) {
                case ScenarioKind::interior_u:
                case ScenarioKind::interior_v:
                    pb.targets[l] = Scaled(-gamma_zero(sc, init) /
                                           profile_fk(sc.alpha, sc.rho.value, 0));
                    break;
                case ScenarioKind::boundary_u:
                    pb.targets[l] = Scaled(gamma_zero(sc, init));
                    break;
                case ScenarioKind::boundary_v:
                    pb.targets[l] = Scaled::zero();  // int q = 0
                    break;
            }
            continue;
        }
        cplx gm = gamma_target(sc, init, lb.k, lb.branch);
        cplx mu_l = pb.family.mu[l];
        Scaled damp = Scaled::exp_of(mu_l * (T / 2.0));
        switch (sc.kind) {
            case ScenarioKind::interior_u:
                pb.targets[l] = -damp * Scaled(gm / profile_fk(sc.alpha, sc.rho.value, lb.k));
                break;
            case ScenarioKind::interior_v: {
                auto [eta, theta] = eta_theta(lb.k, lb.branch);
                (void)eta;
                pb.targets[l] = -damp * Scaled(gm / (std::conj(theta) *
                                                     profile_fk(sc.alpha, sc.rho.value, lb.k)));
                break;
            }
            case ScenarioKind::boundary_u:
            case ScenarioKind::boundary_v:
                pb.targets[l] = damp * Scaled(gm);
                break;
        }
    }
    return pb;
}

cplx ControlSignal::eval(double t) const {
    // pointwise values sit far below the coefficient scale, so the sum is
    // accumulated in solver precision around the largest term
    size_t n = rate.size();
    qreal lg_max = -1e308;
    for (size_t m = 0; m < n; ++m) {
        if (abs(mant[m]) == 0) continue;
        qreal e = qreal(lg[m]) + qreal(rate[m].real()) * qreal(t - t0);
        if (e > lg_max) lg_max = e;
    }
    if (double(lg_max) == -1e308) return {0.0, 0.0};
    qcplx acc;
    for (size_t m = 0; m < n; ++m) {
        if (abs(mant[m]) == 0) continue;
        qcplx ex = qcplx(rate[m]) * qreal(t - t0) + qcplx(qreal(lg[m]) - lg_max);
        if (ex.re < qreal(-11300)) continue;
        acc += mant[m] * exp(ex);
    }
    qcplx out = acc * expq(lg_max);
    return out.to_double();
}

double ControlSignal::l2_norm() const {
    // int_0^T e^{(r_a + conj r_b)(t - t0)} dt accumulated in solver precision
    qcplx acc;
    qreal lg_max = -1e308;
    size_t n = rate.size();
    std::vector<qcplx> mants(n * n);
    std::vector<qreal> lgs(n * n);
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            qcplx w = qcplx(rate[a]) + conj(qcplx(rate[b]));
            double s;
            qcplx iv;
            if (abs(w) < qreal(1e-13)) {
                iv = qcplx(qreal(T));
                s = 0.0;
            } else {
                s = double(fabsq(w.re) * qreal(std::max(T - t0, t0)));
                qcplx hi = exp(qreal(T - t0) * w - qcplx(qreal(s)));
                qcplx lo = exp(qreal(-t0) * w - qcplx(qreal(s)));
                iv = (hi - lo) / w;
            }
            mants[a * n + b] = mant[a] * conj(mant[b]) * iv;
            lgs[a * n + b] = qreal(lg[a]) + qreal(lg[b]) + qreal(s);
            if (abs(mants[a * n + b]) > 0 && lgs[a * n + b] > lg_max)
                lg_max = lgs[a * n + b];
        }
    }
    if (double(lg_max) == -1e308) return 0.0;
    for (size_t i = 0; i < mants.size(); ++i) {
        qreal d = lgs[i] - lg_max;
        if (double(d) < -11300.0) continue;
        acc += mants[i] * expq(d);
    }
    double v = double(acc.re);
    return std::sqrt(std::max(0.0, v)) * std::exp(double(lg_max) / 2.0);
}

ControlSignal synthesize(const MomentProblem& problem, const BiorthogonalFamily& bio) {
    if (bio.family.mu.size() != problem.family.mu.size() ||
        std::abs(bio.family.T - problem.T) > 1e-14)
        throw Error(Error::usage, "biorthogonal family does not match the moment problem");
    for (size_t i = 0; i < bio.family.mu.size(); ++i)
        if (std::abs(bio.family.mu[i] - problem.family.mu[i]) > 1e-12)
            throw Error(Error::usage, "exponent mismatch between family and problem");

    size_t n = bio.family.mu.size();
    // B a = targets  <=>  Ghat (D a) = D^{-1} targets
    std::vector<qcplx> rhs(n);
    for (size_t l = 0; l < n; ++l) {
        const Scaled& t = problem.targets[l];
        if (t.is_zero()) continue;
        double e = t.e - bio.logD[l];
        if (e < -11300.0) continue;
        rhs[l] = qcplx(t.m) * expq(qreal(e));
    }
    std::vector<qcplx> ahat = gram_solve_normalized(bio, rhs, 2);

    ControlSignal g;
    g.kind = problem.scenario.kind;
    g.T = problem.T;
    g.t0 = problem.T / 2.0;
    g.rate.resize(n);
    g.mant.resize(n);
    g.lg.resize(n);
    for (size_t m = 0; m < n; ++m) {
        // gtilde on [-T/2,T/2] maps to [0,T] through the explicit origin t0
        g.rate[m] = -std::conj(bio.family.mu[m]);
        g.mant[m] = ahat[m];
        g.lg[m] = -bio.logD[m];
    }
    return g;
}

MomentResiduals moment_residuals(const ControlSignal& g, const MomentProblem& problem,
                                 int K_report) {
    MomentResiduals out;
    size_t n = problem.family.mu.size();
    qreal T = problem.T;
    if (std::abs(g.t0 - problem.T / 2.0) > 1e-14)
        throw Error(Error::usage, "moment residuals need a control with t0 = T/2");
    auto moment_at = [&](cplx mu_l) -> Scaled {
        // I = int_{-T/2}^{T/2} e^{-mu_l t} gtilde(t) dt with gtilde(t) = g(t + t0),
        // which is exactly sum_m mant e^{lg} e^{rate t}. Scale sums in qreal.
        std::vector<qcplx> mants(g.rate.size());
        std::vector<qreal> lgs(g.rate.size());
        qreal lg_max = -1e308;
        for (size_t m = 0; m < g.rate.size(); ++m) {
            // exponent sum in solver precision: the double-rounded sum would
            // perturb each term at ulp level, which the coefficient norms amplify
            qcplx w = qcplx(g.rate[m]) - qcplx(mu_l);
            double s;
            qcplx iv;
            if (abs(w) < qreal(1e-13)) {
                iv = qcplx(qreal(T));
                s = 0.0;
            } else {
                s = double(fabsq(w.re) * T / 2);
                qcplx hi = exp(qreal(0.5) * T * w - qcplx(qreal(s)));
                qcplx lo = exp(qreal(-0.5) * T * w - qcplx(qreal(s)));
                iv = (hi - lo) / w;
            }
            mants[m] = g.mant[m] * iv;
            lgs[m] = qreal(g.lg[m]) + qreal(s);
            if (abs(mants[m]) > 0 && lgs[m] > lg_max) lg_max = lgs[m];
        }
        if (double(lg_max) == -1e308) return Scaled::zero();
        qcplx acc;
        for (size_t m = 0; m < mants.size(); ++m) {
            qreal d = lgs[m] - lg_max;
            if (double(d) < -11300.0) continue;
            acc += mants[m] * expq(d);
        }
        return Scaled(acc.to_double(), double(lg_max));
    };

    for (size_t l = 0; l < n; ++l) {
        FamilyLabel lb = problem.family.labels[l];
        cplx mu_l = problem.family.mu[l];
        Scaled I = moment_at(mu_l);
        Scaled diff = I - problem.targets[l];
        Scaled weighted = Scaled::exp_of(mu_l * (problem.T / 2.0)) * diff;
        MomentResidualRow row;
        row.k = lb.k;
        row.branch = lb.branch;
        row.enforced = true;
        row.weighted = abs_value(weighted);
        row.raw_log = diff.log_abs();
        out.rows.push_back(row);
        out.max_enforced_weighted = std::max(out.max_enforced_weighted, row.weighted);
    }
    for (int k = problem.Kc + 1; k <= K_report; ++k) {
        for (int s : {k, -k}) {
            EigenPair ev = eigenvalues(s);
            for (Branch br : {Branch::plus, Branch::minus}) {
                cplx mu_l = std::conj(br == Branch::plus ? ev.lambda_plus : ev.lambda_minus);
                Scaled I = moment_at(mu_l);
                MomentResidualRow row;
                row.k = s;
                row.branch = br;
                row.enforced = false;
                row.weighted = abs_value(Scaled::exp_of(mu_l * (problem.T / 2.0)) * I);
                row.raw_log = I.log_abs();
                out.rows.push_back(row);
            }
        }
    }
    return out;
}

} // namespace ksc
