#include "kscontrol/biortho.hpp"

#include <algorithm>
#include <cmath>

namespace ksc {

namespace {

const qreal q_eps = FLT128_EPSILON;

qreal q_log1p(qreal x) { return log1pq(x); }

} // namespace

ExponentFamily build_family(double T, int Kc) {
    if (T <= 0.0) throw Error(Error::usage, "T must be positive");
    if (Kc < 0) throw Error(Error::usage, "Kc must be >= 0");
    ExponentFamily fam;
    fam.T = T;
    fam.Kc = Kc;
    fam.mu.push_back(cplx(0.0, 0.0));
    fam.labels.push_back(FamilyLabel{0, Branch::plus});
    for (int k = 1; k <= Kc; ++k) {
        for (int s : {k, -k}) {
            EigenPair ev = eigenvalues(s);
            fam.mu.push_back(std::conj(ev.lambda_plus));
            fam.labels.push_back(FamilyLabel{s, Branch::plus});
            fam.mu.push_back(std::conj(ev.lambda_minus));
            fam.labels.push_back(FamilyLabel{s, Branch::minus});
        }
    }
    for (size_t i = 0; i < fam.mu.size(); ++i)
        for (size_t j = i + 1; j < fam.mu.size(); ++j)
            if (std::abs(fam.mu[i] - fam.mu[j]) < 1e-12)
                throw Error(Error::numeric, "exponent family has coincident entries");
    return fam;
}

int family_index(const ExponentFamily& fam, int k, Branch br) {
    for (size_t i = 0; i < fam.labels.size(); ++i)
        if (fam.labels[i].k == k && (k == 0 || fam.labels[i].branch == br)) return int(i);
    throw Error(Error::usage, "mode not in the exponent family");
}

Scaled pair_integral(cplx mu_a, cplx mu_b, double T) {
    cplx w = mu_a + std::conj(mu_b);
    if (std::abs(w) <= 1e-12) return Scaled(T);
    double s = std::abs(w.real()) * T / 2.0;
    cplx hi = std::exp(w * (T / 2.0) - s);    // Re exponent <= 0
    cplx lo = std::exp(-w * (T / 2.0) - s);
    return Scaled((hi - lo) / w, s);
}

qcplx pair_integral_mantissa(qcplx mu_a, qcplx mu_b, qreal T, double* log_scale) {
    qcplx w = mu_a + conj(mu_b);
    if (abs(w) <= qreal(1e-12)) {
        *log_scale = 0.0;
        return qcplx(T);
    }
    // the scale lives on a double lattice so that value = mantissa * e^{scale}
    // recombines exactly across callers
    double s = double(fabsq(w.re) * T / 2);
    qcplx hi = exp(qreal(0.5) * T * w - qcplx(qreal(s)));
    qcplx lo = exp(qreal(-0.5) * T * w - qcplx(qreal(s)));
    *log_scale = s;
    return (hi - lo) / w;
}

std::vector<std::vector<cplx>> gram_matrix(const ExponentFamily& fam) {
    size_t n = fam.mu.size();
    std::vector<std::vector<cplx>> B(n, std::vector<cplx>(n));
    for (size_t j = 0; j < n; ++j) {
        for (size_t l = j; l < n; ++l) {
            cplx v = pair_integral(fam.mu[j], fam.mu[l], fam.T).value();
            B[j][l] = v;
            B[l][j] = std::conj(v);  // Hermitian by construction
        }
    }
    return B;
}

namespace {

struct NormalizedGram {
    std::vector<double> logD;                // 0.5 log B_mm
    std::vector<std::vector<qcplx>> ghat;    // unit-diagonal Hermitian
};

NormalizedGram build_normalized(const ExponentFamily& fam) {
    size_t n = fam.mu.size();
    qreal T = fam.T;
    NormalizedGram g;
    g.logD.resize(n);
    std::vector<qcplx> mu_q(n);
    for (size_t m = 0; m < n; ++m) mu_q[m] = qcplx(fam.mu[m]);
    for (size_t m = 0; m < n; ++m) {
        qreal w = 2 * fabsq(mu_q[m].re);
        qreal logB;
        if (w <= qreal(1e-12)) logB = logq(T);
        else logB = w * T / 2 + q_log1p(-expq(-w * T)) - logq(w);
        // double lattice: every later exponent combination reuses these exact
        // doubles, keeping the normalized matrix an exact congruence of B
        g.logD[m] = double(logB) / 2;
    }
    g.ghat.assign(n, std::vector<qcplx>(n));
    for (size_t j = 0; j < n; ++j) {
        for (size_t l = 0; l < n; ++l) {
            // both triangles evaluated directly with the same call pattern the
            // moment recomputations use, so residuals stay consistent to
            // solver precision (conj-mirroring differs by sub-ulp asymmetries
            // that the huge coefficient norms would amplify)
            double s = 0.0;
            qcplx m = pair_integral_mantissa(mu_q[j], mu_q[l], T, &s);
            qreal ex = qreal(s) - qreal(g.logD[j]) - qreal(g.logD[l]);
            g.ghat[j][l] = expq(ex) * m;
        }
    }
    return g;
}

// lower Cholesky with an eps floor on the pivots; returns #floored
int cholesky(std::vector<std::vector<qcplx>>& A) {
    size_t n = A.size();
    int floored = 0;
    qreal floor_val = qreal(n) * q_eps * 16;
    for (size_t j = 0; j < n; ++j) {
        qreal d = A[j][j].re;
        for (size_t m = 0; m < j; ++m) {
            qcplx v = A[j][m];
            d -= v.re * v.re + v.im * v.im;
        }
        if (d < floor_val) {
            d = floor_val;
            ++floored;
        }
        qreal ljj = sqrtq(d);
        A[j][j] = qcplx(ljj);
        for (size_t i = j + 1; i < n; ++i) {
            qcplx acc = A[i][j];
            for (size_t m = 0; m < j; ++m) acc -= A[i][m] * conj(A[j][m]);
            A[i][j] = qcplx(acc.re / ljj, acc.im / ljj);
        }
    }
    for (size_t j = 0; j < n; ++j)
        for (size_t l = j + 1; l < n; ++l) A[j][l] = qcplx();
    return floored;
}

std::vector<qcplx> chol_solve(const std::vector<std::vector<qcplx>>& L,
                              std::vector<qcplx> b) {
    size_t n = L.size();
    for (size_t i = 0; i < n; ++i) {
        qcplx acc = b[i];
        for (size_t m = 0; m < i; ++m) acc -= L[i][m] * b[m];
        b[i] = qcplx(acc.re / L[i][i].re, acc.im / L[i][i].re);
    }
    for (size_t ii = n; ii-- > 0;) {
        qcplx acc = b[ii];
        for (size_t m = ii + 1; m < n; ++m) acc -= conj(L[m][ii]) * b[m];
        b[ii] = qcplx(acc.re / L[ii][ii].re, acc.im / L[ii][ii].re);
    }
    return b;
}

std::vector<qcplx> mat_vec(const std::vector<std::vector<qcplx>>& A,
                           const std::vector<qcplx>& x) {
    size_t n = A.size();
    std::vector<qcplx> y(n);
    for (size_t i = 0; i < n; ++i) {
        qcplx acc;
        for (size_t j = 0; j < n; ++j) acc += A[i][j] * x[j];
        y[i] = acc;
    }
    return y;
}

qreal vec_norm(const std::vector<qcplx>& v) {
    qreal acc = 0;
    for (const qcplx& z : v) acc += z.re * z.re + z.im * z.im;
    return sqrtq(acc);
}

double estimate_cond(const std::vector<std::vector<qcplx>>& ghat,
                     const std::vector<std::vector<qcplx>>& L) {
    size_t n = ghat.size();
    std::vector<qcplx> v(n), w(n);
    for (size_t i = 0; i < n; ++i) {
        v[i] = qcplx(qreal(1) / (i + 1), qreal(1) / (i + 2));
        w[i] = qcplx(qreal(1) / (2 * i + 1), qreal(-1) / (i + 3));
    }
    qreal lmax = 1, lmin = 1;
    for (int it = 0; it < 40; ++it) {
        v = mat_vec(ghat, v);
        lmax = vec_norm(v);
        for (auto& z : v) z = qcplx(z.re / lmax, z.im / lmax);
    }
    for (int it = 0; it < 40; ++it) {
        w = chol_solve(L, w);
        qreal nw = vec_norm(w);
        lmin = 1 / nw;
        for (auto& z : w) z = qcplx(z.re / nw, z.im / nw);
    }
    return double(lmax / lmin);
}

} // namespace

BiorthogonalFamily gram_biorthogonal(const ExponentFamily& fam, double cond_gate) {
    size_t n = fam.mu.size();
    BiorthogonalFamily bio;
    bio.family = fam;
    NormalizedGram g = build_normalized(fam);
    bio.logD = g.logD;
    bio.ghat = g.ghat;
    bio.chol = g.ghat;
    bio.floored_pivots = cholesky(bio.chol);
    bio.cond_estimate = estimate_cond(bio.ghat, bio.chol);
    if (bio.cond_estimate > cond_gate)
        throw Error(Error::numeric,
                    "normalized Gram condition " + std::to_string(bio.cond_estimate) +
                        " exceeds the solver gate; reduce Kc or rescale T");
    bio.chat_q.resize(n);
    bio.chat.resize(n);
    bio.log_l2_norm.resize(n);
    double max_res = 0.0;
    for (size_t j = 0; j < n; ++j) {
        std::vector<qcplx> e(n);
        e[j] = qcplx(qreal(1));
        std::vector<qcplx> x = gram_solve_normalized(bio, e, 2);
        bio.chat_q[j] = x;
        bio.chat[j].resize(n);
        for (size_t m = 0; m < n; ++m) bio.chat[j][m] = x[m].to_double();
        std::vector<qcplx> r = mat_vec(bio.ghat, x);
        for (size_t l = 0; l < n; ++l) {
            qcplx d = r[l] - (l == j ? qcplx(qreal(1)) : qcplx());
            max_res = std::max(max_res, double(abs(d)));
        }
        qreal nsq = x[j].re;  // [Ghat^{-1}]_jj, real positive
        if (nsq <= 0)
            throw Error(Error::numeric, "Gram inverse diagonal not positive");
        bio.log_l2_norm[j] = 0.5 * (double(logq(nsq))) - bio.logD[j];
    }
    bio.max_residual = max_res;
    return bio;
}

std::vector<qcplx> gram_solve_normalized(const BiorthogonalFamily& bio,
                                         const std::vector<qcplx>& rhs,
                                         int refine_steps) {
    std::vector<qcplx> x = chol_solve(bio.chol, rhs);
    for (int it = 0; it < refine_steps; ++it) {
        std::vector<qcplx> r = mat_vec(bio.ghat, x);
        for (size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
        std::vector<qcplx> dx = chol_solve(bio.chol, r);
        for (size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    }
    return x;
}

cplx theta_eval(const BiorthogonalFamily& bio, int j, double t) {
    Scaled acc = Scaled::zero();
    size_t n = bio.family.mu.size();
    for (size_t m = 0; m < n; ++m) {
        cplx expo = -std::conj(bio.family.mu[m]) * t;
        Scaled term = Scaled(bio.chat[j][m]) *
                      Scaled::exp_of(expo + cplx(-bio.logD[m] - bio.logD[j], 0.0));
        acc += term;
    }
    return acc.value();
}

Scaled theta_moment(const BiorthogonalFamily& bio, int j, cplx mu) {
    size_t n = bio.family.mu.size();
    qreal T = bio.family.T;
    // common-scale accumulation in solver precision; scales combined in qreal
    // so the double lattice stays exact and cancellations survive
    std::vector<qcplx> mant(n);
    std::vector<qreal> lg(n);
    qreal lg_max = -1e308;
    for (size_t m = 0; m < n; ++m) {
        double s = 0.0;
        qcplx pi_ = pair_integral_mantissa(qcplx(mu), qcplx(bio.family.mu[m]), T, &s);
        mant[m] = pi_ * bio.chat_q[j][m];
        lg[m] = qreal(s) - qreal(bio.logD[m]) - qreal(bio.logD[j]);
        if (abs(mant[m]) > 0 && lg[m] > lg_max) lg_max = lg[m];
    }
    if (double(lg_max) == -1e308) return Scaled::zero();
    qcplx acc;
    for (size_t m = 0; m < n; ++m) {
        qreal sc = lg[m] - lg_max;
        if (double(sc) < -11300.0) continue;
        acc += mant[m] * expq(sc);
    }
    return Scaled(acc.to_double(), double(lg_max));
}

NormReport norm_report(const BiorthogonalFamily& bio) {
    NormReport rep;
    const double pi = M_PI;
    double fit_p = -1e308, fit_m = -1e308;
    for (size_t j = 0; j < bio.family.labels.size(); ++j) {
        FamilyLabel lb = bio.family.labels[j];
        if (lb.k == 0) {
            rep.log_norm_zero = bio.log_l2_norm[j];
            continue;
        }
        double ak = std::abs(lb.k), T = bio.family.T;
        NormReportRow row;
        row.k = lb.k;
        row.branch = lb.branch;
        row.log_norm = bio.log_l2_norm[j];
        if (lb.branch == Branch::plus)
            row.log_envelope = 2 * std::log(ak) - T / 2 * ak * ak -
                               2 * pi * std::sqrt(ak) + 3 * (3 + 2 * std::sqrt(2.0)) * pi * ak;
        else
            row.log_envelope = 5 * std::log(ak) - T / 2 * ak * ak * ak * ak +
                               (2 * std::sqrt(2.0) + 1) * pi * ak * ak;
        double excess = row.log_norm - row.log_envelope;
        (lb.branch == Branch::plus ? fit_p : fit_m) =
            std::max(lb.branch == Branch::plus ? fit_p : fit_m, excess);
        rep.rows.push_back(row);
    }
    rep.fitted_logC_plus = fit_p;
    rep.fitted_logC_minus = fit_m;
    return rep;
}

PWGrid build_pw_grid(const PsiContext& ctx, double X, int n) {
    PWGrid grid;
    grid.X = X;
    grid.n = n;
    grid.h = 2.0 * X / n;
    grid.xs.resize(n);
    grid.PM.resize(n);
    for (int m = 0; m < n; ++m) {
        double x = -X + (m + 0.5) * grid.h;  // midpoint grid avoids the node at 0
        grid.xs[m] = x;
        PEval pe = canonical_P(cplx(x, 0.0), ctx.nodes, ctx.pol);
        if (pe.node_hit) {
            grid.PM[m] = cplx(0.0, 0.0);
            continue;
        }
        Scaled v = pe.value * eval_multiplier(cplx(x, 0.0), ctx.m1, ctx.pol.tails) *
                   eval_multiplier(cplx(x, 0.0), ctx.m2, ctx.pol.tails);
        grid.PM[m] = std::abs(v.log_abs()) < 690.0 ? v.value() : cplx(0.0, 0.0);
    }
    return grid;
}

namespace {

std::vector<cplx> psi_on_grid(const PsiContext& ctx, const PWGrid& grid, NodeId j) {
    int idx = psi_index(ctx, j);
    Scaled inv_norm = Scaled::one() / (ctx.pprime[idx] * ctx.m_at_node[idx]);
    cplx mu = mu_of(ctx.nodes, j);
    std::vector<cplx> vals(grid.n);
    for (int m = 0; m < grid.n; ++m) {
        Scaled v = Scaled(grid.PM[m]) * inv_norm;
        cplx den = grid.xs[m] + cplx(0, 1) * mu;
        v = v / Scaled(den);
        vals[m] = std::abs(v.log_abs()) < 690.0 ? v.value() : cplx(0.0, 0.0);
    }
    return vals;
}

} // namespace

SampledTheta theta_from_psi(const PsiContext& ctx, const PWGrid& grid, NodeId j,
                            int nt, double mass_tol) {
    double T = ctx.nodes.T;
    std::vector<cplx> psi_vals = psi_on_grid(ctx, grid, j);
    SampledTheta th;
    th.id = j;
    nt = (nt / 4) * 4;
    th.ts.resize(nt + 1);
    th.vals.resize(nt + 1);
    double dt = 2.0 * T / nt;
    double w0 = grid.xs[0];
    for (int i = 0; i <= nt; ++i) {
        double t = -T + i * dt;
        th.ts[i] = t;
        cplx rot = std::polar(1.0, grid.h * t);
        cplx phase = std::polar(1.0, w0 * t);
        cplx acc(0.0, 0.0);
        for (int m = 0; m < grid.n; ++m) {
            acc += psi_vals[m] * phase;
            phase *= rot;
        }
        th.vals[i] = acc * (grid.h / (2.0 * M_PI));
    }
    // Plancherel over one aliasing period
    double total = 0.0;
    for (const cplx& v : psi_vals) total += std::norm(v);
    th.mass_total = total * grid.h / (2.0 * M_PI);
    // trapezoid on the quarter grid [-T/2, T/2]
    double inside = 0.0;
    for (int i = nt / 4; i <= 3 * nt / 4; ++i) {
        double w = (i == nt / 4 || i == 3 * nt / 4) ? 0.5 : 1.0;
        inside += w * std::norm(th.vals[i]);
    }
    th.mass_inside = inside * dt;
    if (mass_tol > 0.0 && th.mass_total > 0.0 &&
        th.mass_inside < (1.0 - mass_tol) * th.mass_total) {
        th.suggested_X = 2.0 * grid.X;
        throw Error(Error::numeric,
                    "Paley-Wiener support check failed; retry with X >= " +
                        std::to_string(th.suggested_X));
    }
    return th;
}

cplx pw_moment(const PsiContext& ctx, const PWGrid& grid, NodeId j, cplx mu_l) {
    std::vector<cplx> psi_vals = psi_on_grid(ctx, grid, j);
    qreal T = ctx.nodes.T;
    qcplx acc;
    for (int m = 0; m < grid.n; ++m) {
        // E(x) = int_{-T/2}^{T/2} e^{(ix-mu) t} dt
        qcplx w = qcplx(cplx(0, 1) * cplx(grid.xs[m], 0.0) - mu_l);
        qcplx E;
        if (abs(w) < qreal(1e-14)) E = qcplx(T);
        else E = (exp(qreal(0.5) * T * w) - exp(qreal(-0.5) * T * w)) / w;
        acc += qcplx(psi_vals[m]) * E;
    }
    acc = qreal(grid.h / (2.0 * M_PI)) * acc;
    return acc.to_double();
}

double pw_moment_condition(cplx mu_l, double T) {
    return std::exp(std::abs(mu_l.real()) * T / 2.0);
}

} // namespace ksc
