#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kscontrol/spectrum.hpp"

using namespace ksc;

namespace {
const cplx lambda1_plus(-0.86439294523538557, 1.3721451156992538);
const cplx lambda1_minus(-0.13560705476461443, -1.3721451156992538);
const cplx lambda2_plus(-4.1882102832379262, 2.2468791528691692);
const cplx lambda2_minus(-11.811789716762074, -8.2468791528691692);
}

TEST_CASE("modal quadratic coefficients") {
    auto [p0, q0] = modal_quadratic(0);
    CHECK(p0 == cplx(0.0, 0.0));
    CHECK(q0 == cplx(0.0, 0.0));
    auto [p1, q1] = modal_quadratic(1);
    CHECK(p1 == cplx(1.0, 0.0));
    CHECK(q1 == cplx(2.0, 1.0));
    auto [p2, q2] = modal_quadratic(2);
    CHECK(p2 == cplx(16.0, 6.0));
    CHECK(q2 == cplx(68.0, 8.0));
}

TEST_CASE("eigenvalues at k=1,2 against frozen values and Vieta") {
    EigenPair e1 = eigenvalues(1);
    CHECK(std::abs(e1.lambda_plus - lambda1_plus) < 1e-12);
    CHECK(std::abs(e1.lambda_minus - lambda1_minus) < 1e-12);
    CHECK(std::abs(e1.lambda_plus + e1.lambda_minus - cplx(-1.0, 0.0)) < 1e-14);
    CHECK(std::abs(e1.lambda_plus * e1.lambda_minus - cplx(2.0, 1.0)) < 1e-14);
    EigenPair e2 = eigenvalues(2);
    CHECK(std::abs(e2.lambda_plus - lambda2_plus) < 1e-11);
    CHECK(std::abs(e2.lambda_minus - lambda2_minus) < 1e-11);
    CHECK_THROWS_AS(eigenvalues(0), Error);
}

TEST_CASE("Vieta residuals over |k| <= 200") {
    for (int k = 1; k <= 200; ++k) {
        for (int s : {k, -k}) {
            auto [p, q] = modal_quadratic(s);
            EigenPair e = eigenvalues(s);
            double rs = std::abs(e.lambda_plus + e.lambda_minus + p) / std::abs(p);
            double rp = std::abs(e.lambda_plus * e.lambda_minus - q) / std::abs(q);
            CHECK(rs <= 1e-9);
            CHECK(rp <= 1e-9);
        }
    }
}

TEST_CASE("asymptotic anchors and branch consistency") {
    for (int k = 10; k <= 200; ++k) {
        for (int s : {k, -k}) {
            double kd = s;
            EigenPair e = eigenvalues(s);
            cplx ap(-kd * kd, kd);
            cplx am(-kd * kd * kd * kd + kd * kd, -kd * kd * kd);
            CHECK(std::abs(e.lambda_plus - ap) * std::abs(kd) < 1.0);
            CHECK(std::abs(e.lambda_minus - am) * std::abs(kd) < 1.0);
        }
    }
    // swapping labels strictly worsens both proximity distances
    for (int k = 1; k <= 200; ++k) {
        double kd = k;
        EigenPair e = eigenvalues(k);
        cplx ap(-kd * kd, kd);
        cplx am(-kd * kd * kd * kd + kd * kd, -kd * kd * kd);
        CHECK(std::abs(e.lambda_plus - ap) < std::abs(e.lambda_minus - ap));
        CHECK(std::abs(e.lambda_minus - am) < std::abs(e.lambda_plus - am));
        CHECK(!e.tie_warning);
    }
}

TEST_CASE("conjugate symmetry under k -> -k") {
    for (int k = 1; k <= 100; ++k) {
        EigenPair ep = eigenvalues(k), en = eigenvalues(-k);
        CHECK(std::abs(en.lambda_plus - std::conj(ep.lambda_plus)) <=
              1e-10 * std::abs(ep.lambda_plus));
        CHECK(std::abs(en.lambda_minus - std::conj(ep.lambda_minus)) <=
              1e-10 * std::abs(ep.lambda_minus));
    }
}

TEST_CASE("eta and theta at k=1 plus") {
    auto [eta, theta] = eta_theta(1, Branch::plus);
    CHECK(std::abs(eta - cplx(3.2365380609346394, -2.5077521704638683)) < 1e-12);
    CHECK(std::abs(theta - cplx(-2.3721451156992538, -0.86439294523538557)) < 1e-12);
}

TEST_CASE("theta branch trends") {
    // |theta_k^+| <= C k^3 and |theta_k^-| <= c / k^3, fitted constants
    double cp = 0.0, cm = 0.0;
    for (int k = 10; k <= 200; k += 10) {
        auto [ep, tp] = eta_theta(k, Branch::plus);
        auto [em, tm] = eta_theta(k, Branch::minus);
        (void)ep; (void)em;
        cp = std::max(cp, std::abs(tp) / (double(k) * k * k));
        cm = std::max(cm, std::abs(tm) * (double(k) * k * k));
    }
    CHECK(cp < 2.0);
    CHECK(cp > 0.5);   // theta^+ ~ i k^3
    CHECK(cm < 10.0);
}

TEST_CASE("mu_tilde principal roots and asymptotes") {
    cplx mt = mu_tilde(1, Branch::plus);
    CHECK(std::abs(mt - cplx(1.1149231542147034, 0.61535412127382214)) < 1e-12);
    for (int k : {50, 100, 200}) {
        cplx ak = mu_tilde(k, Branch::plus) - double(k);
        cplx bk = mu_tilde(k, Branch::minus) - double(k);
        CHECK(std::abs(ak - cplx(0.0, 0.5)) < 5.0 / k);
        CHECK(std::abs(bk - cplx(0.0, -0.25)) < 5.0 / k);
    }
    // mu_tilde^2 = -mu (plus), mu_tilde^4 = -mu (minus)
    for (int k : {1, -1, 3, -7, 12}) {
        EigenPair e = eigenvalues(k);
        cplx mtp = mu_tilde(k, Branch::plus);
        cplx mtm = mu_tilde(k, Branch::minus);
        CHECK(std::abs(mtp * mtp + std::conj(e.lambda_plus)) < 1e-9 * std::abs(e.lambda_plus));
        cplx m4 = mtm * mtm * mtm * mtm;
        CHECK(std::abs(m4 + std::conj(e.lambda_minus)) < 1e-9 * std::abs(e.lambda_minus));
    }
}

TEST_CASE("spectral gap by brute force") {
    GapReport g1 = spectral_gap(1);
    CHECK(g1.min_gap > 0.0);
    // independent enumeration over the five values
    EigenPair e = eigenvalues(1);
    cplx vals[5] = {e.lambda_plus, e.lambda_minus, std::conj(e.lambda_plus),
                    std::conj(e.lambda_minus), cplx(0.0, 0.0)};
    double best = 1e300;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) best = std::min(best, std::abs(vals[i] - vals[j]));
    CHECK(g1.min_gap == doctest::Approx(best).epsilon(1e-12));

    GapReport g50 = spectral_gap(50);
    CHECK(g50.min_gap > 0.0);
    // gap to the zero eigenvalue is min |lambda| when the argmin involves k=0
    if (g50.includes_zero) {
        CHECK(g50.min_gap <= std::abs(e.lambda_minus));
    }
}

TEST_CASE("denominators positive over |k| <= 50") {
    DenominatorReport rep = denominator_check(50);
    CHECK(rep.min_boundary_u > 0.0);
    CHECK(rep.min_boundary_v > 0.0);
    CHECK(rep.min_boundary_v_used > 0.0);
    // k=1 plus value |1 + conj(theta_1^+)|
    for (const DenominatorRow& r : rep.rows)
        if (r.k == 1 && r.branch == Branch::plus)
            CHECK(r.den_boundary_u == doctest::Approx(1.6217143343727412).epsilon(1e-10));
    // the plus-branch boundary_u denominator grows ~ k (cubic terms cancel)
    auto den_at = [&](int k) {
        for (const DenominatorRow& r : rep.rows)
            if (r.k == k && r.branch == Branch::plus) return r.den_boundary_u;
        return 0.0;
    };
    double slope = std::log(den_at(48) / den_at(12)) / std::log(48.0 / 12.0);
    CHECK(slope == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("guards") {
    CHECK_THROWS_AS(eigenvalues(20000), Error);
    CHECK_THROWS_AS(build_table(-1), Error);
    SpectrumTable t = build_table(0);
    CHECK(t.nodes.empty());
}
