#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kscontrol/entire_functions.hpp"
#include "kscontrol/quadrature.hpp"

using namespace ksc;

namespace {

const double TWO_PI = 2.0 * M_PI;

struct Fixture {
    NodeSet nodes = build_nodes(TWO_PI, 600);
    TruncationPolicy pol{512, 4000, true};
};

Fixture& fx() {
    static Fixture f;
    return f;
}

double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

} // namespace

TEST_CASE("canonical product zero structure") {
    auto& f = fx();
    PEval p0 = canonical_P(cplx(0.0, 0.0), f.nodes, f.pol);
    CHECK(p0.node_hit);
    CHECK(p0.hit.k == 0);
    CHECK(abs_value(p0.value) == 0.0);

    cplx node = node_point(f.nodes, NodeId{1, Branch::plus});
    PEval pn = canonical_P(node, f.nodes, f.pol);
    CHECK(pn.node_hit);
    CHECK(pn.hit.k == 1);
    CHECK(pn.hit.branch == Branch::plus);

    cplx nodem = node_point(f.nodes, NodeId{-3, Branch::minus});
    PEval pm = canonical_P(nodem, f.nodes, f.pol);
    CHECK(pm.node_hit);
    CHECK(pm.hit.k == -3);
}

TEST_CASE("P real-axis envelope with fitted constant") {
    auto& f = fx();
    double logC = -1e300;
    for (double x : {10.0, 100.0, 1000.0}) {
        double lp = canonical_P(cplx(x, 0.0), f.nodes, f.pol).value.log_abs();
        double env = -std::log(x) + std::sqrt(2.0) * M_PI * std::sqrt(x) +
                     2.0 * std::sqrt(2.0) * M_PI * std::pow(x, 0.25);
        logC = std::max(logC, lp - env);
    }
    CHECK(std::isfinite(logC));
    CHECK(std::abs(logC) < 20.0);
}

TEST_CASE("P' at nodes: finite differences and lower envelopes") {
    auto& f = fx();
    NodeId id{1, Branch::plus};
    cplx node = node_point(f.nodes, id);
    Scaled pp = P_prime_at_node(id, f.nodes, f.pol);
    double h = 1e-6 * std::abs(node);
    cplx pplus = canonical_P(node + h, f.nodes, f.pol).value.value();
    cplx pminus = canonical_P(node - h, f.nodes, f.pol).value.value();
    cplx fd = (pplus - pminus) / (2.0 * h);
    CHECK(rel_diff(fd, pp.value()) < 1e-6);

    double logC2 = 1e300;
    for (int k = 1; k <= 12; ++k) {
        double lp = P_prime_at_node(NodeId{k, Branch::plus}, f.nodes, f.pol).log_abs();
        double env = -3.0 * std::log(double(k)) + 2.0 * M_PI * std::sqrt(double(k));
        logC2 = std::min(logC2, lp - env);
    }
    CHECK(std::isfinite(logC2));
    CHECK(std::abs(logC2) < 30.0);

    double logC3 = 1e300;
    for (int k = 1; k <= 8; ++k) {
        double lp = P_prime_at_node(NodeId{k, Branch::minus}, f.nodes, f.pol).log_abs();
        double env = -7.0 * std::log(double(k)) + 3.0 * M_PI * k;
        logC3 = std::min(logC3, lp - env);
    }
    CHECK(std::isfinite(logC3));
    CHECK(std::abs(logC3) < 30.0);
}

TEST_CASE("sine-type factor identities at equal truncation") {
    auto& f = fx();
    const int N = 64;
    CHECK(abs_value(sine_factor(cplx(0.0, 0.0), SineFactor::Q1, f.nodes, N)) == 0.0);
    CHECK(abs_value(sine_factor(cplx(0.0, 0.0), SineFactor::R1, f.nodes, N)) == 0.0);

    // Q2(z) = -Q1(z) Q1(-z) and the direct product form
    cplx z(3.0, 2.0);
    cplx q2 = sine_factor(z, SineFactor::Q2, f.nodes, N).value();
    cplx q1a = sine_factor(z, SineFactor::Q1, f.nodes, N).value();
    cplx q1b = sine_factor(-z, SineFactor::Q1, f.nodes, N).value();
    CHECK(rel_diff(q2, -q1a * q1b) < 1e-10);

    // P1(z) = i Q2(e^{-i pi/4} sqrt(z)) at z = 5
    cplx z5(5.0, 0.0);
    cplx w = std::polar(1.0, -M_PI / 4.0) * std::sqrt(z5);
    cplx lhs = P1_truncated(z5, f.nodes, N).value();
    cplx rhs = cplx(0, 1) * sine_factor(w, SineFactor::Q2, f.nodes, N).value();
    CHECK(rel_diff(lhs, rhs) < 1e-10);

    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        cplx zz(u(rng), u(rng));
        if (std::abs(zz) > 10.0 || std::abs(zz) < 0.3) continue;
        cplx r2 = sine_factor(zz, SineFactor::R2, f.nodes, N).value();
        cplx r1a = sine_factor(zz, SineFactor::R1, f.nodes, N).value();
        cplx r1b = sine_factor(-zz, SineFactor::R1, f.nodes, N).value();
        cplx r1c = sine_factor(cplx(0, 1) * zz, SineFactor::R1, f.nodes, N).value();
        cplx r1d = sine_factor(cplx(0, -1) * zz, SineFactor::R1, f.nodes, N).value();
        CHECK(rel_diff(r2, -r1a * r1b * r1c * r1d) < 1e-8);

        if (zz.real() < 0.0 && std::abs(zz.imag()) < 1e-6) continue;  // sqrt branch cut
        cplx w2 = std::polar(1.0, -M_PI / 8.0) * std::pow(zz, 0.25);
        cplx lhs2 = P2_truncated(zz, f.nodes, N).value();
        cplx rhs2 = cplx(0, 1) * sine_factor(w2, SineFactor::R2, f.nodes, N).value();
        CHECK(rel_diff(lhs2, rhs2) < 1e-8);

        cplx q2z = sine_factor(zz, SineFactor::Q2, f.nodes, N).value();
        cplx q1z = sine_factor(zz, SineFactor::Q1, f.nodes, N).value();
        cplx q1n = sine_factor(-zz, SineFactor::Q1, f.nodes, N).value();
        CHECK(rel_diff(q2z, -q1z * q1n) < 1e-8);
    }
}

TEST_CASE("multiplier construction") {
    MultiplierSpec m2 = build_multiplier(TWO_PI, Multiplier::M2, 64);
    CHECK(m2.a == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m2.b == doctest::Approx(8.0 - 4.0 * std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::abs(s_of(m2, m2.B)) < 1e-12);
    CHECK(m2.B == doctest::Approx(7.8422208028542331).epsilon(1e-12));
    CHECK(m2.taus[0] == doctest::Approx(10.419614620831206).epsilon(1e-12));
    CHECK(m2.taus[0] > m2.B);
    for (size_t n = 0; n < m2.taus.size(); ++n) {
        CHECK(std::abs(s_of(m2, m2.taus[n]) - double(n + 1)) < 1e-10);
        if (n) CHECK(m2.taus[n] > m2.taus[n - 1]);
    }
    // jump count below t equals floor(s(t))
    double t = 2.0 * m2.taus[4];
    int count = 0;
    for (double tau : m2.taus)
        if (tau < t) ++count;
    CHECK(count == int(std::floor(s_of(m2, t))));

    MultiplierSpec m1 = build_multiplier(TWO_PI, Multiplier::M1, 64);
    CHECK(m1.b == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(m1.B == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(m1.taus[0] == doctest::Approx(6.0 + 4.0 * std::sqrt(2.0)).epsilon(1e-12));

    // monotone increasing beyond the stationary point
    double tstar2 = std::pow(m2.gamma * m2.b / m2.a, 1.0 / (1.0 - m2.gamma));
    for (double tt = tstar2 * 1.01; tt < 100.0; tt *= 1.3) {
        double d = (s_of(m2, tt * 1.001) - s_of(m2, tt)) / (0.001 * tt);
        CHECK(d > 0.0);
    }
}

TEST_CASE("multiplier evaluation") {
    MultiplierSpec m2 = build_multiplier(TWO_PI, Multiplier::M2, 4000);
    MultiplierSpec m1 = build_multiplier(TWO_PI, Multiplier::M1, 4000);

    // z - i = 0 gives the empty-product value 1
    cplx at_i = eval_multiplier(cplx(0.0, 1.0), m2).value();
    CHECK(std::abs(at_i - cplx(1.0, 0.0)) < 1e-9);

    // |M2(x)| <= C |x| e^{-2 sqrt2 pi |x|^{1/4}} with finite fitted C
    double logC = -1e300;
    for (double ax : {10.0, 100.0, 1000.0}) {
        for (double x : {ax, -ax}) {
            double lm = eval_multiplier(cplx(x, 0.0), m2).log_abs();
            double env = std::log(std::abs(x)) -
                         2.0 * std::sqrt(2.0) * M_PI * std::pow(std::abs(x), 0.25);
            logC = std::max(logC, lm - env);
        }
    }
    CHECK(std::isfinite(logC));
    CHECK(logC < 10.0);

    // |M2(-i mu_k^+)| >= C e^{pi a k^2 - 4(sqrt2+1) pi k}
    NodeSet nodes = build_nodes(TWO_PI, 16);
    double a = 0.5;
    double logC2 = 1e300;
    for (int k = 1; k <= 10; ++k) {
        cplx node = node_point(nodes, NodeId{k, Branch::plus});
        double lm = eval_multiplier(node, m2).log_abs();
        double env = M_PI * a * k * k - 4.0 * (std::sqrt(2.0) + 1.0) * M_PI * k;
        logC2 = std::min(logC2, lm - env);
    }
    CHECK(std::isfinite(logC2));
    CHECK(logC2 > -50.0);

    // M1 bounds: decay on R, growth at the nodes (both branches, fitted)
    double logC3 = -1e300, logC4 = 1e300, logC5 = 1e300;
    for (double ax : {10.0, 100.0, 1000.0}) {
        double lm = eval_multiplier(cplx(ax, 0.0), m1).log_abs();
        double env = std::log(ax) - std::sqrt(2.0) * M_PI * std::sqrt(ax);
        logC3 = std::max(logC3, lm - env);
    }
    for (int k = 1; k <= 10; ++k) {
        cplx node = node_point(nodes, NodeId{k, Branch::plus});
        double lm = eval_multiplier(node, m1).log_abs();
        double env = M_PI * a * k * k - (5.0 + 2.0 * std::sqrt(2.0)) * M_PI * k;
        logC4 = std::min(logC4, lm - env);
    }
    for (int k = 1; k <= 4; ++k) {
        cplx node = node_point(nodes, NodeId{k, Branch::minus});
        double k2 = double(k) * k;
        double lm = eval_multiplier(node, m1).log_abs();
        double env = M_PI * a * k2 * k2 - (2.0 * std::sqrt(2.0) + 1.0) * M_PI * k2 - 8.0 * k;
        logC5 = std::min(logC5, lm - env);
    }
    CHECK(std::isfinite(logC3));
    CHECK(logC4 > -60.0);
    CHECK(logC5 > -60.0);

    // truncation guard
    CHECK_THROWS_AS(eval_multiplier(cplx(1e7, 0.0), m2), Error);
}

TEST_CASE("psi interpolation and decay") {
    TruncationPolicy pol{512, 4000, true};
    PsiContext ctx = build_psi_context(TWO_PI, 6, pol);

    // delta property on the enforced nodes
    for (NodeId j : {NodeId{1, Branch::plus}, NodeId{0, Branch::plus},
                     NodeId{2, Branch::minus}}) {
        for (int l = -6; l <= 6; ++l) {
            for (Branch br : {Branch::plus, Branch::minus}) {
                NodeId lid{l, br};
                if (l == 0) lid = NodeId{0, Branch::plus};
                cplx pnt = node_point(ctx.nodes, lid);
                cplx v = psi(ctx, j, pnt).value();
                double expect = (lid == j || (lid.k == 0 && j.k == 0)) ? 1.0 : 0.0;
                CHECK(std::abs(v - expect) <= 1e-6);
            }
        }
    }

    // Psi_0(0) = 1 exactly by the removed-factor normalization
    CHECK(std::abs(psi(ctx, NodeId{0, Branch::plus}, cplx(0.0, 0.0)).value() -
                   cplx(1.0, 0.0)) == 0.0);

    // integrable tail: int |Psi_1^+|^2 over [-X, X] stabilizes as X doubles
    auto l2_over = [&](double X, int n) {
        double acc = 0.0;
        for (int m = 0; m < n; ++m) {
            double x = -X + (m + 0.5) * (2.0 * X / n);
            acc += std::norm(psi(ctx, NodeId{1, Branch::plus}, cplx(x, 0.0)).value());
        }
        return acc * 2.0 * X / n;
    };
    double i200 = l2_over(200.0, 2000);
    double i400 = l2_over(400.0, 4000);
    CHECK(std::abs(i400 - i200) / i400 < 1e-4);

    // exponential type along the imaginary axis: slope <= T/2 + 0.05
    for (double sgn : {1.0, -1.0}) {
        double l50 = psi(ctx, NodeId{1, Branch::plus}, cplx(0.0, sgn * 50.0)).log_abs();
        double l100 = psi(ctx, NodeId{1, Branch::plus}, cplx(0.0, sgn * 100.0)).log_abs();
        double l200 = psi(ctx, NodeId{1, Branch::plus}, cplx(0.0, sgn * 200.0)).log_abs();
        CHECK((l100 - l50) / 50.0 <= M_PI + 0.05);
        CHECK((l200 - l100) / 100.0 <= M_PI + 0.05);
    }
}

TEST_CASE("appendix-B integral and corrected bounds") {
    AppendixB b0 = verify_appendix_B(0.0);
    double closed = M_PI / std::sin(5.0 * M_PI / 8.0);
    CHECK(b0.integral == doctest::Approx(closed).epsilon(1e-9));
    CHECK(b0.lower == doctest::Approx(2.6999077953).epsilon(1e-9));
    CHECK(b0.upper == doctest::Approx(3.8558065926).epsilon(1e-9));
    CHECK(b0.lower <= b0.integral);
    CHECK(b0.integral <= b0.upper);

    for (double x : {1.0, -1.0, 10.0, -10.0, 100.0, -100.0, 1e4, -1e4}) {
        AppendixB r = verify_appendix_B(x);
        CHECK(r.lower <= r.integral);
        CHECK(r.integral <= r.upper);
    }
    AppendixB big = verify_appendix_B(1e4);
    CHECK(big.integral / std::pow(1e4, 0.25) == doctest::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("appendix-A theta bounded, small-x limit") {
    CHECK(std::abs(appendix_A_theta(1e-12)) < 0.01);
    double sup = 0.0;
    for (double x = 1e-3; x <= 1.001e6; x *= std::pow(10.0, 0.25)) {
        double th = appendix_A_theta(x);
        CHECK(std::isfinite(th));
        sup = std::max(sup, std::abs(th));
    }
    CHECK(sup < 20.0);
    CHECK(sup > 0.1);
}

TEST_CASE("U2 consistency with the appendix-A reduction") {
    MultiplierSpec m2 = build_multiplier(TWO_PI, Multiplier::M2, 400);
    double comp = m2.b * M_PI / std::tan(M_PI / 8.0);
    for (double x : {1.0, 5.0, 20.0, 100.0, 400.0}) {
        double u2 = multiplier_U(x, m2);
        double lhs = u2 + comp * std::pow(x, 0.25);
        double rhs = -m2.a * m2.B * appendix_A_theta(x / m2.B);
        CHECK(std::abs(lhs - rhs) < 1e-4 * std::max(1.0, std::abs(rhs)));
        // remainder is a*B2*theta(x/B2) with theta bounded
        CHECK(std::abs(lhs) < m2.a * m2.B * 20.0);
    }
}
