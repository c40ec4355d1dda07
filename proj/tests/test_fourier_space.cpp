#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "kscontrol/fourier_space.hpp"

using namespace ksc;

namespace {
PeriodicField random_field(std::mt19937& rng, int kmax) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PeriodicField f(kmax);
    for (int k = -kmax; k <= kmax; ++k) f.set_coeff(k, cplx(u(rng), u(rng)));
    return f;
}
}

TEST_CASE("sobolev norm examples") {
    PeriodicField one(0);
    one.set_coeff(0, cplx(1.0, 0.0));
    CHECK(sobolev_norm(one, 3.7) == doctest::Approx(1.0));
    CHECK(sobolev_norm(one, -2.0) == doctest::Approx(1.0));

    PeriodicField e1(1);
    e1.set_coeff(1, cplx(1.0, 0.0));
    CHECK(sobolev_norm(e1, 2.0) == doctest::Approx(2.0));

    PeriodicField pair(1);
    pair.set_coeff(1, cplx(1.0, 0.0));
    pair.set_coeff(-1, cplx(1.0, 0.0));
    CHECK(sobolev_norm(pair, -1.0) == doctest::Approx(1.0));
}

TEST_CASE("duality pairing orthogonality") {
    PeriodicField e2(3), e3(3);
    e2.set_coeff(2, cplx(1.0, 0.0));
    e3.set_coeff(3, cplx(1.0, 0.0));
    CHECK(std::abs(duality_pairing(e2, e2) - cplx(2.0 * M_PI, 0.0)) < 1e-14);
    CHECK(std::abs(duality_pairing(e2, e3)) < 1e-14);

    std::mt19937 rng(11);
    PeriodicField u0 = random_field(rng, 4);
    cplx expect = 2.0 * M_PI * u0.coeff(2);
    CHECK(std::abs(duality_pairing(u0, e2) - expect) < 1e-13);
}

TEST_CASE("mean and projection") {
    PeriodicField f(1);
    f.set_coeff(0, cplx(1.0, 0.0));
    f.set_coeff(1, cplx(1.0, 0.0));
    CHECK(std::abs(mean(f) - cplx(2.0 * M_PI, 0.0)) < 1e-14);
    PeriodicField g = project_mean_zero(f);
    CHECK(std::abs(mean(g)) == 0.0);
    CHECK(std::abs(g.coeff(1) - cplx(1.0, 0.0)) == 0.0);
    PeriodicField e1(1);
    e1.set_coeff(1, cplx(1.0, 0.0));
    CHECK(std::abs(mean(e1)) == 0.0);
}

TEST_CASE("Parseval against trapezoid quadrature") {
    std::mt19937 rng(5);
    PeriodicField f = random_field(rng, 6);
    int n = 8 * 6 + 4;
    double quad = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = 2.0 * M_PI * i / n;
        quad += std::norm(f.sample(x));
    }
    quad *= 2.0 * M_PI / n;
    double series = 0.0;
    for (int k = -6; k <= 6; ++k) series += std::norm(f.coeff(k));
    series *= 2.0 * M_PI;
    CHECK(std::abs(quad - series) < 1e-10 * series);
}

TEST_CASE("norm monotonicity in s") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        PeriodicField f = random_field(rng, 8);
        double s1 = -2.0 + 3.0 * trial / 20.0;
        double s2 = s1 + 0.7;
        CHECK(sobolev_norm(f, s1) <= sobolev_norm(f, s2) * (1.0 + 1e-13));
    }
}

TEST_CASE("duality pairing Cauchy-Schwarz at sequence level") {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        PeriodicField w = random_field(rng, 5), phi = random_field(rng, 5);
        double s = -1.5 + 0.2 * trial;
        double lhs = std::abs(duality_pairing(w, phi));
        double rhs = 2.0 * M_PI * sobolev_norm(w, -s) * sobolev_norm(phi, s);
        CHECK(lhs <= rhs * (1.0 + 1e-12));
    }
}

TEST_CASE("conjugate symmetry detects real fields") {
    PeriodicField f(2);
    f.set_coeff(0, cplx(0.3, 0.0));
    f.set_coeff(1, cplx(0.5, -0.2));
    f.set_coeff(-1, cplx(0.5, 0.2));
    CHECK(f.conjugate_symmetric());
    f.set_coeff(2, cplx(0.1, 0.1));
    CHECK(!f.conjugate_symmetric());
    for (double x : {0.3, 1.7, 4.4}) {
        PeriodicField g = f;
        g.set_coeff(2, cplx(0.0, 0.0));
        CHECK(std::abs(g.sample(x).imag()) < 1e-14);
    }
}
