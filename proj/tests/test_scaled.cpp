#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kscontrol/quadfloat.hpp"
#include "kscontrol/scaled.hpp"

using namespace ksc;

TEST_CASE("scaled products track huge exponents") {
    Scaled p = Scaled::one();
    for (int i = 0; i < 100; ++i) p *= Scaled(cplx(1e50, 0.0));
    CHECK(p.log_abs() == doctest::Approx(100 * 50 * std::log(10.0)).epsilon(1e-12));
    Scaled q = p / Scaled::exp_of(cplx(p.log_abs(), 0.0));
    CHECK(std::abs(q.value() - cplx(1.0, 0.0)) < 1e-10);
}

TEST_CASE("scaled addition across scales") {
    Scaled a = Scaled::exp_of(cplx(200.0, 0.5));
    Scaled b = Scaled::exp_of(cplx(-200.0, 0.3));
    Scaled s = a + b;
    CHECK(s.log_abs() == doctest::Approx(200.0).epsilon(1e-13));
    Scaled d = s - a;
    CHECK(abs_value(d) <= std::exp(-190.0));
}

TEST_CASE("exp_of matches std::exp in range") {
    cplx z(3.0, -2.0);
    CHECK(std::abs(Scaled::exp_of(z).value() - std::exp(z)) < 1e-14 * std::abs(std::exp(z)));
}

TEST_CASE("qcplx field ops and exp") {
    qcplx a(cplx(1.5, -0.5)), b(cplx(-2.0, 0.25));
    qcplx c = (a * b + a) / b;
    cplx ref = (cplx(1.5, -0.5) * cplx(-2.0, 0.25) + cplx(1.5, -0.5)) / cplx(-2.0, 0.25);
    CHECK(std::abs(c.to_double() - ref) < 1e-15);
    qcplx e = exp(qcplx(cplx(0.5, 1.0)));
    CHECK(std::abs(e.to_double() - std::exp(cplx(0.5, 1.0))) < 1e-15);
}

TEST_CASE("qcplx expm1 accurate near zero") {
    cplx z(1e-20, 2e-20);
    qcplx r = expm1(qcplx(z));
    CHECK(std::abs(r.to_double() - z) < 1e-35);
}
