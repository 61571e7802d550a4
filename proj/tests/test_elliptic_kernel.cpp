#include <doctest.h>

#include <random>
#include <string>

#include "oracles/oracle_values.hpp"
#include "rw/elliptic_kernel.hpp"
#include "rw/errors.hpp"
#include "support.hpp"

using namespace rw;
using rw::testing::rel_err;

TEST_CASE("kernel values agree with the frozen direct series") {
    for (const auto& o : oracle::kSeriesValues) {
        const ModularParam tau(o.tau);
        const std::string f = o.function;
        cplx got;
        if (f == "theta1") got = kernel::theta1(o.u, tau);
        else if (f == "theta1_d1") got = kernel::theta1_d1(o.u, tau);
        else if (f == "rho") got = kernel::rho(o.u, tau);
        else got = kernel::s_func(o.u, o.lambda, tau);
        INFO(f, " at ", o.u.real(), "+", o.u.imag(), "i");
        CHECK(std::abs(got - o.value) / std::abs(o.value) < 1e-12);
    }
}

TEST_CASE("theta1 quasi-periodicity and parity") {
    std::mt19937_64 rng(11);
    for (cplx t : {cplx(0.0, 1.0), cplx(0.3, 1.2), cplx(-0.45, 0.8)}) {
        const ModularParam tau(t);
        for (int n = 0; n < 200; ++n) {
            const cplx u = testing::cell_point(rng, tau, -1.5, 1.5);
            if (kernel::lattice_distance(u, tau) < 1e-3) continue;
            const cplx th = kernel::theta1(u, tau);
            CHECK(rel_err(kernel::theta1(u + 1.0, tau), -th) < 1e-12);
            const cplx factor = -std::exp(-kPi * kI * t - 2.0 * kPi * kI * u);
            CHECK(std::abs(kernel::theta1(u + t, tau) / (factor * th) - 1.0) < 1e-11);
            CHECK(rel_err(kernel::theta1(-u, tau), -th) < 1e-12);
        }
    }
}

TEST_CASE("rho and s periodicity") {
    std::mt19937_64 rng(12);
    const ModularParam tau(cplx(0.3, 1.2));
    for (int n = 0; n < 200; ++n) {
        const cplx u = testing::cell_point(rng, tau, -1.0, 1.0);
        const cplx lambda = testing::cell_point(rng, tau, -0.5, 0.5);
        if (kernel::lattice_distance(u, tau) < 1e-3 || kernel::lattice_distance(lambda, tau) < 1e-3 ||
            kernel::lattice_distance(u - lambda, tau) < 1e-3) {
            continue;
        }
        const cplx r = kernel::rho(u, tau);
        CHECK(rel_err(kernel::rho(u + 1.0, tau), r) < 1e-11);
        CHECK(rel_err(kernel::rho(u + tau.tau(), tau), r - 2.0 * kPi * kI) < 1e-11);
        const cplx s = kernel::s_func(u, lambda, tau);
        CHECK(rel_err(kernel::s_func(u + 1.0, lambda, tau), s) < 1e-11);
        const cplx shifted = kernel::s_func(u + tau.tau(), lambda, tau);
        CHECK(std::abs(shifted / (std::exp(2.0 * kPi * kI * lambda) * s) - 1.0) < 1e-11);
    }
}

TEST_CASE("theta1 derivative and rho match difference quotients") {
    const ModularParam tau(cplx(0.1, 0.9));
    const double h = 1e-5;
    for (cplx u : {cplx(0.2, 0.1), cplx(-0.7, 0.55), cplx(1.3, -0.4)}) {
        const cplx fd = (kernel::theta1(u + h, tau) - kernel::theta1(u - h, tau)) / (2 * h);
        CHECK(rel_err(kernel::theta1_d1(u, tau), fd) < 1e-8);
        CHECK(rel_err(kernel::rho(u, tau), kernel::theta1_d1(u, tau) / kernel::theta1(u, tau)) < 1e-12);
    }
    CHECK(rel_err(tau.theta1_prime_zero(), kernel::theta1_d1(0.0, tau)) < 1e-13);
}

TEST_CASE("s has a unit simple pole at the origin") {
    const ModularParam tau(cplx(0.0, 1.0));
    const cplx lambda(0.21, 0.13);
    const double e1 = 1e-4;
    const double e2 = 1e-5;
    const cplx r1 = e1 * kernel::s_func(e1, lambda, tau);
    const cplx r2 = e2 * kernel::s_func(e2, lambda, tau);
    CHECK(std::abs((e1 * r2 - e2 * r1) / (e1 - e2) - 1.0) < 1e-8);
}

TEST_CASE("bound kernel and shared denominator agree with the free function") {
    const ModularParam tau(cplx(0.3, 1.2));
    const cplx lambda(-0.17, 0.32);
    const kernel::SKernel s(lambda, tau);
    for (cplx u : {cplx(0.4, 0.2), cplx(2.6, -1.9), cplx(-0.05, 0.7)}) {
        const cplx want = kernel::s_func(u, lambda, tau);
        CHECK(rel_err(s(u), want) < 1e-13);
        CHECK(rel_err(s(u, s.denominator(u)), want) < 1e-13);
    }
}

TEST_CASE("lattice reduction reconstructs the argument") {
    const ModularParam tau(cplx(0.3, 1.2));
    std::mt19937_64 rng(3);
    for (int n = 0; n < 100; ++n) {
        const cplx u = testing::cell_point(rng, tau, -40.0, 40.0);
        const auto r = kernel::lattice_reduce(u, tau);
        CHECK(std::abs(r.u0 + double(r.l) + double(r.m) * tau.tau() - u) < 1e-11);
        const cplx xy = r.u0;
        const double y = xy.imag() / tau.tau().imag();
        const double x = xy.real() - y * tau.tau().real();
        CHECK(x > -1e-12);
        CHECK(x < 1.0 + 1e-12);
        CHECK(y > -1e-12);
        CHECK(y < 1.0 + 1e-12);
    }
}

TEST_CASE("arguments on the lattice raise NearSingular") {
    const ModularParam tau(cplx(0.0, 1.0));
    CHECK_THROWS_AS(kernel::rho(cplx(1.0, 1.0), tau), NearSingular);
    CHECK_THROWS_AS(kernel::s_func(cplx(2.0, 0.0), cplx(0.3, 0.1), tau), NearSingular);
    CHECK_THROWS_AS(kernel::s_func(cplx(0.3, 0.1), cplx(0.0, 1.0), tau), NearSingular);
    CHECK_NOTHROW(kernel::theta1(cplx(1.0, 0.0), tau));
    CHECK_THROWS_AS(ModularParam(cplx(0.2, -1.0)), std::invalid_argument);
}
