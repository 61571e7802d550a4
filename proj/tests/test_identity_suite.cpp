#include <doctest.h>

#include <algorithm>
#include <random>

#include "rw/identity_suite.hpp"
#include "support.hpp"

using namespace rw;
using namespace rw::identities;

TEST_CASE("every check passes on random configurations") {
    std::mt19937_64 rng(51);
    for (auto [n1, n2] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 3}}) {
        const auto cfg = random_config(n1, n2, rng);
        SuiteOptions opts;
        opts.samples = 20;
        const auto results = run_suite(cfg, opts);
        REQUIRE(results.size() == check_ids().size());
        for (const auto& r : results) {
            INFO(r.id, " residual ", r.max_residual, " ", r.detail);
            CHECK(r.pass);
            CHECK(r.samples == 20);
        }
    }
}

TEST_CASE("results are sorted and named by check id") {
    auto ids = check_ids();
    CHECK(std::is_sorted(ids.begin(), ids.end()));
    std::mt19937_64 rng(52);
    const auto cfg = random_config(1, 1, rng);
    SuiteOptions opts;
    opts.samples = 1;
    const auto results = run_suite(cfg, opts);
    for (std::size_t k = 0; k < ids.size(); ++k) CHECK(results[k].id == ids[k]);
}

TEST_CASE("a tolerance below double precision fails") {
    std::mt19937_64 rng(53);
    const auto cfg = random_config(1, 1, rng);
    SuiteOptions opts;
    opts.samples = 10;
    opts.tol = 1e-17;
    const auto results = run_suite(cfg, opts);
    CHECK(std::any_of(results.begin(), results.end(), [](const CheckResult& r) { return !r.pass; }));
}

TEST_CASE("seeded runs are reproducible and independent of the execution mode") {
    std::mt19937_64 rng(54);
    const auto cfg = random_config(2, 1, rng);
    SuiteOptions opts;
    opts.samples = 8;
    opts.seed = 99;
    const auto a = run_suite(cfg, opts);
    const auto b = run_suite(cfg, opts);
    opts.execution = Execution::kSerial;
    const auto c = run_suite(cfg, opts);
    opts.seed = 100;
    const auto d = run_suite(cfg, opts);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].max_residual == b[k].max_residual);
        CHECK(a[k].max_residual == c[k].max_residual);
        differs = differs || a[k].max_residual != d[k].max_residual;
    }
    CHECK(differs);
}

TEST_CASE("individual identities at fixed points") {
    const ModularParam tau(cplx(0.3, 1.2));
    CHECK(check_three_point(cplx(0.31, 0.4), cplx(0.7, 0.2), cplx(0.15, 0.9), cplx(0.2, -0.1), tau) < 1e-12);
    CHECK(check_rho_period(cplx(0.44, 0.21), tau) < 1e-12);
    CHECK(check_s_reflection(cplx(0.44, 0.21), cplx(-0.3, 0.25), tau) < 1e-12);
    CHECK(check_s_derivatives(cplx(0.44, 0.21), cplx(-0.3, 0.25), tau) < 1e-10);
    CHECK(check_half_period_values(tau) < 1e-12);
    for (int m = 2; m <= 4; ++m) CHECK(check_rho_mirror(m, cplx(0.17, 0.33), tau) < 1e-12);
    CHECK(check_trisecant(cplx(0.1, 0.2), cplx(0.6, 0.3), cplx(0.35, 0.8), cplx(0.2, 0.1), cplx(-0.15, 0.3),
                          tau) < 1e-12);
    CHECK(check_corner_quarter_periods(cplx(0.21, 0.13), cplx(0.3, -0.2), tau) < 1e-11);
}

TEST_CASE("weighted sum needs the sum condition") {
    const ModularParam tau(cplx(0.0, 1.0));
    const std::vector<cplx> t = {cplx(0.1, 0.2), cplx(0.6, 0.3), cplx(0.35, 0.8)};
    const std::vector<cplx> balanced = {cplx(0.2, 0.1), cplx(-0.5, 0.05), cplx(0.3, -0.15)};
    const cplx lambda(0.23, 0.11);
    const cplx w(0.8, 0.55);
    CHECK(check_weighted_sum(w, t, balanced, 0, lambda, tau) < 1e-12);
    auto unbalanced = balanced;
    unbalanced[2] += 0.2;
    CHECK_THROWS_AS(check_weighted_sum(w, t, unbalanced, 0, lambda, tau), std::invalid_argument);
}

TEST_CASE("contour derivative") {
    const auto f = [](cplx z) { return std::exp(2.0 * z) * std::sin(z); };
    const cplx z(0.3, -0.2);
    const cplx want = std::exp(2.0 * z) * (2.0 * std::sin(z) + std::cos(z));
    CHECK(std::abs(contour_derivative(f, z, 0.1) - want) < 1e-13);
}

TEST_CASE("T multipliers inside the admissible strip") {
    std::mt19937_64 rng(55);
    const auto cfg = random_config(2, 1, rng);
    int tested = 0;
    for (int n = 0; n < 400 && tested < 40; ++n) {
        const cplx u1 = testing::cell_point(rng, cfg.tau, -1.5, 1.5);
        const cplx u2 = testing::cell_point(rng, cfg.tau, -1.5, 1.5);
        for (int rel = 0; rel < 4; ++rel) {
            if (!T_period_admissible(rel, u1, u2, cfg, 1e-2)) continue;
            CHECK(check_T_period(rel, u1, u2, cfg) < 1e-10);
            ++tested;
        }
    }
    CHECK(tested > 0);
}
