#include <doctest.h>

#include <random>

#include "rw/elliptic_kernel.hpp"
#include "rw/errors.hpp"
#include "rw/integrator.hpp"
#include "support.hpp"

using namespace rw;
using namespace rw::integrator;

namespace {

/// The configuration shipped as data/sample_config.json.
const ProblemConfig& sample() {
    static const ProblemConfig cfg = [] {
        std::mt19937_64 rng(5);
        return random_config(1, 1, rng, Placement::kCycleCells);
    }();
    return cfg;
}

const ProductCycle& sample_cycle() {
    static const ProductCycle cycle = product_cycle(sample(), {}, {}, 0.05);
    return cycle;
}

const QuadraturePlan& sample_plan() {
    static const QuadraturePlan plan =
        plan_quadrature(sample_cycle(), sample(), form_integrand(), 9);
    return plan;
}

/// Total change of arg(z - p) along a contour, by fine sampling.
double winding(const Contour& c, cplx p) {
    double total = 0.0;
    for (const auto& seg : c.segments) {
        cplx prev = seg.point(0.0) - p;
        for (int i = 1; i <= 2000; ++i) {
            const cplx cur = seg.point(i / 2000.0) - p;
            total += std::arg(cur / prev);
            prev = cur;
        }
    }
    return total / (2.0 * kPi);
}

double proportional_misfit(const std::vector<cplx>& a, const std::vector<cplx>& b, cplx& scale) {
    const auto va = Eigen::Map<const Eigen::VectorXcd>(a.data(), a.size());
    const auto vb = Eigen::Map<const Eigen::VectorXcd>(b.data(), b.size());
    scale = va.dot(vb) / va.squaredNorm();
    return (vb - scale * va).norm() / vb.norm();
}

}  // namespace

TEST_CASE("Pochhammer loop is closed, continuous, and winds zero times") {
    const cplx a(0.1, 0.05);
    const cplx b(1.1, 0.05);
    const double r = 0.05;
    const auto c = pochhammer(a, b, r);
    REQUIRE(c.segments.size() == 8);
    CHECK(std::abs(c.end() - c.start()) < 1e-14);
    for (std::size_t i = 0; i + 1 < c.segments.size(); ++i) {
        CHECK(std::abs(c.segments[i].end - c.segments[i + 1].start) < 1e-12);
        CHECK(std::abs(c.segments[i].point(1.0) - c.segments[i].end) < 1e-12);
    }
    CHECK(std::abs(winding(c, a)) < 1e-9);
    CHECK(std::abs(winding(c, b)) < 1e-9);
    CHECK(std::abs(winding(c, 0.5 * (a + b) + cplx(0.0, 0.5))) < 1e-9);
    double length = 0.0;
    for (const auto& s : c.segments) length += s.length();
    CHECK(length == doctest::Approx(8.0 * kPi * r + 4.0 * (1.0 - 2.0 * r)));
    // The first arc alone goes once around a.
    Contour first;
    first.segments = {c.segments[0]};
    CHECK(winding(first, a) == doctest::Approx(1.0));
}

TEST_CASE("bad loops raise GeometryError") {
    CHECK_THROWS_AS(pochhammer(0.0, cplx(0.1, 0.0), 0.05), GeometryError);
    CHECK_THROWS_AS(pochhammer(0.0, cplx(1.0, 0.0), 1e-4), GeometryError);
    const auto& cfg = sample();
    CyclePair period_tau;
    period_tau.kind = CyclePair::Kind::kPeriodTau;
    CHECK_THROWS_AS(validate_geometry(product_cycle(cfg, {}, period_tau, 0.05), cfg), GeometryError);
    CyclePair missing;
    missing.kind = CyclePair::Kind::kPoint;
    missing.j = 2;
    CHECK_THROWS_AS(pair_contour(cfg, 1, missing, 0.05), GeometryError);
    CHECK_NOTHROW(validate_geometry(sample_cycle(), cfg));
}

TEST_CASE("local monodromy of T around its branch loci") {
    std::mt19937_64 rng(61);
    const auto cfg = random_config(2, 1, rng);
    const auto loop_ratio = [&](cplx centre, bool move_first, cplx other) {
        const double r = 0.02;
        const cplx start = centre + r;
        BranchState s(cfg, move_first ? start : other, move_first ? other : start);
        const cplx before = s.log_T();
        for (int i = 1; i <= 64; ++i) {
            const cplx u = centre + r * std::exp(kI * (2.0 * kPi * i / 64));
            s.transport(move_first ? u : other, move_first ? other : u);
        }
        return std::exp(s.log_T() - before);
    };
    const cplx far(0.71, 0.64);
    CHECK(std::abs(loop_ratio(cfg.t1[0], true, far) - std::exp(2.0 * kPi * kI * cfg.c1[0])) < 1e-12);
    CHECK(std::abs(loop_ratio(cfg.t1[1], true, far) - std::exp(2.0 * kPi * kI * cfg.c1[1])) < 1e-12);
    CHECK(std::abs(loop_ratio(cfg.t2[0], false, far) - std::exp(2.0 * kPi * kI * cfg.c2[0])) < 1e-12);
    // Around u1 = u2 with u2 fixed.
    const double r = 0.02;
    BranchState s(cfg, far + r, far);
    const cplx before = s.log_T();
    for (int i = 1; i <= 64; ++i) s.transport(far + r * std::exp(kI * (2.0 * kPi * i / 64)), far);
    CHECK(std::abs(std::exp(s.log_T() - before) - std::exp(2.0 * kPi * kI * cfg.c)) < 1e-12);
}

TEST_CASE("T starts on the principal branch of every theta factor") {
    std::mt19937_64 rng(62);
    const auto cfg = random_config(1, 1, rng);
    const auto [u1, u2] = testing::generic_point(rng, cfg);
    const BranchState s(cfg, u1, u2);
    const auto& tau = cfg.tau;
    const auto power = [&](cplx e, cplx z) { return std::exp(e * std::log(kernel::theta1(z, tau))); };
    const cplx want = std::exp(2.0 * kPi * kI * (cfg.c10 * u1 + cfg.c20 * u2)) * power(cfg.c, u1 - u2) *
                      power(cfg.c, u1 + u2) * power(cfg.c1[0], u1 - cfg.t1[0]) *
                      power(cfg.c2[0], u2 - cfg.t2[0]);
    CHECK(s.factor_count() == 4);
    CHECK(std::abs(s.T() / want - 1.0) < 1e-12);
}

TEST_CASE("the integral of an exact form vanishes") {
    const auto& cfg = sample();
    const auto [l1, l2] = derive_lambda(cfg);
    // d/du1 (T phi) / T with phi = s(u1 - t11; l1) s(u2 - t21; l2); component 1 is phi.
    const Integrand exact = [l1 = l1, l2 = l2](const ProblemConfig& c) -> PointIntegrand {
        return [c, l1, l2](cplx u1, cplx u2, std::span<cplx> out) {
            const auto& tau = c.tau;
            const cplx a = u1 - c.t1[0];
            const cplx phi = kernel::s_func(a, l1, tau) * kernel::s_func(u2 - c.t2[0], l2, tau);
            const cplx dlogT = 2.0 * kPi * kI * c.c10 + c.c * kernel::rho(u1 - u2, tau) +
                               c.c * kernel::rho(u1 + u2, tau) + c.c1[0] * kernel::rho(a, tau);
            const cplx dlogphi = kernel::rho(a - l1, tau) - kernel::rho(a, tau);
            out[0] = phi * (dlogT + dlogphi);
            out[1] = phi;
        };
    };
    const auto plan = plan_quadrature(sample_cycle(), cfg, exact, 2);
    const auto I = integrate(plan, sample_cycle(), cfg, exact, 2);
    CHECK(std::abs(I[1]) > 1e-3);
    CHECK(std::abs(I[0]) / std::abs(I[1]) < 1e-7);
}

TEST_CASE("serial and parallel integration agree exactly") {
    const auto& cfg = sample();
    const auto par = integrate(sample_plan(), sample_cycle(), cfg, form_integrand(), 9, Execution::kParallel);
    const auto ser = integrate(sample_plan(), sample_cycle(), cfg, form_integrand(), 9, Execution::kSerial);
    REQUIRE(par.size() == 9);
    for (std::size_t k = 0; k < par.size(); ++k) CHECK(par[k] == ser[k]);
}

TEST_CASE("refining the plan does not move the integral") {
    const auto& cfg = sample();
    const auto coarse = rw_integral(sample_cycle(), cfg, sample_plan());
    const auto fine = rw_integral(sample_cycle(), cfg, refined(sample_plan(), sample_cycle(), cfg));
    cplx scale;
    CHECK(proportional_misfit(coarse, fine, scale) < 1e-7);
    CHECK(std::abs(scale - 1.0) < 1e-7);
}

TEST_CASE("homotopic loops give proportional integrals") {
    const auto& cfg = sample();
    const auto a = rw_integral(sample_cycle(), cfg, sample_plan());
    const auto wider = product_cycle(cfg, {}, {}, 0.06);
    const auto b = rw_integral(wider, cfg);
    cplx scale;
    CHECK(proportional_misfit(a, b, scale) < 1e-7);
}

TEST_CASE("differential system on the sample cycle") {
    const auto& cfg = sample();
    const auto rows = verify_ode_sweep({1, 1}, sample_cycle(), cfg, {1e-2, 5e-3}, sample_plan());
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].residual < 1e-3);
    CHECK(rows[0].residual / rows[1].residual == doctest::Approx(4.0).epsilon(0.1));
}
