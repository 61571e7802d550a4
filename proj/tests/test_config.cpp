#include <doctest.h>

#include <random>
#include <set>
#include <string>

#include "rw/config.hpp"

using namespace rw;

namespace {

bool has_condition(const std::vector<Violation>& v, const std::string& condition) {
    for (const auto& x : v)
        if (x.condition == condition) return true;
    return false;
}

}  // namespace

TEST_CASE("index set order and size") {
    const auto idx = psi_index_set(2, 1);
    std::vector<std::string> labels;
    for (const auto& i : idx) labels.push_back(i.label());
    const std::vector<std::string> want = {"(1,1)", "(2,1)", "(1,+)", "(1,-)", "(2,+)", "(2,-)",
                                           "(+,1)", "(-,1)", "(+-,1)", "(+-,2)", "(+-,3)", "(+-,4)"};
    CHECK(labels == want);
    for (int n1 = 1; n1 <= 5; ++n1) {
        for (int n2 = 1; n2 <= 5; ++n2) {
            const auto set = psi_index_set(n1, n2);
            CHECK(static_cast<int>(set.size()) == euler_characteristic(n1, n2));
            for (std::size_t a = 0; a < set.size(); ++a) CHECK(basis_position(set[a], n1, n2) == int(a));
        }
    }
}

TEST_CASE("random configurations satisfy every assumption") {
    std::mt19937_64 rng(21);
    for (int n = 0; n < 20; ++n) {
        const auto cfg = random_config(1 + n % 3, 1 + (n / 3) % 3, rng);
        CHECK(validate(cfg).empty());
        const auto cyc = random_config(1, 1, rng, Placement::kCycleCells);
        CHECK(validate(cyc).empty());
    }
}

TEST_CASE("violations are named") {
    std::mt19937_64 rng(22);
    const auto base = random_config(2, 2, rng);

    auto integer_c = base;
    integer_c.c1[0] = 1.0;
    integer_c.c1[1] = -2.0 * integer_c.c - 1.0;
    CHECK(has_condition(validate(integer_c), "exponent in Z"));

    auto unbalanced = base;
    unbalanced.c2[0] += 0.1;
    CHECK(has_condition(validate(unbalanced), "sum condition"));

    auto coincident = base;
    coincident.t2[1] = coincident.t1[0] + 1.0;
    CHECK(has_condition(validate(coincident), "distinct points"));

    auto antipodal = base;
    antipodal.t2[0] = -antipodal.t1[1] + base.tau.tau();
    CHECK(has_condition(validate(antipodal), "t1 + t2 off lattice"));

    auto shape = base;
    shape.c1.pop_back();
    CHECK(has_condition(validate(shape), "shape"));

    const auto on_lattice = with_lambda(base, cplx(1.0), derive_lambda(base).second);
    CHECK(has_condition(validate(on_lattice), "lambda off lattice"));
}

TEST_CASE("lambda is linear in each point with coefficient -c") {
    std::mt19937_64 rng(23);
    const auto cfg = random_config(2, 3, rng);
    const auto [l1, l2] = derive_lambda(cfg);
    const cplx d(0.013, -0.021);
    for (int p = 1; p <= 2; ++p) {
        const auto moved = derive_lambda(shift_point(cfg, 1, p, d));
        CHECK(std::abs(moved.first - (l1 - cfg.c1[p - 1] * d)) < 1e-14);
        CHECK(std::abs(moved.second - l2) < 1e-14);
    }
    for (int q = 1; q <= 3; ++q) {
        const auto moved = derive_lambda(shift_point(cfg, 2, q, d));
        CHECK(std::abs(moved.second - (l2 - cfg.c2[q - 1] * d)) < 1e-14);
    }
}

TEST_CASE("with_lambda and swapped") {
    std::mt19937_64 rng(24);
    const auto cfg = random_config(2, 1, rng);
    const auto set = with_lambda(cfg, cplx(0.1, 0.2), cplx(-0.3, 0.05));
    const auto [a, b] = derive_lambda(set);
    CHECK(std::abs(a - cplx(0.1, 0.2)) < 1e-14);
    CHECK(std::abs(b - cplx(-0.3, 0.05)) < 1e-14);

    const auto sw = swapped(cfg);
    CHECK(sw.n1() == 1);
    CHECK(sw.n2() == 2);
    CHECK(derive_lambda(sw).first == derive_lambda(cfg).second);
    const auto back = swapped(sw);
    CHECK(back.t1 == cfg.t1);
    CHECK(back.c2 == cfg.c2);
    CHECK(back.c1_inf == cfg.c1_inf);
}

TEST_CASE("half periods") {
    const ModularParam tau(cplx(0.3, 1.2));
    const auto w = half_periods(tau);
    CHECK(w[0] == cplx(0.0));
    CHECK(w[1] == cplx(0.5));
    CHECK(w[2] == tau.tau() / 2.0);
    CHECK(w[3] == (1.0 + tau.tau()) / 2.0);
    CHECK(euler_characteristic(1, 1) == 9);
    CHECK(euler_characteristic(3, 2) == 20);
}
