#include <doctest.h>

#include <random>

#include "rw/basis_forms.hpp"
#include "rw/connection.hpp"
#include "rw/errors.hpp"
#include "support.hpp"

using namespace rw;
using namespace rw::connection;

namespace {

/// max over the pointwise rows of |nabla g_row - sum_b A(row, b) g_b| / max(1, |nabla g_row|).
double pointwise_error(Derivative d, const Eigen::MatrixXcd& A, const ProblemConfig& cfg, cplx u1, cplx u2) {
    const forms::FormEvaluator ev(cfg);
    const auto g = ev.evaluate_all(u1, u2);
    double worst = 0.0;
    for (const auto& row : pointwise_rows(d, cfg)) {
        const FormFunction f = [row](const ProblemConfig& c, cplx a, cplx b) {
            return forms::FormEvaluator(c)(row, a, b);
        };
        const cplx lhs = nabla_kp_numeric(d, f, u1, u2, cfg);
        const int r = basis_position(row, cfg.n1(), cfg.n2());
        cplx rhs = 0.0;
        for (std::size_t b = 0; b < g.size(); ++b) rhs += A(r, b) * g[b];
        worst = std::max(worst, testing::rel_err(lhs, rhs));
    }
    return worst;
}

}  // namespace

TEST_CASE("matrices have the basis dimension and legend") {
    std::mt19937_64 rng(41);
    const auto cfg = random_config(1, 1, rng);
    for (const auto d : derivatives(cfg)) {
        const auto A = assemble(d, cfg);
        CHECK(A.entries.rows() == 9);
        CHECK(A.entries.cols() == 9);
        CHECK(A.legend == psi_index_set(cfg));
        CHECK(A.deriv == d);
        CHECK(A.entries.allFinite());
    }
    CHECK(derivatives(random_config(2, 3, rng)).size() == 5);
    CHECK_THROWS(assemble({1, 2}, cfg));
    CHECK_THROWS(assemble({3, 1}, cfg));
}

TEST_CASE("pointwise rows hold for the forms themselves") {
    std::mt19937_64 rng(42);
    const auto cfg = random_config(2, 2, rng);
    for (const auto d : derivatives(cfg)) {
        const auto A = assemble(d, cfg).entries;
        for (int n = 0; n < 3; ++n) {
            const auto [u1, u2] = testing::generic_point(rng, cfg, 0.1);
            CHECK(pointwise_error(d, A, cfg, u1, u2) < 1e-6);
        }
    }
}

TEST_CASE("pointwise rows exclude exactly the rows touching t_kp") {
    std::mt19937_64 rng(43);
    const auto cfg = random_config(2, 3, rng);
    const auto rows = pointwise_rows({1, 2}, cfg);
    // Points (1,j), rows (1,+-), columns (+-,j), corners.
    CHECK(rows.size() == 3u + 2u + 6u + 4u);
    for (const auto& r : rows) {
        if (r.kind == BasisIndex::Kind::kPoint || r.kind == BasisIndex::Kind::kRowPM) CHECK(r.i != 2);
    }
}

TEST_CASE("flatness with corrected corner rows, failure with the printed ones") {
    std::mt19937_64 rng(44);
    const auto cfg = random_config(2, 2, rng);
    const auto ds = derivatives(cfg);
    double corrected = 0.0;
    double printed = 0.0;
    for (std::size_t a = 0; a < ds.size(); ++a) {
        for (std::size_t b = a + 1; b < ds.size(); ++b) {
            corrected = std::max(corrected, flatness_residual(cfg, ds[a], ds[b]));
            printed = std::max(printed, flatness_residual(cfg, ds[a], ds[b], 1e-4, RowConvention::kAsPrinted));
        }
    }
    CHECK(corrected < 1e-5);
    CHECK(printed > 1e-2);
    CHECK_THROWS_AS(flatness_residual(cfg, ds[0], ds[0]), std::invalid_argument);
}

TEST_CASE("flatness residual decays like h^2 without extrapolation") {
    std::mt19937_64 rng(45);
    const auto cfg = random_config(1, 2, rng);
    const Derivative a{1, 1};
    const Derivative b{2, 2};
    const double r1 = flatness_residual(cfg, a, b, 1e-2, RowConvention::kCorrected, false);
    const double r2 = flatness_residual(cfg, a, b, 5e-3, RowConvention::kCorrected, false);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("star map is a signed permutation compatible with the swap") {
    for (auto [n1, n2] : {std::pair{1, 1}, std::pair{2, 3}, std::pair{3, 1}}) {
        const auto s = star_map(n1, n2);
        const Eigen::MatrixXd S = s.matrix();
        const int N = euler_characteristic(n1, n2);
        CHECK(S.rows() == N);
        CHECK((S * S.transpose() - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() == 0.0);
        // Applying the map twice returns every index with sign +1.
        const auto back = star_map(n2, n1);
        CHECK((back.matrix() * S - Eigen::MatrixXd::Identity(N, N)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("A_2q equals its mirror assembled from the first block") {
    std::mt19937_64 rng(46);
    for (int n = 0; n < 4; ++n) {
        const auto cfg = random_config(1 + n % 2, 1 + n / 2, rng);
        for (int q = 1; q <= cfg.n2(); ++q) {
            const auto direct = assemble_A2q(q, cfg).entries;
            const auto mirror = star_mirror_A2q(q, cfg);
            CHECK((direct - mirror).cwiseAbs().maxCoeff() < 1e-11 * std::max(1.0, direct.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("nabla of a t-independent form reduces to the lambda and rho terms") {
    std::mt19937_64 rng(47);
    const auto cfg = random_config(1, 1, rng);
    const auto [u1, u2] = testing::generic_point(rng, cfg);
    // f = 1 has no t dependence: nabla f = -c_{1p} rho(u1 - t_{1p}).
    const FormFunction one = [](const ProblemConfig&, cplx, cplx) { return cplx(1.0); };
    const cplx got = nabla_kp_numeric({1, 1}, one, u1, u2, cfg);
    const cplx want = -cfg.c1[0] * kernel::rho(u1 - cfg.t1[0], cfg.tau);
    CHECK(testing::rel_err(got, want) < 1e-12);
}
