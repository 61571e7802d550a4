#include <doctest.h>

#include <random>

#include "rw/basis_forms.hpp"
#include "support.hpp"

using namespace rw;
using rw::testing::rel_err;

TEST_CASE("residue matrix inverse") {
    std::mt19937_64 rng(31);
    for (int n = 0; n < 10; ++n) {
        const auto cfg = random_config(1, 2, rng);
        const auto M = forms::residue_matrix(cfg);
        const Eigen::Matrix4cd prod = M.entries * M.inverse();
        CHECK((prod - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((M.inverse() * M.entries - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("iterated residues follow the Kronecker pattern") {
    std::mt19937_64 rng(32);
    for (auto [n1, n2] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}}) {
        const auto cfg = random_config(n1, n2, rng);
        const forms::FormEvaluator ev(cfg);
        const auto idx = psi_index_set(cfg);
        const auto pts = forms::intersection_points(cfg);
        REQUIRE(pts.size() == idx.size());
        double worst = 0.0;
        for (std::size_t a = 0; a < idx.size(); ++a) {
            CHECK(pts[a].owner == idx[a]);
            for (std::size_t b = 0; b < idx.size(); ++b) {
                const auto r = forms::iterated_residue(
                    [&](cplx u1, cplx u2) { return ev(idx[b], u1, u2); }, pts[a].chart);
                worst = std::max(worst, std::abs(r - (a == b ? 1.0 : 0.0)));
            }
        }
        CHECK(worst < 1e-3);
    }
}

TEST_CASE("corner residues at the representative (-w_m, w_m)") {
    std::mt19937_64 rng(33);
    for (int n = 0; n < 3; ++n) {
        const auto cfg = random_config(1, 1, rng);
        const forms::FormEvaluator ev(cfg);
        const cplx e = std::exp(-2.0 * kPi * kI * ev.lambda1());
        const cplx across[4] = {1.0, 1.0, e, e};
        for (int m = 1; m <= 4; ++m) {
            const auto g = [&](cplx u1, cplx u2) { return ev.corner(m, u1, u2); };
            const cplx plus = forms::iterated_residue_nested(g, forms::corner_table_chart(m, +1, cfg.tau));
            const cplx minus = forms::iterated_residue_nested(g, forms::corner_table_chart(m, -1, cfg.tau));
            CHECK(std::abs(plus - across[m - 1]) / std::abs(across[m - 1]) < 1e-3);
            CHECK(std::abs(minus + 1.0) < 1e-3);
        }
    }
}

TEST_CASE("evaluator, free functions and evaluate_all agree") {
    std::mt19937_64 rng(34);
    const auto cfg = random_config(2, 2, rng);
    const forms::FormEvaluator ev(cfg);
    const auto idx = psi_index_set(cfg);
    for (int n = 0; n < 10; ++n) {
        const auto [u1, u2] = testing::generic_point(rng, cfg);
        const auto all = ev.evaluate_all(u1, u2);
        for (std::size_t a = 0; a < idx.size(); ++a) CHECK(rel_err(all[a], ev(idx[a], u1, u2)) < 1e-13);
        CHECK(rel_err(ev.point(1, 2, u1, u2), forms::g_point(1, 2, u1, u2, cfg)) < 1e-13);
        CHECK(rel_err(ev.row_pm(2, -1, u1, u2), forms::g_row_pm(2, -1, u1, u2, cfg)) < 1e-13);
        CHECK(rel_err(ev.col_pm(1, 1, u1, u2), forms::g_col_pm(1, 1, u1, u2, cfg)) < 1e-13);
        for (int m = 1; m <= 4; ++m) {
            CHECK(rel_err(ev.corner_raw(m, u1, u2), forms::g_corner_raw(m, u1, u2, cfg)) < 1e-13);
            CHECK(rel_err(ev.corner(m, u1, u2), forms::g_corner(m, u1, u2, cfg)) < 1e-13);
        }
    }
}

TEST_CASE("corner forms are the M^{-1} combination of the raw ones") {
    std::mt19937_64 rng(35);
    const auto cfg = random_config(1, 1, rng);
    const forms::FormEvaluator ev(cfg);
    const auto inv = forms::residue_matrix(cfg).inverse();
    const auto [u1, u2] = testing::generic_point(rng, cfg);
    Eigen::Vector4cd raw;
    for (int m = 0; m < 4; ++m) raw(m) = ev.corner_raw(m + 1, u1, u2);
    Eigen::Vector4cd combined;
    for (int m = 0; m < 4; ++m) combined(m) = ev.corner(m + 1, u1, u2);
    // (g_{+-,1}, ..., g_{+-,4}) = (G_1, ..., G_4) M^{-1}.
    const Eigen::Vector4cd via_rows = (raw.transpose() * inv).transpose();
    CHECK((combined - via_rows).cwiseAbs().maxCoeff() < 1e-12 * std::max(1.0, raw.cwiseAbs().maxCoeff()));
}

TEST_CASE("intersection matrix is diagonal with the exponent pattern") {
    std::mt19937_64 rng(36);
    const auto cfg = random_config(1, 1, rng);
    const auto H = forms::intersection_matrix(cfg);
    const cplx k = (2.0 * kPi * kI) * (2.0 * kPi * kI);
    REQUIRE(H.rows() == 9);
    CHECK(rel_err(H(0, 0), k / (cfg.c1[0] * cfg.c2[0])) < 1e-14);
    CHECK(rel_err(H(1, 1), k / (cfg.c1[0] * cfg.c)) < 1e-14);
    CHECK(rel_err(H(2, 2), k / (cfg.c1[0] * cfg.c)) < 1e-14);
    CHECK(rel_err(H(3, 3), k / (cfg.c2[0] * cfg.c)) < 1e-14);
    CHECK(rel_err(H(4, 4), k / (cfg.c2[0] * cfg.c)) < 1e-14);
    for (int m = 5; m < 9; ++m) CHECK(rel_err(H(m, m), k / (cfg.c * cfg.c)) < 1e-14);
    CHECK((H - Eigen::MatrixXcd(H.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);
}
