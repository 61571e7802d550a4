#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rw/elliptic_kernel.hpp"

namespace rw {

/// Problem data: tau, marked points and exponents. lambda is not stored; it is
/// derived from the constants c_{k,inf} so that it moves with the points.
struct ProblemConfig {
    ModularParam tau{cplx(0.0, 1.0)};
    std::vector<cplx> t1;
    std::vector<cplx> t2;
    cplx c;
    cplx c10;
    cplx c20;
    std::vector<cplx> c1;
    std::vector<cplx> c2;
    cplx c1_inf;
    cplx c2_inf;

    int n1() const noexcept { return static_cast<int>(t1.size()); }
    int n2() const noexcept { return static_cast<int>(t2.size()); }
};

/// lambda_k = -c_{k,inf} - c_{k0} tau - sum_j c_{kj} t_{kj}.
std::pair<cplx, cplx> derive_lambda(const ProblemConfig& cfg);

struct Violation {
    std::string condition;
    std::string detail;
};

std::vector<Violation> validate(const ProblemConfig& cfg);

/// One element of the basis index set. Indices i, j are 1-based; sign is +1 or -1.
struct BasisIndex {
    enum class Kind { kPoint, kRowPM, kColPM, kCorner };

    Kind kind = Kind::kPoint;
    int i = 0;
    int j = 0;
    int sign = 0;
    int m = 0;

    static BasisIndex point(int i, int j) { return {Kind::kPoint, i, j, 0, 0}; }
    static BasisIndex row_pm(int i, int sign) { return {Kind::kRowPM, i, 0, sign, 0}; }
    static BasisIndex col_pm(int sign, int j) { return {Kind::kColPM, 0, j, sign, 0}; }
    static BasisIndex corner(int m) { return {Kind::kCorner, 0, 0, 0, m}; }

    std::string label() const;
    bool operator==(const BasisIndex&) const = default;
};

/// Points (i,j) lexicographically, then (i,+),(i,-) by i, then (+,j),(-,j) by j,
/// then the four corners.
std::vector<BasisIndex> psi_index_set(int n1, int n2);
std::vector<BasisIndex> psi_index_set(const ProblemConfig& cfg);

/// Position of an index inside psi_index_set(n1, n2).
int basis_position(const BasisIndex& idx, int n1, int n2);

int euler_characteristic(int n1, int n2);

/// w_1..w_4 = 0, 1/2, tau/2, (1+tau)/2 (stored 0-based).
std::array<cplx, 4> half_periods(const ModularParam& tau);

/// rho(w_m): 0, 0, -pi i, -pi i.
std::array<cplx, 4> half_period_rho();

/// Copy of cfg with c_{k,inf} shifted so derive_lambda returns (lambda1, lambda2).
ProblemConfig with_lambda(const ProblemConfig& cfg, cplx lambda1, cplx lambda2);

/// Copy of cfg with t_{kp} moved by delta and c_{k,inf} held, so lambda_k co-varies.
ProblemConfig shift_point(const ProblemConfig& cfg, int k, int p, cplx delta);

/// The variable swap u1 <-> u2: exchanges t, c_k, c_{k0}, c_{k,inf}.
ProblemConfig swapped(const ProblemConfig& cfg);

enum class Placement {
    /// Points anywhere in the fundamental cell, pairwise separated.
    kGeneric,
    /// t1 inside the cell quarter E00 and t2 inside E11, as the cycle construction needs.
    kCycleCells,
};

/// Random valid configuration; the last c_{kj} is solved from the sum condition.
ProblemConfig random_config(int n1, int n2, std::mt19937_64& rng,
                            Placement placement = Placement::kGeneric, cplx tau = cplx(0.0, 1.0));

}  // namespace rw
