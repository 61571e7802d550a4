#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rw/config.hpp"
#include "rw/elliptic_kernel.hpp"

namespace rw::forms {

/// Coefficients g_* of the basis forms psi_* = g_* du1 ^ du2 for one configuration.
/// The s-kernels for every lambda combination are built once at construction.
class FormEvaluator {
public:
    explicit FormEvaluator(const ProblemConfig& cfg);

    const ProblemConfig& config() const noexcept { return cfg_; }
    cplx lambda1() const noexcept { return l1_; }
    cplx lambda2() const noexcept { return l2_; }
    /// ell = e^{pi i (lambda1 + lambda2)}.
    cplx ell() const noexcept { return ell_; }
    int size() const noexcept { return (cfg_.n1() + 2) * (cfg_.n2() + 2); }

    cplx point(int i, int j, cplx u1, cplx u2) const;
    cplx row_pm(int i, int sign, cplx u1, cplx u2) const;
    cplx col_pm(int sign, int j, cplx u1, cplx u2) const;
    cplx corner_raw(int m, cplx u1, cplx u2) const;
    /// The M^{-1} combination of the four raw corner forms.
    cplx corner(int m, cplx u1, cplx u2) const;

    cplx operator()(const BasisIndex& idx, cplx u1, cplx u2) const;

    /// All coefficients in psi_index_set order; `out` must hold size() values.
    void evaluate_all(cplx u1, cplx u2, std::span<cplx> out) const;
    std::vector<cplx> evaluate_all(cplx u1, cplx u2) const;

    /// The same forms at -lambda.
    FormEvaluator dual() const;

private:
    ProblemConfig cfg_;
    cplx l1_;
    cplx l2_;
    cplx ell_;
    kernel::SKernel s_l1_;
    kernel::SKernel s_l2_;
    std::array<kernel::SKernel, 2> s_row_first_;   // lambda1 -/+ lambda2, indexed by sign
    std::array<kernel::SKernel, 2> s_row_second_;  // +/- lambda2
    std::array<kernel::SKernel, 2> s_col_second_;  // lambda2 -/+ lambda1
    std::array<kernel::SKernel, 4> s_corner_sum_;  // (lambda1 + lambda2 + 2 w_m)/2
    std::array<kernel::SKernel, 4> s_corner_diff_; // (lambda1 - lambda2 + 2 w_m)/2
};

cplx g_point(int i, int j, cplx u1, cplx u2, const ProblemConfig& cfg);
cplx g_row_pm(int i, int sign, cplx u1, cplx u2, const ProblemConfig& cfg);
cplx g_col_pm(int sign, int j, cplx u1, cplx u2, const ProblemConfig& cfg);
cplx g_corner_raw(int m, cplx u1, cplx u2, const ProblemConfig& cfg);
cplx g_corner(int m, cplx u1, cplx u2, const ProblemConfig& cfg);

/// M with rows (1,1,1,1), (1,1,-1,-1), (l,-l,l,-l), (l,-l,-l,l), l = e^{pi i (lambda1+lambda2)}.
struct ResidueMatrix {
    Eigen::Matrix4cd entries;
    cplx ell;

    /// The closed-form inverse, not a numerical inversion.
    Eigen::Matrix4cd inverse() const;
};

ResidueMatrix residue_matrix(cplx lambda1, cplx lambda2);
ResidueMatrix residue_matrix(const ProblemConfig& cfg);

/// Diagonal cohomology intersection matrix in psi_index_set order.
Eigen::MatrixXcd intersection_matrix(const ProblemConfig& cfg);

/// Local coordinates (x, y) at an intersection of two hyperplanes, x cutting out the
/// hyperplane taken first. u = base + x * dx + y * dy; jacobian = d(x,y)/d(u1,u2).
struct LocalChart {
    std::array<cplx, 2> base;
    std::array<cplx, 2> dx;
    std::array<cplx, 2> dy;
    cplx jacobian;

    std::array<cplx, 2> at(cplx x, cplx y) const;
};

/// The intersection point a basis form is normalised at, with its chart.
struct IntersectionPoint {
    BasisIndex owner;
    LocalChart chart;
};

/// One intersection point per basis index, in psi_index_set order. Corners use the
/// representative (w_m, w_m) with H_+ taken first.
std::vector<IntersectionPoint> intersection_points(const ProblemConfig& cfg);

/// Chart for Res_{u2 = w_m} Res_{u1 = -sign u2} at the representative (-sign w_m, w_m).
LocalChart corner_table_chart(int m, int sign, const ModularParam& tau);

using Coefficient = std::function<cplx(cplx u1, cplx u2)>;

/// Iterated residue as the diagonal one-sided limit x = y = h of x y g / jacobian,
/// extrapolated linearly from h1 and h2.
cplx iterated_residue(const Coefficient& g, const LocalChart& chart, double h1 = 1e-4,
                      double h2 = 1e-5);

/// Nested limit for charts where a third polar line passes through the point:
/// the inner limit in x is taken at x = ratio * y, then y -> 0; both extrapolated.
cplx iterated_residue_nested(const Coefficient& g, const LocalChart& chart,
                             std::array<double, 2> outer = {1e-2, 1e-3},
                             std::array<double, 2> inner_ratio = {1e-3, 1e-4});

}  // namespace rw::forms
