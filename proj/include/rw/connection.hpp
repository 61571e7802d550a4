#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rw/config.hpp"

namespace rw::connection {

/// Which version of the corner rows F_{+-,m}, m = 3, 4, to assemble.
///
/// The printed rows carry a -pi i diagonal shift and no factor on the F_{p+}
/// (resp. F_{+q}) coupling. Differentiating through M^{-1}, whose ell^{-1} depends
/// on lambda, cancels that shift and leaves a factor e^{-2 pi i lambda_2}
/// (resp. e^{-2 pi i lambda_1}) on the coupling. Only the corrected rows are flat.
enum class RowConvention { kCorrected, kAsPrinted };

/// The derivative d/dt_{kp}; k in {1, 2}, p 1-based.
struct Derivative {
    int k = 1;
    int p = 1;

    std::string label() const;
    bool operator==(const Derivative&) const = default;
};

/// Every derivative direction of a configuration: (1,1..n1) then (2,1..n2).
std::vector<Derivative> derivatives(const ProblemConfig& cfg);

struct ConnectionMatrix {
    Derivative deriv;
    Eigen::MatrixXcd entries;
    std::vector<BasisIndex> legend;
    ProblemConfig at;
};

ConnectionMatrix assemble_A1p(int p, const ProblemConfig& cfg,
                              RowConvention convention = RowConvention::kCorrected);
ConnectionMatrix assemble_A2q(int q, const ProblemConfig& cfg,
                              RowConvention convention = RowConvention::kCorrected);
ConnectionMatrix assemble(Derivative d, const ProblemConfig& cfg,
                          RowConvention convention = RowConvention::kCorrected);

/// Rows of A_{kp} that hold pointwise for the forms, not only up to exact forms.
std::vector<BasisIndex> pointwise_rows(Derivative d, const ProblemConfig& cfg);

/// Signed permutation from the index set of the swapped problem, Psi(n1, n2), to
/// Psi(n2, n1): psi_* maps to sign * psi_{target}.
struct StarMap {
    int n1 = 0;
    int n2 = 0;
    std::vector<int> target;
    std::vector<int> sign;

    Eigen::MatrixXd matrix() const;
};

StarMap star_map(int n1, int n2);

/// S A S^{-1}.
Eigen::MatrixXcd star_conjugate(const Eigen::MatrixXcd& a, const StarMap& s);

/// A_{2q}(cfg) rebuilt from the first block of the swapped configuration.
Eigen::MatrixXcd star_mirror_A2q(int q, const ProblemConfig& cfg,
                                 RowConvention convention = RowConvention::kCorrected);

using FormFunction = std::function<cplx(const ProblemConfig& cfg, cplx u1, cplx u2)>;

/// nabla_{kp} = d/dt_{kp} - c_{kp} d/dlambda_k - c_{kp} rho(u_k - t_{kp}), with both
/// derivatives as central differences plus one Richardson step.
cplx nabla_kp_numeric(Derivative d, const FormFunction& form, cplx u1, cplx u2,
                      const ProblemConfig& cfg, double h = 1e-6);

/// max |d_b A_a + A_a A_b - d_a A_b - A_b A_a|, derivatives taken with c_{k,inf} fixed.
double flatness_residual(const ProblemConfig& cfg, Derivative a, Derivative b, double h = 1e-4,
                         RowConvention convention = RowConvention::kCorrected,
                         bool richardson = true);

}  // namespace rw::connection
