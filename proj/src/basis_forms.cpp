#include "rw/basis_forms.hpp"

#include <stdexcept>

namespace rw::forms {
namespace {

// Index 0 is the + sign, index 1 the - sign.
int slot(int sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
    return sign > 0 ? 0 : 1;
}

std::array<kernel::SKernel, 2> pair_of(cplx plus, cplx minus, const ModularParam& tau) {
    return {kernel::SKernel(plus, tau), kernel::SKernel(minus, tau)};
}

std::array<kernel::SKernel, 4> corner_kernels(cplx base, const ModularParam& tau) {
    const auto w = half_periods(tau);
    return {kernel::SKernel((base + 2.0 * w[0]) / 2.0, tau),
            kernel::SKernel((base + 2.0 * w[1]) / 2.0, tau),
            kernel::SKernel((base + 2.0 * w[2]) / 2.0, tau),
            kernel::SKernel((base + 2.0 * w[3]) / 2.0, tau)};
}

void check_point(int idx, int n, const char* which) {
    if (idx < 1 || idx > n) throw std::out_of_range(std::string(which) + " index out of range");
}

}  // namespace

FormEvaluator::FormEvaluator(const ProblemConfig& cfg)
    : cfg_(cfg),
      l1_(derive_lambda(cfg).first),
      l2_(derive_lambda(cfg).second),
      ell_(std::exp(kI * kPi * (l1_ + l2_))),
      s_l1_(l1_, cfg.tau),
      s_l2_(l2_, cfg.tau),
      s_row_first_(pair_of(l1_ - l2_, l1_ + l2_, cfg.tau)),
      s_row_second_(pair_of(l2_, -l2_, cfg.tau)),
      s_col_second_(pair_of(l2_ - l1_, l2_ + l1_, cfg.tau)),
      s_corner_sum_(corner_kernels(l1_ + l2_, cfg.tau)),
      s_corner_diff_(corner_kernels(l1_ - l2_, cfg.tau)) {}

cplx FormEvaluator::point(int i, int j, cplx u1, cplx u2) const {
    check_point(i, cfg_.n1(), "t1");
    check_point(j, cfg_.n2(), "t2");
    return s_l1_(u1 - cfg_.t1[i - 1]) * s_l2_(u2 - cfg_.t2[j - 1]);
}

cplx FormEvaluator::row_pm(int i, int sign, cplx u1, cplx u2) const {
    check_point(i, cfg_.n1(), "t1");
    const int k = slot(sign);
    return double(sign) * s_row_first_[k](u1 - cfg_.t1[i - 1]) *
           s_row_second_[k](u1 + double(sign) * u2);
}

cplx FormEvaluator::col_pm(int sign, int j, cplx u1, cplx u2) const {
    check_point(j, cfg_.n2(), "t2");
    const int k = slot(sign);
    return s_l1_(u1 + double(sign) * u2) * s_col_second_[k](u2 - cfg_.t2[j - 1]);
}

cplx FormEvaluator::corner_raw(int m, cplx u1, cplx u2) const {
    if (m < 1 || m > 4) throw std::out_of_range("corner index must be 1..4");
    const cplx e = (m >= 3) ? std::exp(-2.0 * kPi * kI * u1) : cplx(1.0);
    return -2.0 * e * s_corner_sum_[m - 1](u1 + u2) * s_corner_diff_[m - 1](u1 - u2);
}

cplx FormEvaluator::corner(int m, cplx u1, cplx u2) const {
    if (m < 1 || m > 4) throw std::out_of_range("corner index must be 1..4");
    std::array<cplx, 4> raw;
    for (int k = 0; k < 4; ++k) raw[k] = corner_raw(k + 1, u1, u2);
    const cplx inv = 1.0 / ell_;
    switch (m) {
        case 1:
            return (raw[0] + raw[1] + raw[2] + raw[3]) / 4.0;
        case 2:
            return (raw[0] + raw[1] - raw[2] - raw[3]) / 4.0;
        case 3:
            return inv * (raw[0] - raw[1] + raw[2] - raw[3]) / 4.0;
        default:
            return inv * (raw[0] - raw[1] - raw[2] + raw[3]) / 4.0;
    }
}

cplx FormEvaluator::operator()(const BasisIndex& idx, cplx u1, cplx u2) const {
    switch (idx.kind) {
        case BasisIndex::Kind::kPoint:
            return point(idx.i, idx.j, u1, u2);
        case BasisIndex::Kind::kRowPM:
            return row_pm(idx.i, idx.sign, u1, u2);
        case BasisIndex::Kind::kColPM:
            return col_pm(idx.sign, idx.j, u1, u2);
        case BasisIndex::Kind::kCorner:
            return corner(idx.m, u1, u2);
    }
    throw std::logic_error("unknown basis index kind");
}

void FormEvaluator::evaluate_all(cplx u1, cplx u2, std::span<cplx> out) const {
    const int n1 = cfg_.n1();
    const int n2 = cfg_.n2();
    if (static_cast<int>(out.size()) < size()) throw std::invalid_argument("output span too small");

    // Every denominator theta1(u) is shared by several kernels; compute each once.
    const auto d_sum = s_l1_.denominator(u1 + u2);
    const auto d_diff = s_l1_.denominator(u1 - u2);
    std::vector<kernel::ScaledTheta> d1(n1), d2(n2);
    for (int i = 0; i < n1; ++i) d1[i] = s_l1_.denominator(u1 - cfg_.t1[i]);
    for (int j = 0; j < n2; ++j) d2[j] = s_l1_.denominator(u2 - cfg_.t2[j]);

    std::vector<cplx> a(n1), b(n2);
    for (int i = 0; i < n1; ++i) a[i] = s_l1_(u1 - cfg_.t1[i], d1[i]);
    for (int j = 0; j < n2; ++j) b[j] = s_l2_(u2 - cfg_.t2[j], d2[j]);
    std::size_t pos = 0;
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) out[pos++] = a[i] * b[j];

    const cplx row_second[2] = {s_row_second_[0](u1 + u2, d_sum), s_row_second_[1](u1 - u2, d_diff)};
    for (int i = 0; i < n1; ++i) {
        out[pos++] = s_row_first_[0](u1 - cfg_.t1[i], d1[i]) * row_second[0];
        out[pos++] = -s_row_first_[1](u1 - cfg_.t1[i], d1[i]) * row_second[1];
    }
    const cplx col_first[2] = {s_l1_(u1 + u2, d_sum), s_l1_(u1 - u2, d_diff)};
    for (int j = 0; j < n2; ++j) {
        out[pos++] = col_first[0] * s_col_second_[0](u2 - cfg_.t2[j], d2[j]);
        out[pos++] = col_first[1] * s_col_second_[1](u2 - cfg_.t2[j], d2[j]);
    }

    std::array<cplx, 4> raw;
    const cplx e = std::exp(-2.0 * kPi * kI * u1);
    for (int k = 0; k < 4; ++k) {
        raw[k] = -2.0 * s_corner_sum_[k](u1 + u2, d_sum) * s_corner_diff_[k](u1 - u2, d_diff);
        if (k >= 2) raw[k] *= e;
    }
    const cplx inv = 1.0 / ell_;
    out[pos++] = (raw[0] + raw[1] + raw[2] + raw[3]) / 4.0;
    out[pos++] = (raw[0] + raw[1] - raw[2] - raw[3]) / 4.0;
    out[pos++] = inv * (raw[0] - raw[1] + raw[2] - raw[3]) / 4.0;
    out[pos++] = inv * (raw[0] - raw[1] - raw[2] + raw[3]) / 4.0;
}

std::vector<cplx> FormEvaluator::evaluate_all(cplx u1, cplx u2) const {
    std::vector<cplx> out(size());
    evaluate_all(u1, u2, out);
    return out;
}

FormEvaluator FormEvaluator::dual() const { return FormEvaluator(with_lambda(cfg_, -l1_, -l2_)); }

cplx g_point(int i, int j, cplx u1, cplx u2, const ProblemConfig& cfg) {
    return FormEvaluator(cfg).point(i, j, u1, u2);
}

cplx g_row_pm(int i, int sign, cplx u1, cplx u2, const ProblemConfig& cfg) {
    return FormEvaluator(cfg).row_pm(i, sign, u1, u2);
}

cplx g_col_pm(int sign, int j, cplx u1, cplx u2, const ProblemConfig& cfg) {
    return FormEvaluator(cfg).col_pm(sign, j, u1, u2);
}

cplx g_corner_raw(int m, cplx u1, cplx u2, const ProblemConfig& cfg) {
    return FormEvaluator(cfg).corner_raw(m, u1, u2);
}

cplx g_corner(int m, cplx u1, cplx u2, const ProblemConfig& cfg) {
    return FormEvaluator(cfg).corner(m, u1, u2);
}

Eigen::Matrix4cd ResidueMatrix::inverse() const {
    const cplx li = 1.0 / ell;
    Eigen::Matrix4cd inv;
    inv << 1.0, 1.0, li, li,
           1.0, 1.0, -li, -li,
           1.0, -1.0, li, -li,
           1.0, -1.0, -li, li;
    return inv / 4.0;
}

ResidueMatrix residue_matrix(cplx lambda1, cplx lambda2) {
    const cplx l = std::exp(kI * kPi * (lambda1 + lambda2));
    ResidueMatrix r;
    r.ell = l;
    r.entries << 1.0, 1.0, 1.0, 1.0,
                 1.0, 1.0, -1.0, -1.0,
                 l, -l, l, -l,
                 l, -l, -l, l;
    return r;
}

ResidueMatrix residue_matrix(const ProblemConfig& cfg) {
    const auto [l1, l2] = derive_lambda(cfg);
    return residue_matrix(l1, l2);
}

Eigen::MatrixXcd intersection_matrix(const ProblemConfig& cfg) {
    const auto index = psi_index_set(cfg);
    const cplx two_pi_i_sq = (2.0 * kPi * kI) * (2.0 * kPi * kI);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(index.size(), index.size());
    for (std::size_t a = 0; a < index.size(); ++a) {
        const auto& idx = index[a];
        cplx denom;
        switch (idx.kind) {
            case BasisIndex::Kind::kPoint:
                denom = cfg.c1[idx.i - 1] * cfg.c2[idx.j - 1];
                break;
            case BasisIndex::Kind::kRowPM:
                denom = cfg.c1[idx.i - 1] * cfg.c;
                break;
            case BasisIndex::Kind::kColPM:
                denom = cfg.c2[idx.j - 1] * cfg.c;
                break;
            case BasisIndex::Kind::kCorner:
                denom = cfg.c * cfg.c;
                break;
        }
        out(a, a) = two_pi_i_sq / denom;
    }
    return out;
}

std::array<cplx, 2> LocalChart::at(cplx x, cplx y) const {
    return {base[0] + x * dx[0] + y * dy[0], base[1] + x * dx[1] + y * dy[1]};
}

std::vector<IntersectionPoint> intersection_points(const ProblemConfig& cfg) {
    const auto w = half_periods(cfg.tau);
    std::vector<IntersectionPoint> out;
    for (const auto& idx : psi_index_set(cfg)) {
        LocalChart c;
        switch (idx.kind) {
            case BasisIndex::Kind::kPoint: {
                // x = u1 - t1i, y = u2 - t2j.
                c = {{cfg.t1[idx.i - 1], cfg.t2[idx.j - 1]}, {1.0, 0.0}, {0.0, 1.0}, 1.0};
                break;
            }
            case BasisIndex::Kind::kRowPM: {
                // x = u1 - t1i, y = u1 + s u2, at (t1i, -s t1i).
                const double s = idx.sign;
                const cplx t = cfg.t1[idx.i - 1];
                c = {{t, -s * t}, {1.0, -s}, {0.0, s}, s};
                break;
            }
            case BasisIndex::Kind::kColPM: {
                // x = u1 + s u2, y = u2 - t2j, at (-s t2j, t2j).
                const double s = idx.sign;
                const cplx t = cfg.t2[idx.j - 1];
                c = {{-s * t, t}, {1.0, 0.0}, {-s, 1.0}, 1.0};
                break;
            }
            case BasisIndex::Kind::kCorner: {
                // x = u1 + u2 - 2 w_m, y = u1 - u2, at (w_m, w_m).
                const cplx wm = w[idx.m - 1];
                c = {{wm, wm}, {0.5, 0.5}, {0.5, -0.5}, -2.0};
                break;
            }
        }
        out.push_back({idx, c});
    }
    return out;
}

LocalChart corner_table_chart(int m, int sign, const ModularParam& tau) {
    if (m < 1 || m > 4) throw std::out_of_range("corner index must be 1..4");
    const cplx wm = half_periods(tau)[m - 1];
    const double s = slot(sign) == 0 ? 1.0 : -1.0;
    // x = u1 + s u2, y = u2 - w_m, at (-s w_m, w_m).
    return {{-s * wm, wm}, {1.0, 0.0}, {-s, 1.0}, 1.0};
}

cplx iterated_residue(const Coefficient& g, const LocalChart& chart, double h1, double h2) {
    const auto f = [&](double h) {
        const auto u = chart.at(h, h);
        return h * h * g(u[0], u[1]) / chart.jacobian;
    };
    return (h1 * f(h2) - h2 * f(h1)) / (h1 - h2);
}

cplx iterated_residue_nested(const Coefficient& g, const LocalChart& chart,
                             std::array<double, 2> outer, std::array<double, 2> inner_ratio) {
    const auto inner = [&](double y) {
        const auto f = [&](double x) {
            const auto u = chart.at(x, y);
            return x * y * g(u[0], u[1]) / chart.jacobian;
        };
        const double x1 = inner_ratio[0] * y;
        const double x2 = inner_ratio[1] * y;
        return (x1 * f(x2) - x2 * f(x1)) / (x1 - x2);
    };
    const double y1 = outer[0];
    const double y2 = outer[1];
    return (y1 * inner(y2) - y2 * inner(y1)) / (y1 - y2);
}

}  // namespace rw::forms
