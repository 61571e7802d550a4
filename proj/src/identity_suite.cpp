#include "rw/identity_suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rw/basis_forms.hpp"
#include "rw/elliptic_kernel.hpp"
#include "rw/errors.hpp"
#include "rw/integrator.hpp"

namespace rw::identities {
namespace {

using kernel::rho;
using kernel::s_func;

double rel(cplx lhs, cplx rhs) { return std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)); }

/// Lattice coordinates (x, y) of z = x + y tau.
std::pair<double, double> coordinates(cplx z, const ModularParam& tau) {
    const double y = z.imag() / tau.tau().imag();
    return {z.real() - y * tau.tau().real(), y};
}

}  // namespace

double check_three_point(cplx w, cplx tj, cplx tk, cplx lambda, const ModularParam& tau) {
    const cplx lhs = s_func(w - tk, lambda, tau) *
                     (rho(w - tj, tau) + rho(tj - tk, tau) - rho(w - tk - lambda, tau) -
                      rho(lambda, tau));
    const cplx rhs = s_func(w - tj, lambda, tau) * s_func(tj - tk, lambda, tau);
    return rel(lhs, rhs);
}

double check_weighted_sum(cplx w, std::span<const cplx> t, std::span<const cplx> c, int j,
                          cplx lambda, const ModularParam& tau) {
    if (t.size() != c.size() || j < 0 || j >= static_cast<int>(t.size())) {
        throw std::invalid_argument("weighted sum needs matching t, c and a valid j");
    }
    if (std::abs(std::accumulate(c.begin(), c.end(), cplx(0.0))) > 1e-12) {
        throw std::invalid_argument("weighted sum needs sum c = 0");
    }
    cplx bracket = c[j] * (rho(w - t[j] - lambda, tau) + rho(lambda, tau));
    cplx rhs = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (static_cast<int>(k) == j) continue;
        bracket += c[k] * (rho(w - t[k], tau) + rho(t[k] - t[j], tau));
        rhs += c[k] * s_func(t[k] - t[j], lambda, tau) * s_func(w - t[k], lambda, tau);
    }
    return rel(s_func(w - t[j], lambda, tau) * bracket, rhs);
}

double check_rho_period(cplx u, const ModularParam& tau) {
    const cplx r = rho(u, tau);
    return std::max(rel(rho(u + 1.0, tau), r), rel(rho(u + tau.tau(), tau), r - 2.0 * kPi * kI));
}

double check_s_reflection(cplx u, cplx lambda, const ModularParam& tau) {
    return rel(s_func(-u, lambda, tau), -s_func(u, -lambda, tau));
}

cplx contour_derivative(const std::function<cplx(cplx)>& f, cplx z, double radius, int nodes) {
    cplx sum = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const cplx e = std::polar(1.0, 2.0 * kPi * k / nodes);
        sum += f(z + radius * e) / e;
    }
    return sum / (static_cast<double>(nodes) * radius);
}

double check_s_derivatives(cplx u, cplx lambda, const ModularParam& tau) {
    const double ru =
        std::min(kernel::lattice_distance(u, tau), kernel::lattice_distance(u - lambda, tau)) / 4.0;
    const double rl =
        std::min(kernel::lattice_distance(lambda, tau), kernel::lattice_distance(u - lambda, tau)) /
        4.0;
    const cplx s = s_func(u, lambda, tau);
    const cplx du = contour_derivative([&](cplx z) { return s_func(z, lambda, tau); }, u, ru);
    const cplx dl = contour_derivative([&](cplx z) { return s_func(u, z, tau); }, lambda, rl);
    return std::max(rel(du, (rho(u - lambda, tau) - rho(u, tau)) * s),
                    rel(dl, -(rho(u - lambda, tau) + rho(lambda, tau)) * s));
}

double check_half_period_values(const ModularParam& tau) {
    const auto w = half_periods(tau);
    const auto varpi = half_period_rho();
    double worst = 0.0;
    for (int m = 1; m < 4; ++m) worst = std::max(worst, rel(rho(w[m], tau), varpi[m]));
    return worst;
}

double check_rho_mirror(int m, cplx t, const ModularParam& tau) {
    if (m < 2 || m > 4) throw std::out_of_range("mirror relation holds for m = 2, 3, 4");
    const cplx w = half_periods(tau)[m - 1];
    return rel(rho(w + t, tau) + rho(w - t, tau), 2.0 * half_period_rho()[m - 1]);
}

double check_trisecant(cplx u, cplx s, cplx t, cplx lambda1, cplx lambda2,
                       const ModularParam& tau) {
    const cplx lhs = s_func(t - u, lambda1 + lambda2, tau) * s_func(s - t, lambda2, tau) -
                     s_func(s - u, lambda2, tau) * s_func(t - u, lambda1, tau);
    const cplx rhs = -s_func(t - s, lambda1, tau) * s_func(s - u, lambda1 + lambda2, tau);
    return rel(lhs, rhs);
}

double check_psi_point_mixed(int sign, cplx u1, cplx u2, int p, int j, const ProblemConfig& cfg) {
    const auto& tau = cfg.tau;
    const auto [l1, l2] = derive_lambda(cfg);
    const double sg = sign > 0 ? 1.0 : -1.0;
    const cplx tp = cfg.t1.at(p - 1);
    const cplx tj = cfg.t2.at(j - 1);
    const cplx mixed = l2 - sg * l1;
    const cplx lhs =
        s_func(-sg * tp - tj, mixed, tau) * s_func(u2 + sg * tp, mixed, tau) *
            s_func(u1 + sg * u2, l1, tau) -
        s_func(u1 - tp, l1, tau) * s_func(u2 + sg * tp, sg * l1, tau) * s_func(u2 - tj, mixed, tau);
    const cplx rhs =
        -s_func(tj + sg * tp, sg * l1, tau) * s_func(u1 - tp, l1, tau) * s_func(u2 - tj, l2, tau) -
        sg * s_func(-sg * tp - tj, mixed, tau) * s_func(u1 - tp, l1 - sg * l2, tau) *
            s_func(u1 + sg * u2, sg * l2, tau);
    return rel(lhs, rhs);
}

double check_psi_corner(int m, cplx u1, cplx u2, int p, const ProblemConfig& cfg) {
    if (m < 1 || m > 4) throw std::out_of_range("corner index must be 1..4");
    const auto& tau = cfg.tau;
    const auto [l1, l2] = derive_lambda(cfg);
    const auto w = half_periods(tau);
    const auto varpi = half_period_rho();
    const cplx wm = w[m - 1];
    const cplx t = cfg.t1.at(p - 1);
    const cplx a = (l1 + l2 + 2.0 * wm) / 2.0;
    const cplx b = (l1 - l2 + 2.0 * wm) / 2.0;
    const bool twisted = m >= 3;

    cplx lhs = -s_func(u1 - wm, a, tau) * s_func(wm + u2, a, tau) * s_func(u1 - u2, b, tau) -
               s_func(u1 - wm, b, tau) * s_func(wm - u2, b, tau) * s_func(u1 + u2, a, tau) +
               2.0 * (rho(u1 - wm, tau) + varpi[m - 1] - rho(u1 - t, tau)) * s_func(u1 + u2, a, tau) *
                   s_func(u1 - u2, b, tau);
    if (twisted) lhs *= std::exp(-2.0 * kPi * kI * u1);

    const forms::FormEvaluator ev(cfg);
    const auto M = forms::residue_matrix(l1, l2).entries;
    const cplx e = twisted ? std::exp(-2.0 * kPi * kI * t) : cplx(1.0);
    cplx rhs = -2.0 * e * s_func(2.0 * t, b, tau) * ev.row_pm(p, +1, u1, u2) +
               2.0 * e * s_func(2.0 * t, a, tau) * ev.row_pm(p, -1, u1, u2);
    for (int k = 0; k < 4; ++k) {
        rhs -= (rho(t - w[k], tau) + varpi[k]) * M(k, m - 1) * ev.corner(k + 1, u1, u2);
    }
    return rel(lhs, rhs);
}

double check_psi_point(cplx u1, cplx u2, int p, int j, const ProblemConfig& cfg) {
    const auto& tau = cfg.tau;
    const auto [l1, l2] = derive_lambda(cfg);
    const cplx tp = cfg.t1.at(p - 1);
    const cplx tj = cfg.t2.at(j - 1);
    const cplx lhs = (s_func(u2 - tp, l1, tau) * s_func(u1 - u2, l1, tau) +
                      s_func(-u2 - tp, l1, tau) * s_func(u1 + u2, l1, tau) -
                      (rho(u2 - tp, tau) + rho(-u2 - tp, tau)) * s_func(u1 - tp, l1, tau)) *
                     s_func(u2 - tj, l2, tau);
    const cplx rhs =
        (rho(tp - tj, tau) + rho(tp + tj, tau)) * s_func(u1 - tp, l1, tau) * s_func(u2 - tj, l2, tau) +
        s_func(-tj - tp, l1, tau) * s_func(u1 + u2, l1, tau) * s_func(u2 - tj, l2 - l1, tau) +
        s_func(tj - tp, l1, tau) * s_func(u1 - u2, l1, tau) * s_func(u2 - tj, l2 + l1, tau) +
        s_func(-tp - tj, l2, tau) * s_func(u1 - tp, l1 - l2, tau) * s_func(u1 + u2, l2, tau) +
        s_func(tp - tj, l2, tau) * s_func(u1 - tp, l1 + l2, tau) * s_func(u1 - u2, -l2, tau);
    return rel(lhs, rhs);
}

double check_psi_row(int sign, cplx u1, cplx u2, int p, const ProblemConfig& cfg) {
    const auto& tau = cfg.tau;
    const auto [l1, l2] = derive_lambda(cfg);
    const double sg = sign > 0 ? 1.0 : -1.0;
    const int s = sign > 0 ? 1 : -1;
    const cplx tp = cfg.t1.at(p - 1);
    const cplx c = cfg.c;
    const cplx L = l1 - sg * l2;
    const cplx a = s > 0 ? std::exp(2.0 * kPi * kI * l2) : std::exp(2.0 * kPi * kI * (l1 + l2));
    const forms::FormEvaluator ev(cfg);

    cplx weight = -sg * 2.0 * c * rho(sg * u2 - tp, tau);
    cplx rhs = 2.0 * c * rho(2.0 * tp, tau) * ev.row_pm(p, s, u1, u2);
    for (int j = 1; j <= cfg.n2(); ++j) {
        const cplx cj = cfg.c2[j - 1];
        const cplx tj = cfg.t2[j - 1];
        weight -= cj * rho(u2 - tj, tau);
        rhs -= cj * s_func(tp + sg * tj, sg * l2, tau) * ev.point(p, j, u1, u2) +
               cj * s_func(-sg * tj - tp, L, tau) * ev.col_pm(s, j, u1, u2);
        rhs += cj * rho(tp + sg * tj, tau) * ev.row_pm(p, s, u1, u2);
    }
    const cplx lhs = (weight * s_func(u1 - tp, L, tau) +
                      sg * 2.0 * c * s_func(u1 - sg * u2, L, tau) * s_func(sg * u2 - tp, L, tau)) *
                     s_func(u1 + sg * u2, sg * l2, tau);

    const cplx tv = tau.tau();
    rhs -= 2.0 * c * s_func(2.0 * tp, sg * l2, tau) * ev.row_pm(p, -s, u1, u2);
    rhs -= sg * c * s_func(-tp, L, tau) * ev.corner(1, u1, u2);
    rhs -= sg * c * s_func(sg * 0.5 - tp, L, tau) * ev.corner(2, u1, u2);
    rhs -= sg * a * c * s_func(sg * tv / 2.0 - tp, L, tau) * ev.corner(3, u1, u2);
    rhs -= sg * a * c * s_func(sg * (1.0 + tv) / 2.0 - tp, L, tau) * ev.corner(4, u1, u2);
    return rel(lhs, rhs);
}

double check_corner_quarter_periods(cplx t, cplx lambda, const ModularParam& tau) {
    const auto w = half_periods(tau);
    const cplx e = std::exp(-2.0 * kPi * kI * t);
    Eigen::RowVector4cd v;
    v << 2.0 * s_func(2.0 * t, lambda / 2.0, tau),
        2.0 * s_func(2.0 * t, (lambda + 1.0) / 2.0, tau),
        2.0 * e * s_func(2.0 * t, (lambda + tau.tau()) / 2.0, tau),
        2.0 * e * s_func(2.0 * t, (lambda + 1.0 + tau.tau()) / 2.0, tau);
    const Eigen::RowVector4cd out = v * forms::residue_matrix(lambda, 0.0).inverse();
    double worst = 0.0;
    for (int m = 0; m < 4; ++m) worst = std::max(worst, rel(out(m), s_func(t - w[m], lambda, tau)));
    return worst;
}

namespace {

struct PeriodShift {
    int variable;  // 1 or 2
    bool tau_shift;
};

PeriodShift period_shift(int relation) {
    switch (relation) {
        case 0: return {1, false};
        case 1: return {1, true};
        case 2: return {2, false};
        case 3: return {2, true};
        default: throw std::out_of_range("period relation must be 0..3");
    }
}

}  // namespace

bool T_period_admissible(int relation, cplx u1, cplx u2, const ProblemConfig& cfg, double margin) {
    const auto shift = period_shift(relation);
    const auto& tau = cfg.tau;
    std::vector<cplx> moving{u1 - u2, u1 + u2};
    std::vector<cplx> fixed;
    for (const cplx t : cfg.t1) (shift.variable == 1 ? moving : fixed).push_back(u1 - t);
    for (const cplx t : cfg.t2) (shift.variable == 2 ? moving : fixed).push_back(u2 - t);
    for (const cplx z : moving) {
        const auto [x, y] = coordinates(z, tau);
        const double coord = shift.tau_shift ? x : y;
        if (!(coord > -1.0 + margin && coord < -margin)) return false;
    }
    for (const cplx z : fixed) {
        if (kernel::lattice_distance(z, tau) < margin) return false;
    }
    return true;
}

double check_T_period(int relation, cplx u1, cplx u2, const ProblemConfig& cfg) {
    const auto shift = period_shift(relation);
    const auto [l1, l2] = derive_lambda(cfg);
    const cplx step = shift.tau_shift ? cfg.tau.tau() : cplx(1.0);
    integrator::BranchState state(cfg, u1, u2);
    const cplx before = state.log_T();
    if (shift.variable == 1) {
        state.transport(u1 + step, u2);
    } else {
        state.transport(u1, u2 + step);
    }
    cplx log_ratio = state.log_T() - before;
    cplx multiplier;
    const cplx two_pi_i = 2.0 * kPi * kI;
    switch (relation) {
        case 0: multiplier = std::exp(two_pi_i * cfg.c10); break;
        case 1:
            multiplier = std::exp(-two_pi_i * cfg.c1_inf);
            log_ratio += two_pi_i * l1;
            break;
        case 2: multiplier = std::exp(two_pi_i * (cfg.c20 - cfg.c)); break;
        default:
            multiplier = std::exp(-two_pi_i * (cfg.c2_inf - cfg.c));
            log_ratio += two_pi_i * l2;
            break;
    }
    return std::abs(std::exp(log_ratio) / multiplier - 1.0);
}

// ---------------------------------------------------------------------------
// Suite driver.

namespace {

using Rng = std::mt19937_64;
using Evaluation = std::function<double()>;
using Sampler = std::function<Evaluation(Rng&)>;

struct Check {
    std::string id;
    Sampler sample;
};

constexpr int kMaxDraws = 100000;

class Draws {
public:
    Draws(Rng& rng, const ModularParam& tau, double margin) : rng_(rng), tau_(tau), margin_(margin) {}

    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    int index(int n) { return std::uniform_int_distribution<int>(1, n)(rng_); }
    cplx cell() { return unit() + unit() * tau_.tau(); }
    cplx wide(double half) {
        return half * (2.0 * unit() - 1.0) + half * (2.0 * unit() - 1.0) * tau_.tau();
    }
    cplx box(double half) { return cplx(half * (2.0 * unit() - 1.0), half * (2.0 * unit() - 1.0)); }

    bool clear(std::initializer_list<cplx> args) const { return clear(std::vector<cplx>(args)); }
    bool clear(const std::vector<cplx>& args) const {
        return std::all_of(args.begin(), args.end(), [&](cplx z) {
            return kernel::lattice_distance(z, tau_) >= margin_;
        });
    }

    double margin() const { return margin_; }

private:
    Rng& rng_;
    const ModularParam& tau_;
    double margin_;
};

[[noreturn]] void exhausted(const std::string& id) {
    throw std::runtime_error("could not draw an admissible sample for " + id);
}

/// Arguments that must stay off the lattice for every basis-form relation at (u1, u2).
std::vector<cplx> form_arguments(cplx u1, cplx u2, const ProblemConfig& cfg) {
    std::vector<cplx> args{u1, u2, u1 + u2, u1 - u2};
    for (const cplx w : half_periods(cfg.tau)) {
        args.push_back(u1 - w);
        args.push_back(u2 - w);
        args.push_back(u2 + w);
    }
    for (const cplx t : cfg.t1) {
        args.push_back(u1 - t);
        args.push_back(u2 - t);
        args.push_back(u2 + t);
    }
    for (const cplx t : cfg.t2) args.push_back(u2 - t);
    return args;
}

std::vector<Check> build_checks(const ProblemConfig& cfg, double margin) {
    const ModularParam tau = cfg.tau;
    const auto w = half_periods(tau);
    std::vector<Check> checks;
    const auto add = [&](std::string id, Sampler s) { checks.push_back({std::move(id), std::move(s)}); };

    add("s-three-point", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const cplx wp = d.cell(), tj = d.cell(), tk = d.cell(), l = d.cell();
            if (d.clear({wp - tk, wp - tj, tj - tk, wp - tk - l, l})) {
                return [=] { return check_three_point(wp, tj, tk, l, tau); };
            }
        }
        exhausted("s-three-point");
    });

    add("s-weighted-sum", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            std::vector<cplx> t(4), c(4);
            for (auto& x : t) x = d.cell();
            cplx sum = 0.0;
            for (int i = 0; i < 3; ++i) sum += (c[i] = d.box(1.0));
            c[3] = -sum;
            const int j = d.index(4) - 1;
            const cplx wp = d.cell(), l = d.cell();
            std::vector<cplx> args{wp - t[j] - l, l};
            for (int a = 0; a < 4; ++a) {
                args.push_back(wp - t[a]);
                for (int b = a + 1; b < 4; ++b) args.push_back(t[a] - t[b]);
            }
            if (d.clear(args)) {
                return [=] { return check_weighted_sum(wp, t, c, j, l, tau); };
            }
        }
        exhausted("s-weighted-sum");
    });

    add("rho-period", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const cplx u = d.wide(1.5);
            if (d.clear({u})) return [=] { return check_rho_period(u, tau); };
        }
        exhausted("rho-period");
    });

    add("s-reflection", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const cplx u = d.wide(1.5), l = d.cell();
            if (d.clear({u, l, u - l, u + l})) return [=] { return check_s_reflection(u, l, tau); };
        }
        exhausted("s-reflection");
    });

    add("s-derivatives", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const cplx u = d.cell(), l = d.cell();
            if (d.clear({u, l, u - l})) return [=] { return check_s_derivatives(u, l, tau); };
        }
        exhausted("s-derivatives");
    });

    add("rho-half-periods", [=](Rng&) -> Evaluation {
        return [=] { return check_half_period_values(tau); };
    });

    add("rho-mirror", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const int m = 1 + d.index(3);
            const cplx t = d.wide(1.0);
            if (d.clear({w[m - 1] + t, w[m - 1] - t})) return [=] { return check_rho_mirror(m, t, tau); };
        }
        exhausted("rho-mirror");
    });

    add("s-trisecant", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const cplx u = d.cell(), s = d.cell(), t = d.cell(), l1 = d.cell(), l2 = d.cell();
            if (d.clear({t - u, s - t, s - u, l1, l2, l1 + l2})) {
                return [=] { return check_trisecant(u, s, t, l1, l2, tau); };
            }
        }
        exhausted("s-trisecant");
    });

    // Relations among the basis forms of cfg.
    const auto form_sampler = [=](std::string id, auto body) -> Sampler {
        return [=](Rng& rng) -> Evaluation {
            Draws d(rng, tau, margin);
            for (int k = 0; k < kMaxDraws; ++k) {
                const cplx u1 = d.cell(), u2 = d.cell();
                const int p = d.index(cfg.n1());
                const int j = d.index(cfg.n2());
                if (d.clear(form_arguments(u1, u2, cfg))) {
                    return [=] { return body(u1, u2, p, j); };
                }
            }
            exhausted(id);
        };
    };
    for (int sign : {+1, -1}) {
        const std::string tag = sign > 0 ? "+" : "-";
        add("psi-point-mixed" + tag,
            form_sampler("psi-point-mixed" + tag, [=](cplx u1, cplx u2, int p, int j) {
                return check_psi_point_mixed(sign, u1, u2, p, j, cfg);
            }));
        add("psi-row" + tag, form_sampler("psi-row" + tag, [=](cplx u1, cplx u2, int p, int) {
                return check_psi_row(sign, u1, u2, p, cfg);
            }));
    }
    for (int m = 1; m <= 4; ++m) {
        const std::string id = "psi-corner-" + std::to_string(m);
        add(id, form_sampler(id, [=](cplx u1, cplx u2, int p, int) {
                return check_psi_corner(m, u1, u2, p, cfg);
            }));
    }
    add("psi-point", form_sampler("psi-point", [=](cplx u1, cplx u2, int p, int j) {
            return check_psi_point(u1, u2, p, j, cfg);
        }));

    add("corner-quarter-periods", [=](Rng& rng) -> Evaluation {
        Draws d(rng, tau, margin);
        for (int k = 0; k < kMaxDraws; ++k) {
            const cplx t = d.cell(), l = d.cell();
            std::vector<cplx> args{2.0 * t, l};
            for (const cplx wm : w) {
                args.push_back(t - wm);
                args.push_back((l + 2.0 * wm) / 2.0);
            }
            if (d.clear(args)) return [=] { return check_corner_quarter_periods(t, l, tau); };
        }
        exhausted("corner-quarter-periods");
    });

    const char* period_ids[] = {"T-period-u1+1", "T-period-u1+tau", "T-period-u2+1",
                                "T-period-u2+tau"};
    for (int relation = 0; relation < 4; ++relation) {
        const std::string id = period_ids[relation];
        add(id, [=](Rng& rng) -> Evaluation {
            Draws d(rng, tau, margin);
            for (int k = 0; k < kMaxDraws; ++k) {
                const cplx u1 = d.wide(1.5), u2 = d.wide(1.5);
                if (T_period_admissible(relation, u1, u2, cfg, std::max(margin, 1e-2))) {
                    return [=] { return check_T_period(relation, u1, u2, cfg); };
                }
            }
            exhausted(id);
        });
    }

    std::sort(checks.begin(), checks.end(), [](const Check& a, const Check& b) { return a.id < b.id; });
    return checks;
}

}  // namespace

std::vector<std::string> check_ids() {
    std::mt19937_64 rng(1);
    const auto cfg = random_config(1, 1, rng);
    std::vector<std::string> ids;
    for (const auto& c : build_checks(cfg, 1e-3)) ids.push_back(c.id);
    return ids;
}

std::vector<CheckResult> run_suite(const ProblemConfig& cfg, const SuiteOptions& options) {
    if (options.samples < 1) throw std::invalid_argument("samples must be positive");
    const auto checks = build_checks(cfg, options.margin);
    std::vector<CheckResult> results;
    results.reserve(checks.size());

    for (std::size_t index = 0; index < checks.size(); ++index) {
        const auto& check = checks[index];
        // One stream per check, so adding a check leaves the others' samples unchanged.
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                          static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(std::hash<std::string>{}(check.id))};
        Rng rng(seq);
        std::vector<Evaluation> evaluations;
        evaluations.reserve(options.samples);
        for (int k = 0; k < options.samples; ++k) evaluations.push_back(check.sample(rng));

        const int n = options.samples;
        std::vector<double> residual(n, 0.0);
        std::vector<std::string> failure(n);
        const bool parallel = options.execution == Execution::kParallel;
#pragma omp parallel for schedule(dynamic) if (parallel)
        for (int k = 0; k < n; ++k) {
            try {
                residual[k] = evaluations[k]();
            } catch (const std::exception& e) {
                residual[k] = std::numeric_limits<double>::infinity();
                failure[k] = e.what();
            }
        }

        CheckResult r;
        r.id = check.id;
        r.samples = n;
        r.tolerance = options.tol;
        for (int k = 0; k < n; ++k) {
            if (std::isnan(residual[k])) residual[k] = std::numeric_limits<double>::infinity();
            r.max_residual = std::max(r.max_residual, residual[k]);
            if (r.detail.empty() && !failure[k].empty()) r.detail = failure[k];
        }
        r.pass = r.max_residual < options.tol;
        results.push_back(std::move(r));
    }
    return results;
}

}  // namespace rw::identities
