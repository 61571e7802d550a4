#include "rw/connection.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rw/elliptic_kernel.hpp"
#include "rw/errors.hpp"

namespace rw::connection {
namespace {

// Every rho and s term of the connection goes through here so a collision is reported
// with the name of the term that produced it.
class Terms {
public:
    explicit Terms(const ModularParam& tau) : tau_(tau) {}

    cplx rho(cplx arg, const char* term) const {
        try {
            return kernel::rho(arg, tau_);
        } catch (const NearSingular& e) {
            throw NearSingular(std::string("connection term ") + term + ": " + e.what(), term);
        }
    }

    cplx s(cplx arg, cplx lambda, const char* term) const {
        try {
            return kernel::s_func(arg, lambda, tau_);
        } catch (const NearSingular& e) {
            throw NearSingular(std::string("connection term ") + term + ": " + e.what(), term);
        }
    }

private:
    ModularParam tau_;
};

class Builder {
public:
    explicit Builder(const ProblemConfig& cfg)
        : n1_(cfg.n1()), n2_(cfg.n2()),
          a_(Eigen::MatrixXcd::Zero((n1_ + 2) * (n2_ + 2), (n1_ + 2) * (n2_ + 2))) {}

    void add(const BasisIndex& row, const BasisIndex& col, cplx v) {
        a_(basis_position(row, n1_, n2_), basis_position(col, n1_, n2_)) += v;
    }

    Eigen::MatrixXcd finish(const char* which) {
        for (Eigen::Index r = 0; r < a_.rows(); ++r) {
            for (Eigen::Index c = 0; c < a_.cols(); ++c) {
                if (!std::isfinite(a_(r, c).real()) || !std::isfinite(a_(r, c).imag())) {
                    std::ostringstream msg;
                    msg << which << " has a non-finite entry at (" << r << ", " << c << ")";
                    throw NearSingular(msg.str(), which);
                }
            }
        }
        return std::move(a_);
    }

private:
    int n1_;
    int n2_;
    Eigen::MatrixXcd a_;
};

using BI = BasisIndex;

void check_direction(int k, int p, const ProblemConfig& cfg) {
    const int n = (k == 1) ? cfg.n1() : cfg.n2();
    if (p < 1 || p > n) {
        std::ostringstream msg;
        msg << "derivative index " << p << " out of range 1.." << n;
        throw std::out_of_range(msg.str());
    }
}

}  // namespace

std::string Derivative::label() const {
    return "d" + std::to_string(k) + "_" + std::to_string(p);
}

std::vector<Derivative> derivatives(const ProblemConfig& cfg) {
    std::vector<Derivative> out;
    for (int p = 1; p <= cfg.n1(); ++p) out.push_back({1, p});
    for (int q = 1; q <= cfg.n2(); ++q) out.push_back({2, q});
    return out;
}

ConnectionMatrix assemble_A1p(int p, const ProblemConfig& cfg, RowConvention convention) {
    check_direction(1, p, cfg);
    const Terms T(cfg.tau);
    Builder A(cfg);
    const int n1 = cfg.n1();
    const int n2 = cfg.n2();
    const auto [l1, l2] = derive_lambda(cfg);
    const auto w = half_periods(cfg.tau);
    const auto varpi = half_period_rho();
    const cplx tau = cfg.tau.tau();
    const cplx c = cfg.c;
    const cplx cp = cfg.c1[p - 1];
    const cplx tp = cfg.t1[p - 1];
    const auto t1 = [&](int i) { return cfg.t1[i - 1]; };
    const auto t2 = [&](int j) { return cfg.t2[j - 1]; };
    const auto c1 = [&](int i) { return cfg.c1[i - 1]; };
    const auto c2 = [&](int j) { return cfg.c2[j - 1]; };
    const auto a_pm = [&](int s) {
        return s > 0 ? std::exp(2.0 * kPi * kI * l2) : std::exp(2.0 * kPi * kI * (l1 + l2));
    };

    // Rows (i,j), (i,+-) with i != p.
    for (int i = 1; i <= n1; ++i) {
        if (i == p) continue;
        for (int j = 1; j <= n2; ++j) {
            A.add(BI::point(i, j), BI::point(i, j), cp * T.rho(tp - t1(i), "rho(t1p-t1i)"));
            A.add(BI::point(i, j), BI::point(p, j), -cp * T.s(tp - t1(i), l1, "s(t1p-t1i;l1)"));
        }
        for (int s : {+1, -1}) {
            A.add(BI::row_pm(i, s), BI::row_pm(i, s), cp * T.rho(tp - t1(i), "rho(t1p-t1i)"));
            A.add(BI::row_pm(i, s), BI::row_pm(p, s),
                  -cp * T.s(tp - t1(i), l1 - double(s) * l2, "s(t1p-t1i;l1-+l2)"));
        }
    }

    // Rows (+-,j).
    for (int j = 1; j <= n2; ++j) {
        for (int s : {+1, -1}) {
            const double sd = s;
            A.add(BI::col_pm(s, j), BI::col_pm(s, j),
                  cp * T.rho(tp + sd * t2(j), "rho(t1p+-t2j)"));
            A.add(BI::col_pm(s, j), BI::point(p, j),
                  -sd * cp * T.s(t2(j) + sd * tp, sd * l1, "s(t2j+-t1p;+-l1)"));
            A.add(BI::col_pm(s, j), BI::row_pm(p, s),
                  -sd * cp * T.s(-sd * tp - t2(j), l2 - sd * l1, "s(-+t1p-t2j;l2-+l1)"));
        }
    }

    // Corner rows.
    for (int m = 1; m <= 4; ++m) {
        const bool shifted = m >= 3;
        const cplx coupling = (shifted && convention == RowConvention::kCorrected)
                                  ? std::exp(-2.0 * kPi * kI * l2)
                                  : cplx(1.0);
        const cplx diag_shift = convention == RowConvention::kAsPrinted ? varpi[m - 1] : cplx(0.0);
        A.add(BI::corner(m), BI::row_pm(p, +1),
              cp * coupling * T.s(tp - w[m - 1], l1 - l2, "s(t1p-w_m;l1-l2)"));
        A.add(BI::corner(m), BI::row_pm(p, -1), -cp * T.s(tp - w[m - 1], l1 + l2, "s(t1p-w_m;l1+l2)"));
        A.add(BI::corner(m), BI::corner(m), cp * (T.rho(tp - w[m - 1], "rho(t1p-w_m)") + diag_shift));
    }

    // Rows (p,j).
    for (int j = 1; j <= n2; ++j) {
        const BI row = BI::point(p, j);
        cplx diag = 2.0 * kPi * kI * cfg.c10 +
                    c * (T.rho(tp - t2(j), "rho(t1p-t2j)") + T.rho(tp + t2(j), "rho(t1p+t2j)"));
        for (int i = 1; i <= n1; ++i) {
            if (i == p) continue;
            diag += c1(i) * T.rho(tp - t1(i), "rho(t1p-t1i)");
            A.add(row, BI::point(i, j), c1(i) * T.s(t1(i) - tp, l1, "s(t1i-t1p;l1)"));
        }
        A.add(row, row, diag);
        A.add(row, BI::col_pm(+1, j), c * T.s(-t2(j) - tp, l1, "s(-t2j-t1p;l1)"));
        A.add(row, BI::col_pm(-1, j), c * T.s(t2(j) - tp, l1, "s(t2j-t1p;l1)"));
        A.add(row, BI::row_pm(p, +1), c * T.s(-tp - t2(j), l2, "s(-t1p-t2j;l2)"));
        A.add(row, BI::row_pm(p, -1), -c * T.s(tp - t2(j), l2, "s(t1p-t2j;l2)"));
    }

    // Rows (p,+-).
    for (int s : {+1, -1}) {
        const double sd = s;
        const BI row = BI::row_pm(p, s);
        const cplx L = l1 - sd * l2;
        cplx diag = 2.0 * kPi * kI * (cfg.c10 - sd * cfg.c20) + 2.0 * c * T.rho(2.0 * tp, "rho(2t1p)");
        for (int i = 1; i <= n1; ++i) {
            if (i == p) continue;
            diag -= c1(i) * T.rho(t1(i) - tp, "rho(t1i-t1p)");
            A.add(row, BI::row_pm(i, s), c1(i) * T.s(t1(i) - tp, L, "s(t1i-t1p;l1-+l2)"));
        }
        for (int j = 1; j <= n2; ++j) {
            diag += c2(j) * T.rho(tp + sd * t2(j), "rho(t1p+-t2j)");
            A.add(row, BI::point(p, j), -c2(j) * T.s(tp + sd * t2(j), sd * l2, "s(t1p+-t2j;+-l2)"));
            A.add(row, BI::col_pm(s, j), -c2(j) * T.s(-sd * t2(j) - tp, L, "s(-+t2j-t1p;l1-+l2)"));
        }
        A.add(row, row, diag);
        A.add(row, BI::row_pm(p, -s), -2.0 * c * T.s(2.0 * tp, sd * l2, "s(2t1p;+-l2)"));
        A.add(row, BI::corner(1), -sd * c * T.s(-tp, L, "s(-t1p;l1-+l2)"));
        A.add(row, BI::corner(2), -sd * c * T.s(sd * 0.5 - tp, L, "s(+-1/2-t1p;l1-+l2)"));
        A.add(row, BI::corner(3),
              -sd * a_pm(s) * c * T.s(sd * tau / 2.0 - tp, L, "s(+-tau/2-t1p;l1-+l2)"));
        A.add(row, BI::corner(4),
              -sd * a_pm(s) * c * T.s(sd * (1.0 + tau) / 2.0 - tp, L, "s(+-(1+tau)/2-t1p;l1-+l2)"));
    }

    return {{1, p}, A.finish("A_1p"), psi_index_set(cfg), cfg};
}

ConnectionMatrix assemble_A2q(int q, const ProblemConfig& cfg, RowConvention convention) {
    check_direction(2, q, cfg);
    const Terms T(cfg.tau);
    Builder A(cfg);
    const int n1 = cfg.n1();
    const int n2 = cfg.n2();
    const auto [l1, l2] = derive_lambda(cfg);
    const auto w = half_periods(cfg.tau);
    const auto varpi = half_period_rho();
    const cplx tau = cfg.tau.tau();
    const cplx c = cfg.c;
    const cplx cq = cfg.c2[q - 1];
    const cplx tq = cfg.t2[q - 1];
    const auto t1 = [&](int i) { return cfg.t1[i - 1]; };
    const auto t2 = [&](int j) { return cfg.t2[j - 1]; };
    const auto c1 = [&](int i) { return cfg.c1[i - 1]; };
    const auto c2 = [&](int j) { return cfg.c2[j - 1]; };
    const auto b_pm = [&](int s) {
        return s > 0 ? std::exp(2.0 * kPi * kI * l1) : std::exp(2.0 * kPi * kI * (l1 + l2));
    };

    // Rows (i,j), (+-,j) with j != q.
    for (int j = 1; j <= n2; ++j) {
        if (j == q) continue;
        for (int i = 1; i <= n1; ++i) {
            A.add(BI::point(i, j), BI::point(i, j), cq * T.rho(tq - t2(j), "rho(t2q-t2j)"));
            A.add(BI::point(i, j), BI::point(i, q), -cq * T.s(tq - t2(j), l2, "s(t2q-t2j;l2)"));
        }
        for (int s : {+1, -1}) {
            A.add(BI::col_pm(s, j), BI::col_pm(s, j), cq * T.rho(tq - t2(j), "rho(t2q-t2j)"));
            A.add(BI::col_pm(s, j), BI::col_pm(s, q),
                  -cq * T.s(tq - t2(j), l2 - double(s) * l1, "s(t2q-t2j;l2-+l1)"));
        }
    }

    // Rows (i,+-).
    for (int i = 1; i <= n1; ++i) {
        for (int s : {+1, -1}) {
            const double sd = s;
            A.add(BI::row_pm(i, s), BI::row_pm(i, s), cq * T.rho(tq + sd * t1(i), "rho(t2q+-t1i)"));
            A.add(BI::row_pm(i, s), BI::point(i, q),
                  -sd * cq * T.s(t1(i) + sd * tq, sd * l2, "s(t1i+-t2q;+-l2)"));
            A.add(BI::row_pm(i, s), BI::col_pm(s, q),
                  -sd * cq * T.s(-sd * tq - t1(i), l1 - sd * l2, "s(-+t2q-t1i;l1-+l2)"));
        }
    }

    // Corner rows.
    for (int m = 1; m <= 4; ++m) {
        const bool shifted = m >= 3;
        const cplx coupling = (shifted && convention == RowConvention::kCorrected)
                                  ? std::exp(-2.0 * kPi * kI * l1)
                                  : cplx(1.0);
        const cplx diag_shift = convention == RowConvention::kAsPrinted ? varpi[m - 1] : cplx(0.0);
        A.add(BI::corner(m), BI::col_pm(+1, q),
              -cq * coupling * T.s(tq - w[m - 1], l2 - l1, "s(t2q-w_m;l2-l1)"));
        A.add(BI::corner(m), BI::col_pm(-1, q), cq * T.s(tq - w[m - 1], l2 + l1, "s(t2q-w_m;l2+l1)"));
        A.add(BI::corner(m), BI::corner(m), cq * (T.rho(tq - w[m - 1], "rho(t2q-w_m)") + diag_shift));
    }

    // Rows (i,q).
    for (int i = 1; i <= n1; ++i) {
        const BI row = BI::point(i, q);
        cplx diag = 2.0 * kPi * kI * cfg.c20 +
                    c * (T.rho(tq - t1(i), "rho(t2q-t1i)") + T.rho(tq + t1(i), "rho(t2q+t1i)"));
        for (int j = 1; j <= n2; ++j) {
            if (j == q) continue;
            diag += c2(j) * T.rho(tq - t2(j), "rho(t2q-t2j)");
            A.add(row, BI::point(i, j), c2(j) * T.s(t2(j) - tq, l2, "s(t2j-t2q;l2)"));
        }
        A.add(row, row, diag);
        A.add(row, BI::row_pm(i, +1), c * T.s(-t1(i) - tq, l2, "s(-t1i-t2q;l2)"));
        A.add(row, BI::row_pm(i, -1), c * T.s(t1(i) - tq, l2, "s(t1i-t2q;l2)"));
        A.add(row, BI::col_pm(+1, q), c * T.s(-tq - t1(i), l1, "s(-t2q-t1i;l1)"));
        A.add(row, BI::col_pm(-1, q), -c * T.s(tq - t1(i), l1, "s(t2q-t1i;l1)"));
    }

    // Rows (+-,q).
    for (int s : {+1, -1}) {
        const double sd = s;
        const BI row = BI::col_pm(s, q);
        const cplx L = l2 - sd * l1;
        cplx diag = 2.0 * kPi * kI * (-sd * cfg.c10 + cfg.c20) + 2.0 * c * T.rho(2.0 * tq, "rho(2t2q)");
        for (int j = 1; j <= n2; ++j) {
            if (j == q) continue;
            diag -= c2(j) * T.rho(t2(j) - tq, "rho(t2j-t2q)");
            A.add(row, BI::col_pm(s, j), c2(j) * T.s(t2(j) - tq, L, "s(t2j-t2q;l2-+l1)"));
        }
        for (int i = 1; i <= n1; ++i) {
            diag += c1(i) * T.rho(tq + sd * t1(i), "rho(t2q+-t1i)");
            A.add(row, BI::point(i, q), -c1(i) * T.s(tq + sd * t1(i), sd * l1, "s(t2q+-t1i;+-l1)"));
            A.add(row, BI::row_pm(i, s), -c1(i) * T.s(-sd * t1(i) - tq, L, "s(-+t1i-t2q;l2-+l1)"));
        }
        A.add(row, row, diag);
        A.add(row, BI::col_pm(-s, q), -2.0 * c * T.s(2.0 * tq, sd * l1, "s(2t2q;+-l1)"));
        A.add(row, BI::corner(1), sd * c * T.s(-tq, L, "s(-t2q;l2-+l1)"));
        A.add(row, BI::corner(2), sd * c * T.s(sd * 0.5 - tq, L, "s(+-1/2-t2q;l2-+l1)"));
        A.add(row, BI::corner(3),
              sd * b_pm(s) * c * T.s(sd * tau / 2.0 - tq, L, "s(+-tau/2-t2q;l2-+l1)"));
        A.add(row, BI::corner(4),
              sd * b_pm(s) * c * T.s(sd * (1.0 + tau) / 2.0 - tq, L, "s(+-(1+tau)/2-t2q;l2-+l1)"));
    }

    return {{2, q}, A.finish("A_2q"), psi_index_set(cfg), cfg};
}

ConnectionMatrix assemble(Derivative d, const ProblemConfig& cfg, RowConvention convention) {
    if (d.k == 1) return assemble_A1p(d.p, cfg, convention);
    if (d.k == 2) return assemble_A2q(d.p, cfg, convention);
    throw std::invalid_argument("derivative variable must be 1 or 2");
}

std::vector<BasisIndex> pointwise_rows(Derivative d, const ProblemConfig& cfg) {
    check_direction(d.k, d.p, cfg);
    std::vector<BasisIndex> out;
    for (const auto& idx : psi_index_set(cfg)) {
        bool keep = false;
        switch (idx.kind) {
            case BasisIndex::Kind::kPoint:
                keep = d.k == 1 ? idx.i != d.p : idx.j != d.p;
                break;
            case BasisIndex::Kind::kRowPM:
                keep = d.k == 1 ? idx.i != d.p : true;
                break;
            case BasisIndex::Kind::kColPM:
                keep = d.k == 1 ? true : idx.j != d.p;
                break;
            case BasisIndex::Kind::kCorner:
                keep = true;
                break;
        }
        if (keep) out.push_back(idx);
    }
    return out;
}

StarMap star_map(int n1, int n2) {
    StarMap s;
    s.n1 = n1;
    s.n2 = n2;
    for (const auto& idx : psi_index_set(n1, n2)) {
        BasisIndex image;
        int sign = -1;
        switch (idx.kind) {
            case BasisIndex::Kind::kPoint:
                image = BasisIndex::point(idx.j, idx.i);
                break;
            case BasisIndex::Kind::kRowPM:
                image = BasisIndex::col_pm(idx.sign, idx.i);
                break;
            case BasisIndex::Kind::kColPM:
                image = BasisIndex::row_pm(idx.j, idx.sign);
                break;
            case BasisIndex::Kind::kCorner:
                image = idx;
                sign = +1;
                break;
        }
        s.target.push_back(basis_position(image, n2, n1));
        s.sign.push_back(sign);
    }
    return s;
}

Eigen::MatrixXd StarMap::matrix() const {
    const auto n = static_cast<Eigen::Index>(target.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) m(target[a], a) = sign[a];
    return m;
}

Eigen::MatrixXcd star_conjugate(const Eigen::MatrixXcd& a, const StarMap& s) {
    const Eigen::MatrixXcd S = s.matrix().cast<cplx>();
    // A signed permutation is orthogonal, so its inverse is its transpose.
    return S * a * S.transpose();
}

Eigen::MatrixXcd star_mirror_A2q(int q, const ProblemConfig& cfg, RowConvention convention) {
    const auto mirror = assemble_A1p(q, swapped(cfg), convention);
    return star_conjugate(mirror.entries, star_map(cfg.n2(), cfg.n1()));
}

cplx nabla_kp_numeric(Derivative d, const FormFunction& form, cplx u1, cplx u2,
                      const ProblemConfig& cfg, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    check_direction(d.k, d.p, cfg);
    const auto [l1, l2] = derive_lambda(cfg);

    // d/dt at fixed lambda: move the point, then restore lambda through c_{k,inf}.
    const auto along_t = [&](double dt) {
        return form(with_lambda(shift_point(cfg, d.k, d.p, dt), l1, l2), u1, u2);
    };
    const auto along_lambda = [&](double dl) {
        return d.k == 1 ? form(with_lambda(cfg, l1 + dl, l2), u1, u2)
                        : form(with_lambda(cfg, l1, l2 + dl), u1, u2);
    };
    const auto richardson = [&](const auto& f) {
        const auto central = [&](double step) { return (f(step) - f(-step)) / (2.0 * step); };
        return (4.0 * central(h / 2.0) - central(h)) / 3.0;
    };

    const cplx ckp = d.k == 1 ? cfg.c1[d.p - 1] : cfg.c2[d.p - 1];
    const cplx tkp = d.k == 1 ? cfg.t1[d.p - 1] : cfg.t2[d.p - 1];
    const cplx uk = d.k == 1 ? u1 : u2;
    return richardson(along_t) - ckp * richardson(along_lambda) -
           ckp * kernel::rho(uk - tkp, cfg.tau) * form(cfg, u1, u2);
}

double flatness_residual(const ProblemConfig& cfg, Derivative a, Derivative b, double h,
                         RowConvention convention, bool richardson) {
    if (a == b) throw std::invalid_argument("flatness needs two distinct derivatives");
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const auto derivative_of = [&](Derivative target, Derivative along) {
        const auto central = [&](double step) -> Eigen::MatrixXcd {
            const auto plus = assemble(target, shift_point(cfg, along.k, along.p, step), convention);
            const auto minus = assemble(target, shift_point(cfg, along.k, along.p, -step), convention);
            return (plus.entries - minus.entries) / (2.0 * step);
        };
        if (!richardson) return central(h);
        return Eigen::MatrixXcd((4.0 * central(h / 2.0) - central(h)) / 3.0);
    };
    const Eigen::MatrixXcd Aa = assemble(a, cfg, convention).entries;
    const Eigen::MatrixXcd Ab = assemble(b, cfg, convention).entries;
    const Eigen::MatrixXcd r =
        derivative_of(a, b) + Aa * Ab - derivative_of(b, a) - Ab * Aa;
    return r.cwiseAbs().maxCoeff();
}

}  // namespace rw::connection
