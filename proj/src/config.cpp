#include "rw/config.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rw {
namespace {

constexpr double kThreshold = kernel::kSingularDistance;

std::string show(cplx z) {
    std::ostringstream out;
    out.precision(17);
    out << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return out.str();
}

double integer_distance(cplx z) { return std::abs(z - std::round(z.real())); }

void check_exponent(std::vector<Violation>& out, const std::string& name, cplx value) {
    if (integer_distance(value) <= kThreshold) {
        out.push_back({"exponent in Z", name + " = " + show(value) + " is an integer"});
    }
}

void check_lattice(std::vector<Violation>& out, const std::string& condition, const std::string& what,
                   cplx value, const ModularParam& tau) {
    if (kernel::lattice_distance(value, tau) <= kThreshold) {
        out.push_back({condition, what + " = " + show(value) + " lies on the period lattice"});
    }
}

}  // namespace

std::pair<cplx, cplx> derive_lambda(const ProblemConfig& cfg) {
    const cplx tau = cfg.tau.tau();
    cplx l1 = -cfg.c1_inf - cfg.c10 * tau;
    cplx l2 = -cfg.c2_inf - cfg.c20 * tau;
    for (std::size_t j = 0; j < cfg.t1.size() && j < cfg.c1.size(); ++j) l1 -= cfg.c1[j] * cfg.t1[j];
    for (std::size_t j = 0; j < cfg.t2.size() && j < cfg.c2.size(); ++j) l2 -= cfg.c2[j] * cfg.t2[j];
    return {l1, l2};
}

std::vector<Violation> validate(const ProblemConfig& cfg) {
    std::vector<Violation> out;
    if (cfg.t1.empty() || cfg.t2.empty()) {
        out.push_back({"shape", "n1 and n2 must be at least 1"});
    }
    if (cfg.c1.size() != cfg.t1.size() || cfg.c2.size() != cfg.t2.size()) {
        std::ostringstream msg;
        msg << "exponent lists have sizes " << cfg.c1.size() << ", " << cfg.c2.size()
            << " but point lists have sizes " << cfg.t1.size() << ", " << cfg.t2.size();
        out.push_back({"shape", msg.str()});
        return out;
    }
    const auto& tau = cfg.tau;

    // Marked points must be distinct on E, within and across the two lists.
    struct Marked {
        std::string name;
        cplx t;
    };
    std::vector<Marked> marked;
    for (int i = 0; i < cfg.n1(); ++i) marked.push_back({"t1_" + std::to_string(i + 1), cfg.t1[i]});
    for (int j = 0; j < cfg.n2(); ++j) marked.push_back({"t2_" + std::to_string(j + 1), cfg.t2[j]});
    for (std::size_t a = 0; a < marked.size(); ++a) {
        for (std::size_t b = a + 1; b < marked.size(); ++b) {
            check_lattice(out, "distinct points", marked[a].name + " - " + marked[b].name,
                          marked[a].t - marked[b].t, tau);
        }
    }
    for (int i = 0; i < cfg.n1(); ++i) {
        for (int j = 0; j < cfg.n2(); ++j) {
            check_lattice(out, "t1 + t2 off lattice",
                          "t1_" + std::to_string(i + 1) + " + t2_" + std::to_string(j + 1),
                          cfg.t1[i] + cfg.t2[j], tau);
        }
    }

    cplx sum1 = 2.0 * cfg.c;
    cplx sum2 = 2.0 * cfg.c;
    for (auto v : cfg.c1) sum1 += v;
    for (auto v : cfg.c2) sum2 += v;
    if (std::abs(sum1) > 1e-12) {
        out.push_back({"sum condition", "2c + sum c1 = " + show(sum1)});
    }
    if (std::abs(sum2) > 1e-12) {
        out.push_back({"sum condition", "2c + sum c2 = " + show(sum2)});
    }

    check_exponent(out, "c", cfg.c);
    for (int i = 0; i < cfg.n1(); ++i) check_exponent(out, "c1_" + std::to_string(i + 1), cfg.c1[i]);
    for (int j = 0; j < cfg.n2(); ++j) check_exponent(out, "c2_" + std::to_string(j + 1), cfg.c2[j]);

    const auto [l1, l2] = derive_lambda(cfg);
    check_lattice(out, "lambda off lattice", "lambda1", l1, tau);
    check_lattice(out, "lambda off lattice", "lambda2", l2, tau);
    check_lattice(out, "lambda off lattice", "lambda1 + lambda2", l1 + l2, tau);
    check_lattice(out, "lambda off lattice", "lambda1 - lambda2", l1 - l2, tau);
    return out;
}

std::string BasisIndex::label() const {
    const auto pm = [](int s) { return s > 0 ? std::string("+") : std::string("-"); };
    switch (kind) {
        case Kind::kPoint:
            return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        case Kind::kRowPM:
            return "(" + std::to_string(i) + "," + pm(sign) + ")";
        case Kind::kColPM:
            return "(" + pm(sign) + "," + std::to_string(j) + ")";
        case Kind::kCorner:
            return "(+-," + std::to_string(m) + ")";
    }
    return "?";
}

std::vector<BasisIndex> psi_index_set(int n1, int n2) {
    std::vector<BasisIndex> out;
    out.reserve(static_cast<std::size_t>((n1 + 2) * (n2 + 2)));
    for (int i = 1; i <= n1; ++i)
        for (int j = 1; j <= n2; ++j) out.push_back(BasisIndex::point(i, j));
    for (int i = 1; i <= n1; ++i) {
        out.push_back(BasisIndex::row_pm(i, +1));
        out.push_back(BasisIndex::row_pm(i, -1));
    }
    for (int j = 1; j <= n2; ++j) {
        out.push_back(BasisIndex::col_pm(+1, j));
        out.push_back(BasisIndex::col_pm(-1, j));
    }
    for (int m = 1; m <= 4; ++m) out.push_back(BasisIndex::corner(m));
    return out;
}

std::vector<BasisIndex> psi_index_set(const ProblemConfig& cfg) {
    return psi_index_set(cfg.n1(), cfg.n2());
}

int basis_position(const BasisIndex& idx, int n1, int n2) {
    const int off = idx.sign > 0 ? 0 : 1;
    switch (idx.kind) {
        case BasisIndex::Kind::kPoint:
            return (idx.i - 1) * n2 + (idx.j - 1);
        case BasisIndex::Kind::kRowPM:
            return n1 * n2 + 2 * (idx.i - 1) + off;
        case BasisIndex::Kind::kColPM:
            return n1 * n2 + 2 * n1 + 2 * (idx.j - 1) + off;
        case BasisIndex::Kind::kCorner:
            return n1 * n2 + 2 * n1 + 2 * n2 + idx.m - 1;
    }
    throw std::logic_error("unknown basis index kind");
}

int euler_characteristic(int n1, int n2) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("n1 and n2 must be positive");
    return n1 * n2 + 2 * n1 + 2 * n2 + 4;
}

std::array<cplx, 4> half_periods(const ModularParam& tau) {
    const cplx t = tau.tau();
    return {cplx(0.0), cplx(0.5), t / 2.0, (1.0 + t) / 2.0};
}

std::array<cplx, 4> half_period_rho() {
    return {cplx(0.0), cplx(0.0), -kPi * kI, -kPi * kI};
}

ProblemConfig with_lambda(const ProblemConfig& cfg, cplx lambda1, cplx lambda2) {
    const auto [l1, l2] = derive_lambda(cfg);
    ProblemConfig out = cfg;
    out.c1_inf += l1 - lambda1;
    out.c2_inf += l2 - lambda2;
    return out;
}

ProblemConfig shift_point(const ProblemConfig& cfg, int k, int p, cplx delta) {
    ProblemConfig out = cfg;
    auto& pts = (k == 1) ? out.t1 : out.t2;
    if (k != 1 && k != 2) throw std::invalid_argument("variable index must be 1 or 2");
    if (p < 1 || p > static_cast<int>(pts.size())) throw std::out_of_range("point index out of range");
    pts[p - 1] += delta;
    return out;
}

ProblemConfig swapped(const ProblemConfig& cfg) {
    ProblemConfig out = cfg;
    std::swap(out.t1, out.t2);
    std::swap(out.c1, out.c2);
    std::swap(out.c10, out.c20);
    std::swap(out.c1_inf, out.c2_inf);
    return out;
}

namespace {

double torus_distance(cplx z, const ModularParam& tau) { return kernel::lattice_distance(z, tau); }

// Separation used for random configurations; far above the validity threshold so
// every connection entry stays well conditioned.
constexpr double kSeparation = 0.08;

bool well_separated(const ProblemConfig& cfg) {
    const auto& tau = cfg.tau;
    const auto w = half_periods(tau);
    std::vector<cplx> all = cfg.t1;
    all.insert(all.end(), cfg.t2.begin(), cfg.t2.end());
    for (std::size_t a = 0; a < all.size(); ++a) {
        for (std::size_t b = a + 1; b < all.size(); ++b) {
            if (torus_distance(all[a] - all[b], tau) < kSeparation) return false;
            if (torus_distance(all[a] + all[b], tau) < kSeparation) return false;
        }
        for (auto wm : w) {
            // Half periods: keeps 2t, t - w_m and t + w_m away from the lattice.
            if (torus_distance(all[a] - wm, tau) < kSeparation / 2) return false;
        }
    }
    return true;
}

bool exponents_ok(const ProblemConfig& cfg) {
    const auto far_from_z = [](cplx z) { return integer_distance(z) > 0.05; };
    if (!far_from_z(cfg.c)) return false;
    for (auto v : cfg.c1)
        if (!far_from_z(v)) return false;
    for (auto v : cfg.c2)
        if (!far_from_z(v)) return false;
    const auto [l1, l2] = derive_lambda(cfg);
    const cplx combos[] = {l1, l2, l1 + l2, l1 - l2};
    for (auto z : combos)
        if (torus_distance(z, cfg.tau) < 0.05) return false;
    return true;
}

}  // namespace

ProblemConfig random_config(int n1, int n2, std::mt19937_64& rng, Placement placement, cplx tau) {
    if (n1 < 1 || n2 < 1) throw std::invalid_argument("n1 and n2 must be positive");
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto cell_point = [&](double lo, double hi) {
        const double x = lo + (hi - lo) * unit(rng);
        const double y = lo + (hi - lo) * unit(rng);
        return x + y * tau;
    };
    const auto box = [&](double half) {
        return cplx(half * (2 * unit(rng) - 1), half * (2 * unit(rng) - 1));
    };

    ProblemConfig cfg;
    cfg.tau = ModularParam(tau);
    for (int attempt = 0; attempt < 100000; ++attempt) {
        cfg.t1.assign(n1, 0.0);
        cfg.t2.assign(n2, 0.0);
        for (auto& t : cfg.t1) {
            t = placement == Placement::kGeneric ? cell_point(0.0, 1.0) : cell_point(0.03, 0.2);
        }
        for (auto& t : cfg.t2) {
            t = placement == Placement::kGeneric ? cell_point(0.0, 1.0) : cell_point(0.3, 0.47);
        }
        if (placement == Placement::kGeneric ? !well_separated(cfg) : false) continue;
        if (placement == Placement::kCycleCells) {
            bool close = false;
            for (std::size_t a = 0; a < cfg.t1.size(); ++a)
                for (std::size_t b = a + 1; b < cfg.t1.size(); ++b)
                    close = close || std::abs(cfg.t1[a] - cfg.t1[b]) < 0.04;
            for (std::size_t a = 0; a < cfg.t2.size(); ++a)
                for (std::size_t b = a + 1; b < cfg.t2.size(); ++b)
                    close = close || std::abs(cfg.t2[a] - cfg.t2[b]) < 0.04;
            if (close) continue;
        }

        cfg.c = cplx(0.1 + 0.3 * unit(rng), 0.2 * unit(rng) - 0.1);
        const auto exponents = [&](int n) {
            std::vector<cplx> v(n);
            cplx sum = 0.0;
            for (int j = 0; j + 1 < n; ++j) {
                v[j] = box(0.5);
                sum += v[j];
            }
            v[n - 1] = -2.0 * cfg.c - sum;
            return v;
        };
        cfg.c1 = exponents(n1);
        cfg.c2 = exponents(n2);
        cfg.c10 = box(0.5);
        cfg.c20 = box(0.5);
        // lambda is drawn from the centred cell and c_{k,inf} solved for it, so the
        // multipliers e^{2 pi i lambda} stay of moderate size.
        const auto centred = [&]() { return (unit(rng) - 0.5) + (unit(rng) - 0.5) * tau; };
        cfg = with_lambda(cfg, centred(), centred());
        if (!exponents_ok(cfg)) continue;
        if (!validate(cfg).empty()) continue;
        return cfg;
    }
    throw std::runtime_error("could not draw a valid random configuration");
}

}  // namespace rw
