#include "rw/elliptic_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rw/errors.hpp"

namespace rw {
namespace {

struct SeriesSum {
    cplx value;
    cplx deriv;
};

// Sums -sum_n e^{pi i tau n^2 + 2 pi i n w} over half-integers n, w = v + 1/2,
// pairing n and -n. Called only at centred arguments, where |Im v| <= Im(tau)/2.
SeriesSum sum_series(cplx v, const std::vector<cplx>& nome, double tol) {
    const cplx w = v + 0.5;
    const cplx a = std::exp(kI * kPi * w);
    const cplx x = a * a;
    const cplx xinv = 1.0 / x;
    cplx plus = a;
    cplx minus = 1.0 / a;
    cplx val = 0.0;
    cplx der = 0.0;
    for (int k = 0; k < kernel::kMaxTerms; ++k) {
        const double n = k + 0.5;
        const cplx tp = nome[k] * plus;
        const cplx tm = nome[k] * minus;
        val += tp + tm;
        der += 2.0 * kPi * kI * n * (tp - tm);
        plus *= x;
        minus *= xinv;
        // Squared magnitudes avoid square roots; 2(|p|^2 + |m|^2) bounds (|p| + |m|)^2.
        const double next2 = std::norm(nome[k + 1]) * 2.0 * (std::norm(plus) + std::norm(minus));
        const double tol2 = tol * tol;
        const double grow = 2.0 * kPi * (n + 1.0);
        if (next2 < tol2 * std::max(1.0, std::norm(val)) &&
            grow * grow * next2 < tol2 * std::max(1.0, std::norm(der))) {
            return {-val, -der};
        }
    }
    std::ostringstream msg;
    msg << "theta series did not reach tolerance " << tol << " within " << kernel::kMaxTerms
        << " terms";
    throw NonConvergence(msg.str());
}

// Reduction to the centred cell [-1/2, 1/2)^2, where the series is best conditioned.
struct Centred {
    cplx v;
    long l;
    long m;
};

Centred centre(cplx u, const ModularParam& tau) {
    const auto r = kernel::lattice_reduce(u, tau);
    const double y = r.u0.imag() / tau.tau().imag();
    const double x = r.u0.real() - y * tau.tau().real();
    Centred c{r.u0, r.l, r.m};
    if (y >= 0.5) {
        c.v -= tau.tau();
        c.m += 1;
    }
    if (x >= 0.5) {
        c.v -= 1.0;
        c.l += 1;
    }
    return c;
}

double centred_distance(cplx v, cplx tau) {
    double best = std::abs(v);
    for (int a = -1; a <= 1; ++a) {
        for (int b = -1; b <= 1; ++b) {
            best = std::min(best, std::abs(v - double(a) - double(b) * tau));
        }
    }
    return best;
}

kernel::ScaledTheta theta_at(const Centred& c, const ModularParam& tau, double tol) {
    const auto s = sum_series(c.v, tau.nome_powers(), tol);
    const double m = double(c.m);
    const cplx sign = ((c.l + c.m) % 2 != 0) ? kI * kPi : cplx(0.0);
    return {sign - kI * kPi * (m * m * tau.tau() + 2.0 * m * c.v), s.value,
            s.deriv - 2.0 * kPi * kI * m * s.value};
}

void require_off_lattice(const Centred& c, const ModularParam& tau, const char* name, cplx arg) {
    if (centred_distance(c.v, tau.tau()) <= kernel::kSingularDistance) {
        std::ostringstream msg;
        msg << name << " = " << arg << " lies within " << kernel::kSingularDistance
            << " of the period lattice";
        throw NearSingular(msg.str(), name);
    }
}

cplx theta_prime_zero(const ModularParam& tau, double tol) {
    if (tol == kernel::kDefaultTol) return tau.theta1_prime_zero();
    return sum_series(0.0, tau.nome_powers(), tol).deriv;
}

}  // namespace

ModularParam::ModularParam(cplx tau) : tau_(tau) {
    if (!(tau.imag() > 0.0) || !std::isfinite(tau.real()) || !std::isfinite(tau.imag())) {
        std::ostringstream msg;
        msg << "tau = " << tau << " is not in the upper half plane";
        throw std::invalid_argument(msg.str());
    }
    auto cache = std::make_shared<Cache>();
    cache->nome_powers.resize(kernel::kMaxTerms + 1);
    for (int k = 0; k <= kernel::kMaxTerms; ++k) {
        const double n = k + 0.5;
        cache->nome_powers[k] = std::exp(kI * kPi * tau * n * n);
    }
    cache->theta_prime_zero = sum_series(0.0, cache->nome_powers, kernel::kDefaultTol).deriv;
    cache_ = std::move(cache);
}

namespace kernel {

LatticeReduction lattice_reduce(cplx u, const ModularParam& tau) {
    const cplx t = tau.tau();
    const double y = u.imag() / t.imag();
    const double x = u.real() - y * t.real();
    LatticeReduction r;
    r.m = static_cast<long>(std::floor(y));
    r.l = static_cast<long>(std::floor(x));
    r.u0 = u - double(r.l) - double(r.m) * t;
    // Rounding can leave a coefficient at exactly 1 or slightly negative.
    const double y0 = r.u0.imag() / t.imag();
    if (y0 >= 1.0) {
        r.u0 -= t;
        r.m += 1;
    } else if (y0 < 0.0) {
        r.u0 -= y0 * t;
    }
    const double x0 = r.u0.real() - (r.u0.imag() / t.imag()) * t.real();
    if (x0 >= 1.0) {
        r.u0 -= 1.0;
        r.l += 1;
    } else if (x0 < 0.0) {
        r.u0 -= x0;
    }
    return r;
}

double lattice_distance(cplx u, const ModularParam& tau) {
    return centred_distance(centre(u, tau).v, tau.tau());
}

ScaledTheta theta1_scaled(cplx u, const ModularParam& tau, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("theta tolerance must be positive");
    return theta_at(centre(u, tau), tau, tol);
}

cplx theta1(cplx u, const ModularParam& tau, double tol) {
    const auto s = theta1_scaled(u, tau, tol);
    return std::exp(s.log_scale) * s.value;
}

cplx theta1_d1(cplx u, const ModularParam& tau, double tol) {
    const auto s = theta1_scaled(u, tau, tol);
    return std::exp(s.log_scale) * s.deriv;
}

cplx rho(cplx u, const ModularParam& tau, double tol) {
    const auto c = centre(u, tau);
    require_off_lattice(c, tau, "u", u);
    const auto s = theta_at(c, tau, tol);
    return s.deriv / s.value;
}

cplx s_func(cplx u, cplx lambda, const ModularParam& tau, double tol) {
    return SKernel(lambda, tau, tol)(u);
}

SKernel::SKernel(cplx lambda, const ModularParam& tau, double tol)
    : lambda_(lambda), tau_(tau), tol_(tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("theta tolerance must be positive");
    const auto c = centre(-lambda, tau);
    require_off_lattice(c, tau, "lambda", lambda);
    const auto t = theta_at(c, tau, tol);
    log_prefactor_ = -t.log_scale;
    prefactor_ = theta_prime_zero(tau, tol) / t.value;
}

ScaledTheta SKernel::denominator(cplx u) const {
    const auto cu = centre(u, tau_);
    require_off_lattice(cu, tau_, "u", u);
    return theta_at(cu, tau_, tol_);
}

cplx SKernel::operator()(cplx u, const ScaledTheta& den) const {
    const auto num = theta_at(centre(u - lambda_, tau_), tau_, tol_);
    return std::exp(num.log_scale - den.log_scale + log_prefactor_) * (num.value / den.value) *
           prefactor_;
}

cplx SKernel::operator()(cplx u) const { return (*this)(u, denominator(u)); }

}  // namespace kernel
}  // namespace rw
