#pragma once

#include <complex>
#include <memory>
#include <numbers>
#include <vector>

namespace rw {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

namespace kernel {
inline constexpr double kDefaultTol = 1e-14;
inline constexpr double kSingularDistance = 1e-8;
inline constexpr int kMaxTerms = 200;
}  // namespace kernel

/// The modular parameter tau in the upper half plane, with the nome powers
/// e^{pi i tau (k+1/2)^2} and theta1'(0) cached. Copies share the cache.
class ModularParam {
public:
    explicit ModularParam(cplx tau);

    cplx tau() const noexcept { return tau_; }
    /// theta1'(0) at the default tolerance.
    cplx theta1_prime_zero() const noexcept { return cache_->theta_prime_zero; }
    const std::vector<cplx>& nome_powers() const noexcept { return cache_->nome_powers; }

private:
    struct Cache {
        std::vector<cplx> nome_powers;
        cplx theta_prime_zero;
    };
    cplx tau_;
    std::shared_ptr<const Cache> cache_;
};

namespace kernel {

/// u = u0 + l + m*tau with u0 = x + y*tau, (x, y) in [0,1)^2.
struct LatticeReduction {
    cplx u0;
    long l = 0;
    long m = 0;
};

LatticeReduction lattice_reduce(cplx u, const ModularParam& tau);

/// Euclidean distance from u to the nearest point of Z + Z*tau.
double lattice_distance(cplx u, const ModularParam& tau);

/// theta1 and theta1' in factored form: theta1(u) = exp(log_scale) * value.
/// Keeping the quasi-periodicity factor as a logarithm lets ratios of thetas
/// at far-apart arguments cancel their exponentials before overflow.
struct ScaledTheta {
    cplx log_scale;
    cplx value;
    cplx deriv;
};

ScaledTheta theta1_scaled(cplx u, const ModularParam& tau, double tol = kDefaultTol);

cplx theta1(cplx u, const ModularParam& tau, double tol = kDefaultTol);
cplx theta1_d1(cplx u, const ModularParam& tau, double tol = kDefaultTol);
cplx rho(cplx u, const ModularParam& tau, double tol = kDefaultTol);
cplx s_func(cplx u, cplx lambda, const ModularParam& tau, double tol = kDefaultTol);

/// s(.; lambda) with lambda fixed: theta1(-lambda) and theta1'(0) are computed once.
class SKernel {
public:
    SKernel(cplx lambda, const ModularParam& tau, double tol = kDefaultTol);

    cplx operator()(cplx u) const;
    /// theta1(u), checked to be off the lattice, for reuse across kernels sharing u.
    ScaledTheta denominator(cplx u) const;
    /// s(u; lambda) with theta1(u) supplied by denominator(u).
    cplx operator()(cplx u, const ScaledTheta& den) const;
    cplx lambda() const noexcept { return lambda_; }

private:
    cplx lambda_;
    ModularParam tau_;
    double tol_;
    cplx log_prefactor_;
    cplx prefactor_;
};

}  // namespace kernel
}  // namespace rw
