#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "rw/config.hpp"
#include "rw/elliptic_kernel.hpp"

namespace rw::testing {

inline double rel_err(cplx got, cplx want) {
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

/// Uniform point of the parallelogram x + y tau, (x, y) in [lo, hi)^2.
inline cplx cell_point(std::mt19937_64& rng, const ModularParam& tau, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    const double x = u(rng);
    return x + u(rng) * tau.tau();
}

/// Smallest torus distance from (u1, u2) to the polar divisor of the forms.
inline double divisor_clearance(cplx u1, cplx u2, const ProblemConfig& cfg) {
    const auto& tau = cfg.tau;
    double d = std::min(kernel::lattice_distance(u1 - u2, tau), kernel::lattice_distance(u1 + u2, tau));
    for (auto t : cfg.t1) d = std::min(d, kernel::lattice_distance(u1 - t, tau));
    for (auto t : cfg.t2) d = std::min(d, kernel::lattice_distance(u2 - t, tau));
    for (auto w : half_periods(tau)) {
        d = std::min(d, kernel::lattice_distance(u1 - w, tau));
        d = std::min(d, kernel::lattice_distance(u2 - w, tau));
    }
    return d;
}

/// A point pair at least `clearance` away from every polar line.
inline std::pair<cplx, cplx> generic_point(std::mt19937_64& rng, const ProblemConfig& cfg,
                                           double clearance = 0.05) {
    for (;;) {
        const cplx u1 = cell_point(rng, cfg.tau);
        const cplx u2 = cell_point(rng, cfg.tau);
        if (divisor_clearance(u1, u2, cfg) > clearance) return {u1, u2};
    }
}

}  // namespace rw::testing
