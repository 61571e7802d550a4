#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rw/config.hpp"
#include "rw/connection.hpp"
#include "rw/execution.hpp"

namespace rw::integrator {

/// A straight segment or a circular arc, parametrised by s in [0, 1].
struct Segment {
    enum class Kind { kLine, kArc };

    Kind kind = Kind::kLine;
    cplx start;
    cplx end;
    cplx centre;         // arcs only
    double radius = 0.0; // arcs only
    double angle0 = 0.0; // arcs only
    double sweep = 0.0;  // arcs only, signed

    static Segment line(cplx a, cplx b);
    static Segment arc(cplx centre, double radius, double angle0, double sweep);

    cplx point(double s) const;
    /// d point / ds.
    cplx tangent(double s) const;
    double length() const;
};

struct Contour {
    std::vector<Segment> segments;
    /// Minimum number of quadrature panels placed on every segment.
    int samples_per_segment = 1;

    cplx start() const { return segments.front().start; }
    cplx end() const { return segments.back().end; }
};

/// Double commutator loop: around a (+), b (+), a (-), b (-), starting on the
/// circle around a where it meets the segment towards b.
Contour pochhammer(cplx a, cplx b, double radius);

struct ProductCycle {
    Contour gamma1;
    Contour gamma2;
};

/// The partner of t_{k1} in a cycle description.
struct CyclePair {
    enum class Kind { kPeriodOne, kPeriodTau, kPoint, kExplicit };

    Kind kind = Kind::kPeriodOne;
    int j = 0;        // kPoint: the partner t_{kj}
    cplx a, b;        // kExplicit
};

/// Pochhammer loop in u_k around t_{k1} and its partner: t_{k1} + 1, t_{k1} + tau,
/// t_{kj}, or an explicit pair of points.
Contour pair_contour(const ProblemConfig& cfg, int k, const CyclePair& pair, double radius);

ProductCycle product_cycle(const ProblemConfig& cfg, const CyclePair& pair1, const CyclePair& pair2,
                          double radius);

/// Throws GeometryError unless both loops are closed, stay away from their own
/// singular points, and keep u1 +- u2 away from the lattice over all pairs.
void validate_geometry(const ProductCycle& cycle, const ProblemConfig& cfg);

/// One continuous determination of T along a path. Each theta factor of T carries
/// its own logarithm, advanced by steps whose phase change is kept below pi/2.
class BranchState {
public:
    /// Principal logarithms at (u1, u2). With `reference`, each logarithm is instead
    /// the one closest to the reference's, which keeps the branch continuous in t.
    BranchState(const ProblemConfig& cfg, cplx u1, cplx u2,
                const BranchState* reference = nullptr);

    cplx u1() const noexcept { return u1_; }
    cplx u2() const noexcept { return u2_; }

    /// Move along the straight line to (u1, u2), bisecting steps as needed.
    void transport(cplx u1, cplx u2);
    /// One step; throws BranchJump if some factor turns by more than pi/2.
    void step(cplx u1, cplx u2);

    cplx log_T() const;
    cplx T() const;

    int factor_count() const noexcept { return static_cast<int>(logs_.size()); }
    cplx factor_log(int f) const { return logs_[f]; }

private:
    struct Factor {
        cplx a;      // coefficient of u1
        cplx b;      // coefficient of u2
        cplx shift;  // argument = a u1 + b u2 - shift
        cplx exponent;
    };

    cplx argument(const Factor& f, cplx u1, cplx u2) const {
        return f.a * u1 + f.b * u2 - f.shift;
    }
    cplx log_theta(cplx z) const;
    bool try_step(cplx u1, cplx u2);

    ModularParam tau_;
    cplx c10_;
    cplx c20_;
    std::vector<Factor> factors_;
    std::vector<cplx> logs_;
    std::vector<cplx> raw_;  // principal log theta at the current point
    cplx u1_;
    cplx u2_;
};

/// Gauss-Kronrod panels along one contour; frozen so that perturbed
/// configurations are integrated on identical nodes.
struct ContourRule {
    std::vector<cplx> nodes;
    std::vector<cplx> kronrod;    // weights including the tangent factor
    std::vector<cplx> gauss;      // embedded 7-point weights, 0 at Kronrod-only nodes
    std::vector<int> segment_of;  // owning segment per node
    std::vector<double> grading;  // kappa per segment
};

struct QuadraturePlan {
    ContourRule rule1;
    ContourRule rule2;
    int rounds = 0;
};

ContourRule build_rule(const Contour& contour, const std::vector<cplx>& singular_points,
                       const std::vector<double>& grading);

/// Values of the integrand at (u1, u2); `out` has one slot per component.
using PointIntegrand = std::function<void(cplx u1, cplx u2, std::span<cplx> out)>;
/// Builds the point integrand for one configuration; called once per integral.
using Integrand = std::function<PointIntegrand(const ProblemConfig& cfg)>;

struct IntegrationOptions {
    double tol = 1e-8;
    int max_rounds = 6;
    double initial_grading = 1.5;
    Execution execution = Execution::kParallel;
};

/// Refines the panel grading per segment until the Gauss-Kronrod difference of every
/// segment is below tol * max|F|; throws QuadratureFailure after max_rounds.
QuadraturePlan plan_quadrature(const ProductCycle& cycle, const ProblemConfig& cfg,
                               const Integrand& integrand, int components,
                               const IntegrationOptions& options = {});

/// Every grading halved.
QuadraturePlan refined(const QuadraturePlan& plan, const ProductCycle& cycle,
                       const ProblemConfig& cfg);

/// The branch anchor of a plan: T's logarithms at the start of both loops.
BranchState base_branch(const ProductCycle& cycle, const ProblemConfig& cfg,
                        const BranchState* reference = nullptr);

/// Integral of T * integrand over the product cycle on a fixed plan.
std::vector<cplx> integrate(const QuadraturePlan& plan, const ProductCycle& cycle,
                            const ProblemConfig& cfg, const Integrand& integrand, int components,
                            Execution execution = Execution::kParallel,
                            const BranchState* reference = nullptr);

/// The forms g_* in basis order, as an integrand.
Integrand form_integrand();

/// F_* for every basis index; plans the quadrature itself when no plan is given.
std::vector<cplx> rw_integral(const ProductCycle& cycle, const ProblemConfig& cfg,
                              const std::optional<QuadraturePlan>& plan = std::nullopt,
                              Execution execution = Execution::kParallel);

struct OdeCheck {
    connection::Derivative deriv;
    double h = 0.0;
    double residual = 0.0;
};

/// || (F(t+h) - F(t-h)) / 2h - A F(t) || / ||F(t)||, with lambda co-varying, on the
/// plan and branch of the unperturbed configuration.
OdeCheck verify_ode(connection::Derivative d, const ProductCycle& cycle, const ProblemConfig& cfg,
                    double h = 1e-4, const std::optional<QuadraturePlan>& plan = std::nullopt,
                    Execution execution = Execution::kParallel);

/// Several steps sharing one plan; the unperturbed integral is computed once.
std::vector<OdeCheck> verify_ode_sweep(connection::Derivative d, const ProductCycle& cycle,
                                       const ProblemConfig& cfg, const std::vector<double>& steps,
                                       const std::optional<QuadraturePlan>& plan = std::nullopt,
                                       Execution execution = Execution::kParallel);

}  // namespace rw::integrator
