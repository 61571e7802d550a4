#include "rw/integrator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "rw/basis_forms.hpp"
#include "rw/elliptic_kernel.hpp"
#include "rw/errors.hpp"

namespace rw::integrator {
namespace {

// 15-point Kronrod rule with its embedded 7-point Gauss rule, on [-1, 1].
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr double kClosure = 1e-12;
constexpr double kPointClearance = 1e-4;
constexpr double kCrossClearance = 1e-3;
constexpr int kMaxPanels = 20000;
constexpr int kMaxBisections = 40;

cplx wrap_phase(cplx z) {
    const double k = std::round(z.imag() / (2.0 * kPi));
    return {z.real(), z.imag() - 2.0 * kPi * k};
}

std::vector<cplx> lattice_images(const std::vector<cplx>& points, const ModularParam& tau) {
    std::vector<cplx> out;
    for (const cplx p : points) {
        const cplx p0 = kernel::lattice_reduce(p, tau).u0;
        for (int m = -3; m <= 3; ++m)
            for (int n = -3; n <= 3; ++n) out.push_back(p0 + double(m) + double(n) * tau.tau());
    }
    return out;
}

const std::vector<cplx>& points_of(const ProblemConfig& cfg, int k) { return k == 1 ? cfg.t1 : cfg.t2; }

double nearest(cplx z, const std::vector<cplx>& points) {
    double d = std::numeric_limits<double>::infinity();
    for (const cplx p : points) d = std::min(d, std::abs(z - p));
    return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Contours.

Segment Segment::line(cplx a, cplx b) {
    Segment s;
    s.kind = Kind::kLine;
    s.start = a;
    s.end = b;
    return s;
}

Segment Segment::arc(cplx centre, double radius, double angle0, double sweep) {
    Segment s;
    s.kind = Kind::kArc;
    s.centre = centre;
    s.radius = radius;
    s.angle0 = angle0;
    s.sweep = sweep;
    s.start = centre + std::polar(radius, angle0);
    s.end = centre + std::polar(radius, angle0 + sweep);
    return s;
}

cplx Segment::point(double s) const {
    if (kind == Kind::kLine) return start + s * (end - start);
    return centre + std::polar(radius, angle0 + s * sweep);
}

cplx Segment::tangent(double s) const {
    if (kind == Kind::kLine) return end - start;
    return kI * sweep * std::polar(radius, angle0 + s * sweep);
}

double Segment::length() const {
    return kind == Kind::kLine ? std::abs(end - start) : radius * std::abs(sweep);
}

Contour pochhammer(cplx a, cplx b, double radius) {
    if (!(radius > 1e-3)) throw GeometryError("Pochhammer radius must exceed 1e-3");
    if (!(std::abs(b - a) > 4.0 * radius)) {
        throw GeometryError("Pochhammer points must be more than four radii apart");
    }
    const cplx d = (b - a) / std::abs(b - a);
    const double ta = std::arg(d);
    const double tb = std::arg(-d);
    const cplx p = a + radius * d;
    const cplx q = b - radius * d;
    const auto loop = [](cplx centre, double r, double angle, double sweep, cplx at) {
        Segment s = Segment::arc(centre, r, angle, sweep);
        s.start = at;
        s.end = at;
        return s;
    };
    Contour c;
    c.segments = {loop(a, radius, ta, 2.0 * kPi, p),  Segment::line(p, q),
                  loop(b, radius, tb, 2.0 * kPi, q),  Segment::line(q, p),
                  loop(a, radius, ta, -2.0 * kPi, p), Segment::line(p, q),
                  loop(b, radius, tb, -2.0 * kPi, q), Segment::line(q, p)};
    return c;
}

Contour pair_contour(const ProblemConfig& cfg, int k, const CyclePair& pair, double radius) {
    if (k != 1 && k != 2) throw std::invalid_argument("cycle variable must be 1 or 2");
    const auto& t = points_of(cfg, k);
    if (t.empty()) throw GeometryError("no marked points for the cycle variable");
    const cplx a = t.front();
    switch (pair.kind) {
        case CyclePair::Kind::kPeriodOne: return pochhammer(a, a + 1.0, radius);
        case CyclePair::Kind::kPeriodTau: return pochhammer(a, a + cfg.tau.tau(), radius);
        case CyclePair::Kind::kPoint:
            if (pair.j < 2 || pair.j > static_cast<int>(t.size())) {
                throw GeometryError("cycle partner must be one of t_k2 .. t_kn");
            }
            return pochhammer(a, t[pair.j - 1], radius);
        case CyclePair::Kind::kExplicit: return pochhammer(pair.a, pair.b, radius);
    }
    throw std::logic_error("unknown cycle pair");
}

ProductCycle product_cycle(const ProblemConfig& cfg, const CyclePair& pair1, const CyclePair& pair2,
                          double radius) {
    return {pair_contour(cfg, 1, pair1, radius), pair_contour(cfg, 2, pair2, radius)};
}

namespace {

struct Trace {
    std::vector<cplx> points;
    double spacing = 0.0;
};

Trace trace(const Contour& c, int per_segment) {
    Trace t;
    for (const auto& seg : c.segments) {
        for (int i = 0; i < per_segment; ++i) t.points.push_back(seg.point(double(i) / per_segment));
        t.spacing = std::max(t.spacing, seg.length() / per_segment);
    }
    t.points.push_back(c.end());
    return t;
}

void check_closed(const Contour& c, const char* name) {
    if (c.segments.empty()) throw GeometryError(std::string(name) + " has no segments");
    for (std::size_t i = 0; i + 1 < c.segments.size(); ++i) {
        if (std::abs(c.segments[i].end - c.segments[i + 1].start) > kClosure) {
            throw GeometryError(std::string(name) + " has a gap between segments");
        }
    }
    if (std::abs(c.end() - c.start()) > kClosure) {
        throw GeometryError(std::string(name) + " is not closed");
    }
}

}  // namespace

void validate_geometry(const ProductCycle& cycle, const ProblemConfig& cfg) {
    check_closed(cycle.gamma1, "gamma1");
    check_closed(cycle.gamma2, "gamma2");
    const auto t1 = trace(cycle.gamma1, 128);
    const auto t2 = trace(cycle.gamma2, 128);
    const auto& tau = cfg.tau;
    for (int k = 1; k <= 2; ++k) {
        const auto& tr = k == 1 ? t1 : t2;
        for (const cplx t : points_of(cfg, k)) {
            for (const cplx u : tr.points) {
                if (kernel::lattice_distance(u - t, tau) <= kPointClearance) {
                    std::ostringstream msg;
                    msg << "gamma" << k << " passes within " << kPointClearance << " of a marked point";
                    throw GeometryError(msg.str());
                }
            }
        }
    }
    const double clearance = kCrossClearance + t1.spacing + t2.spacing;
    for (const cplx u1 : t1.points) {
        for (const cplx u2 : t2.points) {
            if (kernel::lattice_distance(u1 + u2, tau) < clearance ||
                kernel::lattice_distance(u1 - u2, tau) < clearance) {
                throw GeometryError("the product cycle meets u1 + u2 = 0 or u1 - u2 = 0");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Branch tracking.

BranchState::BranchState(const ProblemConfig& cfg, cplx u1, cplx u2, const BranchState* reference)
    : tau_(cfg.tau), c10_(cfg.c10), c20_(cfg.c20), u1_(u1), u2_(u2) {
    factors_.push_back({1.0, -1.0, 0.0, cfg.c});
    factors_.push_back({1.0, 1.0, 0.0, cfg.c});
    for (int i = 0; i < cfg.n1(); ++i) factors_.push_back({1.0, 0.0, cfg.t1[i], cfg.c1[i]});
    for (int j = 0; j < cfg.n2(); ++j) factors_.push_back({0.0, 1.0, cfg.t2[j], cfg.c2[j]});
    if (reference && reference->factors_.size() != factors_.size()) {
        throw std::invalid_argument("branch reference has a different factor layout");
    }
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        const cplx raw = log_theta(argument(factors_[f], u1, u2));
        raw_.push_back(raw);
        cplx log = wrap_phase(raw);
        if (reference) {
            const double k = std::round((reference->logs_[f].imag() - log.imag()) / (2.0 * kPi));
            log += 2.0 * kPi * kI * k;
        }
        logs_.push_back(log);
    }
}

cplx BranchState::log_theta(cplx z) const {
    if (kernel::lattice_distance(z, tau_) < kernel::kSingularDistance) {
        throw NearSingular("T evaluated on a singular hyperplane", "u");
    }
    const auto st = kernel::theta1_scaled(z, tau_);
    return st.log_scale + std::log(st.value);
}

bool BranchState::try_step(cplx u1, cplx u2) {
    std::vector<cplx> next(raw_);
    std::vector<cplx> delta(raw_.size(), 0.0);
    for (std::size_t f = 0; f < factors_.size(); ++f) {
        const cplx from = argument(factors_[f], u1_, u2_);
        const cplx to = argument(factors_[f], u1, u2);
        if (from == to) continue;
        next[f] = log_theta(to);
        delta[f] = wrap_phase(next[f] - raw_[f]);
        if (std::abs(delta[f].imag()) > kPi / 2.0) return false;
    }
    for (std::size_t f = 0; f < factors_.size(); ++f) logs_[f] += delta[f];
    raw_ = std::move(next);
    u1_ = u1;
    u2_ = u2;
    return true;
}

void BranchState::step(cplx u1, cplx u2) {
    if (!try_step(u1, u2)) throw BranchJump("a theta factor turned by more than pi/2 in one step");
}

void BranchState::transport(cplx u1, cplx u2) {
    struct Walker {
        BranchState& s;
        void go(cplx a1, cplx a2, cplx b1, cplx b2, int depth) {
            if (s.try_step(b1, b2)) return;
            if (depth >= kMaxBisections) {
                throw BranchJump("branch tracking could not resolve the phase along the path");
            }
            const cplx m1 = 0.5 * (a1 + b1);
            const cplx m2 = 0.5 * (a2 + b2);
            go(a1, a2, m1, m2, depth + 1);
            go(m1, m2, b1, b2, depth + 1);
        }
    };
    Walker{*this}.go(u1_, u2_, u1, u2, 0);
}

cplx BranchState::log_T() const {
    cplx out = 2.0 * kPi * kI * (c10_ * u1_ + c20_ * u2_);
    for (std::size_t f = 0; f < factors_.size(); ++f) out += factors_[f].exponent * logs_[f];
    return out;
}

cplx BranchState::T() const { return std::exp(log_T()); }

// ---------------------------------------------------------------------------
// Quadrature.

ContourRule build_rule(const Contour& contour, const std::vector<cplx>& singular_points,
                       const std::vector<double>& grading) {
    if (grading.size() != contour.segments.size()) {
        throw std::invalid_argument("one grading per segment is required");
    }
    ContourRule rule;
    rule.grading = grading;
    const int min_panels = std::max(1, contour.samples_per_segment);
    for (std::size_t si = 0; si < contour.segments.size(); ++si) {
        const auto& seg = contour.segments[si];
        const double len = seg.length();
        const double kappa = grading[si];
        const auto local = [&](double s) { return nearest(seg.point(s), singular_points); };
        double s = 0.0;
        int panels = 0;
        while (s < 1.0) {
            double ds = std::min(kappa * local(s) / len, 1.0 / min_panels);
            ds = std::min(ds, kappa * local(std::min(1.0, s + ds)) / len);
            if (1.0 - (s + ds) < 0.3 * ds) ds = 1.0 - s;
            if (++panels > kMaxPanels) throw QuadratureFailure("panel budget exhausted");
            const double mid = s + 0.5 * ds;
            const double half = 0.5 * ds;
            for (int k = 0; k < 15; ++k) {
                const int a = k < 8 ? k : 14 - k;
                const double x = k < 8 ? -kXgk[a] : kXgk[a];
                const double sp = mid + half * x;
                const cplx jac = half * seg.tangent(sp);
                rule.nodes.push_back(seg.point(sp));
                rule.kronrod.push_back(kWgk[a] * jac);
                rule.gauss.push_back(a % 2 == 1 ? kWg[a / 2] * jac : cplx(0.0));
                rule.segment_of.push_back(static_cast<int>(si));
            }
            s += ds;
        }
    }
    return rule;
}

namespace {

struct Sweep {
    std::vector<cplx> total;
    std::vector<double> error1;  // per gamma1 segment
    std::vector<double> error2;  // per gamma2 segment
};

Sweep sweep(const ContourRule& r1, const ContourRule& r2, const ProductCycle& cycle,
            const ProblemConfig& cfg, const Integrand& integrand, int components, Execution execution,
            const BranchState* reference, bool estimate) {
    const PointIntegrand g = integrand(cfg);
    const int n2 = static_cast<int>(r2.nodes.size());
    const int n1 = static_cast<int>(r1.nodes.size());
    const int segs1 = static_cast<int>(cycle.gamma1.segments.size());
    const int segs2 = static_cast<int>(cycle.gamma2.segments.size());
    const int N = components;

    // The cross factors are carried along gamma2 at the start of gamma1, once.
    const cplx a1 = cycle.gamma1.start();
    BranchState walker(cfg, a1, cycle.gamma2.start(), reference);
    std::vector<BranchState> column;
    column.reserve(n2);
    for (int j = 0; j < n2; ++j) {
        walker.transport(a1, r2.nodes[j]);
        column.push_back(walker);
    }

    std::vector<cplx> inner(static_cast<std::size_t>(n2) * N, 0.0);
    std::vector<cplx> diff(estimate ? static_cast<std::size_t>(n2) * segs1 * N : 0, 0.0);
    std::vector<std::string> failure(n2);
    const bool parallel = execution == Execution::kParallel;

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int j = 0; j < n2; ++j) {
        try {
            BranchState state = column[j];
            std::vector<cplx> values(N);
            cplx* in = inner.data() + static_cast<std::size_t>(j) * N;
            for (int i = 0; i < n1; ++i) {
                state.transport(r1.nodes[i], r2.nodes[j]);
                const cplx T = state.T();
                g(r1.nodes[i], r2.nodes[j], values);
                const cplx wk = r1.kronrod[i];
                const cplx wd = r1.kronrod[i] - r1.gauss[i];
                cplx* df = estimate ? diff.data() +
                                          (static_cast<std::size_t>(j) * segs1 + r1.segment_of[i]) * N
                                    : nullptr;
                for (int c = 0; c < N; ++c) {
                    const cplx v = T * values[c];
                    in[c] += wk * v;
                    if (df) df[c] += wd * v;
                }
            }
        } catch (const std::exception& e) {
            failure[j] = e.what();
        }
    }
    for (const auto& f : failure) {
        if (!f.empty()) throw QuadratureFailure("integrand evaluation failed: " + f);
    }

    Sweep out;
    out.total.assign(N, 0.0);
    for (int j = 0; j < n2; ++j)
        for (int c = 0; c < N; ++c) out.total[c] += r2.kronrod[j] * inner[static_cast<std::size_t>(j) * N + c];
    if (!estimate) return out;

    out.error1.assign(segs1, 0.0);
    for (int s = 0; s < segs1; ++s) {
        for (int c = 0; c < N; ++c) {
            cplx acc = 0.0;
            for (int j = 0; j < n2; ++j)
                acc += r2.kronrod[j] * diff[(static_cast<std::size_t>(j) * segs1 + s) * N + c];
            out.error1[s] = std::max(out.error1[s], std::abs(acc));
        }
    }
    out.error2.assign(segs2, 0.0);
    std::vector<cplx> acc(static_cast<std::size_t>(segs2) * N, 0.0);
    for (int j = 0; j < n2; ++j) {
        const cplx wd = r2.kronrod[j] - r2.gauss[j];
        for (int c = 0; c < N; ++c)
            acc[static_cast<std::size_t>(r2.segment_of[j]) * N + c] +=
                wd * inner[static_cast<std::size_t>(j) * N + c];
    }
    for (int s = 0; s < segs2; ++s)
        for (int c = 0; c < N; ++c)
            out.error2[s] = std::max(out.error2[s], std::abs(acc[static_cast<std::size_t>(s) * N + c]));
    return out;
}

std::vector<cplx> singular_images(const ProblemConfig& cfg, int k) {
    return lattice_images(points_of(cfg, k), cfg.tau);
}

}  // namespace

QuadraturePlan plan_quadrature(const ProductCycle& cycle, const ProblemConfig& cfg,
                               const Integrand& integrand, int components,
                               const IntegrationOptions& options) {
    const auto sing1 = singular_images(cfg, 1);
    const auto sing2 = singular_images(cfg, 2);
    std::vector<double> g1(cycle.gamma1.segments.size(), options.initial_grading);
    std::vector<double> g2(cycle.gamma2.segments.size(), options.initial_grading);
    for (int round = 0; round <= options.max_rounds; ++round) {
        QuadraturePlan plan{build_rule(cycle.gamma1, sing1, g1), build_rule(cycle.gamma2, sing2, g2),
                            round};
        const auto s = sweep(plan.rule1, plan.rule2, cycle, cfg, integrand, components,
                             options.execution, nullptr, true);
        double scale = 0.0;
        for (const cplx v : s.total) scale = std::max(scale, std::abs(v));
        const double bound = options.tol * scale;
        bool done = true;
        for (std::size_t k = 0; k < g1.size(); ++k) {
            if (s.error1[k] > bound) {
                g1[k] /= 2.0;
                done = false;
            }
        }
        for (std::size_t k = 0; k < g2.size(); ++k) {
            if (s.error2[k] > bound) {
                g2[k] /= 2.0;
                done = false;
            }
        }
        if (done) return plan;
    }
    std::ostringstream msg;
    msg << "quadrature did not reach relative tolerance " << options.tol << " in "
        << options.max_rounds << " refinements";
    throw QuadratureFailure(msg.str());
}

QuadraturePlan refined(const QuadraturePlan& plan, const ProductCycle& cycle,
                       const ProblemConfig& cfg) {
    auto g1 = plan.rule1.grading;
    auto g2 = plan.rule2.grading;
    for (auto& g : g1) g /= 2.0;
    for (auto& g : g2) g /= 2.0;
    return {build_rule(cycle.gamma1, singular_images(cfg, 1), g1),
            build_rule(cycle.gamma2, singular_images(cfg, 2), g2), plan.rounds + 1};
}

BranchState base_branch(const ProductCycle& cycle, const ProblemConfig& cfg,
                        const BranchState* reference) {
    return BranchState(cfg, cycle.gamma1.start(), cycle.gamma2.start(), reference);
}

std::vector<cplx> integrate(const QuadraturePlan& plan, const ProductCycle& cycle,
                            const ProblemConfig& cfg, const Integrand& integrand, int components,
                            Execution execution, const BranchState* reference) {
    return sweep(plan.rule1, plan.rule2, cycle, cfg, integrand, components, execution, reference,
                 false)
        .total;
}

Integrand form_integrand() {
    return [](const ProblemConfig& cfg) -> PointIntegrand {
        auto ev = std::make_shared<const forms::FormEvaluator>(cfg);
        return [ev](cplx u1, cplx u2, std::span<cplx> out) { ev->evaluate_all(u1, u2, out); };
    };
}

std::vector<cplx> rw_integral(const ProductCycle& cycle, const ProblemConfig& cfg,
                              const std::optional<QuadraturePlan>& plan, Execution execution) {
    validate_geometry(cycle, cfg);
    const int n = euler_characteristic(cfg.n1(), cfg.n2());
    const auto integrand = form_integrand();
    IntegrationOptions options;
    options.execution = execution;
    const QuadraturePlan p = plan ? *plan : plan_quadrature(cycle, cfg, integrand, n, options);
    return integrate(p, cycle, cfg, integrand, n, execution);
}

std::vector<OdeCheck> verify_ode_sweep(connection::Derivative d, const ProductCycle& cycle,
                                       const ProblemConfig& cfg, const std::vector<double>& steps,
                                       const std::optional<QuadraturePlan>& plan,
                                       Execution execution) {
    validate_geometry(cycle, cfg);
    const int n = euler_characteristic(cfg.n1(), cfg.n2());
    const auto integrand = form_integrand();
    IntegrationOptions options;
    options.execution = execution;
    const QuadraturePlan p = plan ? *plan : plan_quadrature(cycle, cfg, integrand, n, options);
    const BranchState base = base_branch(cycle, cfg);

    const auto F = [&](const ProblemConfig& c) {
        const auto v = integrate(p, cycle, c, integrand, n, execution, &base);
        return Eigen::Map<const Eigen::VectorXcd>(v.data(), n).eval();
    };
    const Eigen::VectorXcd F0 = F(cfg);
    const Eigen::MatrixXcd A = connection::assemble(d, cfg).entries;
    const Eigen::VectorXcd AF = A * F0;

    std::vector<OdeCheck> out;
    for (const double h : steps) {
        if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
        const Eigen::VectorXcd Fp = F(shift_point(cfg, d.k, d.p, h));
        const Eigen::VectorXcd Fm = F(shift_point(cfg, d.k, d.p, -h));
        const Eigen::VectorXcd dF = (Fp - Fm) / (2.0 * h);
        out.push_back({d, h, (dF - AF).norm() / F0.norm()});
    }
    return out;
}

OdeCheck verify_ode(connection::Derivative d, const ProductCycle& cycle, const ProblemConfig& cfg,
                    double h, const std::optional<QuadraturePlan>& plan, Execution execution) {
    return verify_ode_sweep(d, cycle, cfg, {h}, plan, execution).front();
}

}  // namespace rw::integrator
