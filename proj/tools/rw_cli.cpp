// rw_cli: validate configurations, run the identity suite, export connection
// matrices, and check flatness and the differential system on integrals.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rw/config.hpp"
#include "rw/connection.hpp"
#include "rw/errors.hpp"
#include "rw/identity_suite.hpp"
#include "rw/integrator.hpp"
#include "rw/io.hpp"

namespace {

using rw::connection::Derivative;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct Common {
    std::string config_path;
    std::string report_path;
    std::uint64_t seed = 1;
    bool serial = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

rw::Execution execution_of(const Common& c) {
    return c.serial ? rw::Execution::kSerial : rw::Execution::kParallel;
}

/// Loads and validates; an invalid configuration is a usage error for every
/// command except validate.
rw::ProblemConfig load_valid(const std::string& path) {
    auto cfg = rw::io::load_config(path);
    const auto violations = rw::validate(cfg);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid configuration:";
        for (const auto& v : violations) msg << "\n  " << v.condition << ": " << v.detail;
        throw UsageError(msg.str());
    }
    return cfg;
}

Derivative parse_derivative(const std::string& text, const rw::ProblemConfig& cfg) {
    int k = 0;
    int p = 0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%d,%d%c", &k, &p, &tail) != 2) {
        throw UsageError("derivative must be written k,p: " + text);
    }
    const int n = k == 1 ? cfg.n1() : cfg.n2();
    if ((k != 1 && k != 2) || p < 1 || p > n) {
        throw UsageError("no derivative direction " + text + " in this configuration");
    }
    return {k, p};
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

int finish(rw::io::RunReport& report, const Common& common,
           std::chrono::steady_clock::time_point start) {
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    for (const auto& c : report.checks) {
        std::printf("%-28s residual %s  tol %s  %s%s%s\n", c.id.c_str(), fmt(c.residual).c_str(),
                    fmt(c.tolerance).c_str(), c.pass ? "PASS" : "FAIL",
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
    }
    const bool ok = report.pass();
    std::printf("%s: %s (%zu checks, %.2f s)\n", report.command.c_str(), ok ? "pass" : "fail",
                report.checks.size(), report.wall_time);
    if (!common.report_path.empty()) {
        rw::io::write_file(common.report_path, report.to_json().dump(2) + "\n");
    }
    return ok ? kPass : kFail;
}

int cmd_validate(const Common& common) {
    const auto cfg = rw::io::load_config(common.config_path);
    const auto violations = rw::validate(cfg);
    for (const auto& v : violations) std::printf("violation: %s: %s\n", v.condition.c_str(), v.detail.c_str());
    if (!violations.empty()) return kFail;
    std::printf("valid: n1 = %d, n2 = %d, %d basis forms, digest %s\n", cfg.n1(), cfg.n2(),
                rw::euler_characteristic(cfg.n1(), cfg.n2()), rw::io::config_digest(cfg).c_str());
    return kPass;
}

int cmd_identities(const Common& common, int samples, double tol) {
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = load_valid(common.config_path);
    rw::identities::SuiteOptions opts;
    opts.seed = common.seed;
    opts.samples = samples;
    opts.tol = tol;
    opts.execution = execution_of(common);
    rw::io::RunReport report{"identities", rw::io::config_digest(cfg), common.seed, {}, 0.0};
    for (const auto& r : rw::identities::run_suite(cfg, opts)) {
        report.checks.push_back({r.id, r.max_residual, r.tolerance, r.pass, r.detail});
    }
    return finish(report, common, start);
}

int cmd_connection(const Common& common, const std::string& deriv, const std::string& out,
                   const std::string& csv, bool as_printed) {
    const auto cfg = load_valid(common.config_path);
    const auto d = parse_derivative(deriv, cfg);
    const auto convention = as_printed ? rw::connection::RowConvention::kAsPrinted
                                       : rw::connection::RowConvention::kCorrected;
    const auto m = rw::connection::assemble(d, cfg, convention);
    auto doc = rw::io::matrix_to_json(m);
    doc["config_digest"] = rw::io::config_digest(cfg);
    doc["rows"] = as_printed ? "as-printed" : "corrected";
    const std::string text = doc.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        rw::io::write_file(out, text);
        std::printf("wrote %dx%d matrix %s to %s\n", static_cast<int>(m.entries.rows()),
                    static_cast<int>(m.entries.cols()), d.label().c_str(), out.c_str());
    }
    if (!csv.empty()) rw::io::write_file(csv, rw::io::matrix_to_csv(m));
    return kPass;
}

int cmd_flatness(const Common& common, const std::vector<std::string>& pairs, double h,
                 double tol, bool as_printed) {
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = load_valid(common.config_path);
    const auto convention = as_printed ? rw::connection::RowConvention::kAsPrinted
                                       : rw::connection::RowConvention::kCorrected;
    std::vector<std::pair<Derivative, Derivative>> todo;
    const bool all = pairs.empty() || (pairs.size() == 1 && pairs[0] == "all");
    if (all) {
        const auto ds = rw::connection::derivatives(cfg);
        for (std::size_t a = 0; a < ds.size(); ++a) {
            for (std::size_t b = a + 1; b < ds.size(); ++b) todo.emplace_back(ds[a], ds[b]);
        }
    } else {
        for (const auto& p : pairs) {
            const auto colon = p.find(':');
            if (colon == std::string::npos) throw UsageError("pair must be written k,p:k,p: " + p);
            const auto a = parse_derivative(p.substr(0, colon), cfg);
            const auto b = parse_derivative(p.substr(colon + 1), cfg);
            if (a == b) throw UsageError("pair needs two distinct derivatives: " + p);
            todo.emplace_back(a, b);
        }
    }
    if (todo.empty()) throw UsageError("this configuration has a single derivative direction");

    rw::io::RunReport report{"flatness", rw::io::config_digest(cfg), common.seed, {}, 0.0};
    std::printf("%-12s %-14s %-14s %-14s %s\n", "pair", "residual", "central(h)", "central(h/2)",
                "ratio");
    for (const auto& [a, b] : todo) {
        const double r = rw::connection::flatness_residual(cfg, a, b, h, convention, true);
        const double c1 = rw::connection::flatness_residual(cfg, a, b, h, convention, false);
        const double c2 = rw::connection::flatness_residual(cfg, a, b, h / 2.0, convention, false);
        const std::string id = a.label() + ":" + b.label();
        std::printf("%-12s %-14s %-14s %-14s %.2f\n", id.c_str(), fmt(r).c_str(), fmt(c1).c_str(),
                    fmt(c2).c_str(), c1 / c2);
        char detail[96];
        std::snprintf(detail, sizeof detail, "central %.3e -> %.3e, ratio %.2f", c1, c2, c1 / c2);
        report.checks.push_back({id, r, tol, std::isfinite(r) && r < tol, detail});
    }
    return finish(report, common, start);
}

int cmd_verify_ode(const Common& common, const std::string& cycle_path,
                   const std::vector<std::string>& derivs, double h,
                   const std::vector<double>& sweep, double tol, double radius) {
    const auto start = std::chrono::steady_clock::now();
    const auto cfg = load_valid(common.config_path);
    auto desc = rw::io::load_cycle(cycle_path);
    if (radius > 0.0) desc.radius = radius;
    const auto cycle = rw::io::build_cycle(desc, cfg);
    rw::integrator::validate_geometry(cycle, cfg);

    std::vector<Derivative> ds;
    for (const auto& d : derivs) ds.push_back(parse_derivative(d, cfg));
    if (ds.empty()) ds = rw::connection::derivatives(cfg);
    const std::vector<double> steps = sweep.empty() ? std::vector<double>{h} : sweep;

    const auto exec = execution_of(common);
    rw::integrator::IntegrationOptions iopts;
    iopts.execution = exec;
    const auto plan = rw::integrator::plan_quadrature(cycle, cfg, rw::integrator::form_integrand(),
                                                      rw::euler_characteristic(cfg.n1(), cfg.n2()),
                                                      iopts);

    rw::io::RunReport report{"verify-ode", rw::io::config_digest(cfg), common.seed, {}, 0.0};
    std::printf("%-8s %-12s %-14s %s\n", "deriv", "h", "residual", "ratio");
    for (const auto& d : ds) {
        const auto rows = rw::integrator::verify_ode_sweep(d, cycle, cfg, steps, plan, exec);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::string ratio = "-";
            if (i > 0) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.2f (h ratio %.2f)",
                              rows[i - 1].residual / rows[i].residual, rows[i - 1].h / rows[i].h);
                ratio = buf;
            }
            std::printf("%-8s %-12s %-14s %s\n", d.label().c_str(), fmt(rows[i].h).c_str(),
                        fmt(rows[i].residual).c_str(), ratio.c_str());
        }
        // The check is decided at the smallest step; the others document the decay.
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].h < rows[best].h) best = i;
        }
        const double r = rows[best].residual;
        report.checks.push_back({d.label(), r, tol, std::isfinite(r) && r < tol,
                                 "h = " + fmt(rows[best].h)});
    }
    return finish(report, common, start);
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("RW_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("RW_SEED is not an unsigned integer: ") + env);
        }
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Riemann-Wirtinger integrals on the torus: identities, connection matrices, checks"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);

    Common common;
    try {
        common.seed = default_seed();
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }

    const auto add_common = [&](CLI::App* sub, bool with_report) {
        sub->add_option("config", common.config_path, "configuration JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "random seed (default: RW_SEED or 1)");
        if (with_report) sub->add_option("--report", common.report_path, "write the run report as JSON");
        sub->add_flag("--serial", common.serial, "use the serial reference kernels");
    };

    auto* validate = app.add_subcommand("validate", "check a configuration against the assumptions");
    add_common(validate, false);

    int samples = 100;
    double id_tol = 1e-9;
    auto* identities = app.add_subcommand("identities", "run the identity suite on random samples");
    add_common(identities, true);
    identities->add_option("--samples", samples, "samples per check")->check(CLI::PositiveNumber);
    identities->add_option("--tol", id_tol, "relative residual tolerance");

    std::string deriv = "1,1";
    std::string out;
    std::string csv;
    bool as_printed = false;
    auto* connection = app.add_subcommand("connection", "export one connection matrix");
    add_common(connection, false);
    connection->add_option("--deriv", deriv, "derivative direction k,p");
    connection->add_option("--out", out, "JSON output path (default: stdout)");
    connection->add_option("--csv", csv, "also write re+imi cells as CSV");
    connection->add_flag("--as-printed", as_printed, "corner rows without the lambda factor");

    std::vector<std::string> pairs;
    double flat_h = 1e-4;
    double flat_tol = 1e-5;
    auto* flatness = app.add_subcommand("flatness", "integrability residuals of derivative pairs");
    add_common(flatness, true);
    flatness->add_option("--pairs", pairs, "all, or pairs k,p:k,p (repeatable)");
    flatness->add_option("--h", flat_h, "finite-difference step")->check(CLI::PositiveNumber);
    flatness->add_option("--tol", flat_tol, "residual tolerance");
    flatness->add_flag("--as-printed", as_printed, "corner rows without the lambda factor");

    std::string cycle_path;
    std::vector<std::string> ode_derivs;
    double ode_h = 1e-4;
    double ode_tol = 1e-3;
    double radius = 0.0;
    std::vector<double> sweep;
    auto* verify = app.add_subcommand("verify-ode", "compare dF with A F on a product cycle");
    add_common(verify, true);
    verify->add_option("cycle", cycle_path, "cycle JSON")->required()->check(CLI::ExistingFile);
    verify->add_option("--deriv", ode_derivs, "derivative directions k,p (default: all)");
    verify->add_option("--h", ode_h, "finite-difference step")->check(CLI::PositiveNumber);
    verify->add_option("--sweep", sweep, "several steps; prints a convergence table")->delimiter(',');
    verify->add_option("--tol", ode_tol, "relative residual tolerance");
    verify->add_option("--radius", radius, "override the Pochhammer circle radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (*validate) return cmd_validate(common);
        if (*identities) return cmd_identities(common, samples, id_tol);
        if (*connection) return cmd_connection(common, deriv, out, csv, as_printed);
        if (*flatness) return cmd_flatness(common, pairs, flat_h, flat_tol, as_printed);
        if (*verify) return cmd_verify_ode(common, cycle_path, ode_derivs, ode_h, sweep, ode_tol, radius);
    } catch (const rw::ParseError& e) {
        std::fprintf(stderr, "ParseError: %s\n", e.what());
        return kUsage;
    } catch (const rw::GeometryError& e) {
        std::fprintf(stderr, "GeometryError: %s\n", e.what());
        return kUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    }
    return kUsage;
}
