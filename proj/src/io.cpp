#include "rw/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rw/errors.hpp"

namespace rw::io {
namespace {

using nlohmann::json;

/// 1-based line and column of byte offset `pos` (0-based) in `text`.
std::pair<int, int> line_column(const std::string& text, std::size_t pos) {
    pos = std::min(pos, text.size());
    int line = 1;
    int col = 1;
    for (std::size_t i = 0; i < pos; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

/// Where a key first appears, so schema errors point at the offending entry.
[[noreturn]] void schema_error(const std::string& text, const std::string& key,
                               const std::string& what) {
    const auto at = text.find("\"" + key + "\"");
    const auto [line, col] = at == std::string::npos ? std::pair{1, 1} : line_column(text, at);
    std::ostringstream msg;
    msg << "line " << line << ", column " << col << ": " << what;
    throw ParseError(msg.str(), line, col);
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        const auto [line, col] = line_column(text, byte);
        std::ostringstream msg;
        msg << "line " << line << ", column " << col << ": malformed JSON";
        throw ParseError(msg.str(), line, col);
    }
}

cplx complex_of(const json& v, const std::string& text, const std::string& key) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        schema_error(text, key, "\"" + key + "\" must be a complex number written as [re, im]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<cplx> complex_list(const json& v, const std::string& text, const std::string& key) {
    if (!v.is_array()) schema_error(text, key, "\"" + key + "\" must be a list of [re, im] pairs");
    std::vector<cplx> out;
    for (const auto& item : v) out.push_back(complex_of(item, text, key));
    return out;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json complex_list_json(const std::vector<cplx>& v) {
    json out = json::array();
    for (const cplx z : v) out.push_back(complex_json(z));
    return out;
}

const std::set<std::string> kConfigKeys = {"tau", "t1", "t2", "c", "c10", "c20",
                                           "c1", "c2", "c1_inf", "c2_inf"};

integrator::CyclePair pair_of(const json& v, const std::string& text, const std::string& key) {
    using Kind = integrator::CyclePair::Kind;
    if (!v.is_object()) schema_error(text, key, "\"" + key + "\" must be an object");
    integrator::CyclePair p;
    if (v.contains("pair")) {
        const auto& tag = v["pair"];
        std::string s;
        if (tag.is_string()) {
            s = tag.get<std::string>();
        } else if (tag.is_number_integer()) {
            s = std::to_string(tag.get<int>());
        } else {
            schema_error(text, "pair", "\"pair\" must be \"0\", \"inf\" or a point index");
        }
        if (s == "0") {
            p.kind = Kind::kPeriodOne;
        } else if (s == "inf") {
            p.kind = Kind::kPeriodTau;
        } else {
            try {
                std::size_t used = 0;
                p.j = std::stoi(s, &used);
                if (used != s.size()) throw std::invalid_argument(s);
            } catch (const std::exception&) {
                schema_error(text, "pair", "\"pair\" must be \"0\", \"inf\" or a point index");
            }
            p.kind = Kind::kPoint;
        }
        return p;
    }
    if (v.contains("a") && v.contains("b")) {
        p.kind = Kind::kExplicit;
        p.a = complex_of(v["a"], text, "a");
        p.b = complex_of(v["b"], text, "b");
        return p;
    }
    schema_error(text, key, "\"" + key + "\" needs either \"pair\" or both \"a\" and \"b\"");
}

}  // namespace

ProblemConfig parse_config(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ParseError("line 1, column 1: configuration must be a JSON object", 1, 1);
    for (const auto& [key, value] : j.items()) {
        if (!kConfigKeys.count(key)) schema_error(text, key, "unknown field \"" + key + "\"");
    }
    for (const auto& key : kConfigKeys) {
        if (!j.contains(key)) {
            throw ParseError("line 1, column 1: missing field \"" + key + "\"", 1, 1);
        }
    }
    ProblemConfig cfg;
    const cplx tau = complex_of(j["tau"], text, "tau");
    try {
        cfg.tau = ModularParam(tau);
    } catch (const std::invalid_argument& e) {
        schema_error(text, "tau", e.what());
    }
    cfg.t1 = complex_list(j["t1"], text, "t1");
    cfg.t2 = complex_list(j["t2"], text, "t2");
    cfg.c = complex_of(j["c"], text, "c");
    cfg.c10 = complex_of(j["c10"], text, "c10");
    cfg.c20 = complex_of(j["c20"], text, "c20");
    cfg.c1 = complex_list(j["c1"], text, "c1");
    cfg.c2 = complex_list(j["c2"], text, "c2");
    cfg.c1_inf = complex_of(j["c1_inf"], text, "c1_inf");
    cfg.c2_inf = complex_of(j["c2_inf"], text, "c2_inf");
    return cfg;
}

ProblemConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

nlohmann::json config_to_json(const ProblemConfig& cfg) {
    json j;
    j["tau"] = complex_json(cfg.tau.tau());
    j["t1"] = complex_list_json(cfg.t1);
    j["t2"] = complex_list_json(cfg.t2);
    j["c"] = complex_json(cfg.c);
    j["c10"] = complex_json(cfg.c10);
    j["c20"] = complex_json(cfg.c20);
    j["c1"] = complex_list_json(cfg.c1);
    j["c2"] = complex_list_json(cfg.c2);
    j["c1_inf"] = complex_json(cfg.c1_inf);
    j["c2_inf"] = complex_json(cfg.c2_inf);
    return j;
}

std::string config_digest(const ProblemConfig& cfg) {
    const std::string text = config_to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CycleSpec parse_cycle(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object()) throw ParseError("line 1, column 1: cycle must be a JSON object", 1, 1);
    for (const auto& [key, value] : j.items()) {
        if (key != "gamma1" && key != "gamma2" && key != "radius") {
            schema_error(text, key, "unknown field \"" + key + "\"");
        }
    }
    if (!j.contains("gamma1") || !j.contains("gamma2")) {
        throw ParseError("line 1, column 1: cycle needs \"gamma1\" and \"gamma2\"", 1, 1);
    }
    CycleSpec desc;
    desc.gamma1 = pair_of(j["gamma1"], text, "gamma1");
    desc.gamma2 = pair_of(j["gamma2"], text, "gamma2");
    if (j.contains("radius")) {
        if (!j["radius"].is_number()) schema_error(text, "radius", "\"radius\" must be a number");
        desc.radius = j["radius"].get<double>();
    }
    return desc;
}

CycleSpec load_cycle(const std::string& path) { return parse_cycle(read_file(path)); }

integrator::ProductCycle build_cycle(const CycleSpec& desc, const ProblemConfig& cfg) {
    return integrator::product_cycle(cfg, desc.gamma1, desc.gamma2, desc.radius);
}

std::string csv_cell(cplx z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

nlohmann::json matrix_to_json(const connection::ConnectionMatrix& m) {
    json j;
    j["derivative"] = {{"k", m.deriv.k}, {"p", m.deriv.p}};
    j["size"] = m.entries.rows();
    json legend = json::array();
    for (const auto& idx : m.legend) legend.push_back(idx.label());
    j["legend"] = legend;
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.entries.cols(); ++c) row.push_back(complex_json(m.entries(r, c)));
        rows.push_back(row);
    }
    j["entries"] = rows;
    return j;
}

std::string matrix_to_csv(const connection::ConnectionMatrix& m) {
    std::ostringstream out;
    for (Eigen::Index r = 0; r < m.entries.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.entries.cols(); ++c) {
            if (c) out << ',';
            out << csv_cell(m.entries(r, c));
        }
        out << '\n';
    }
    return out.str();
}

bool RunReport::pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckLine& c) { return c.pass; });
}

nlohmann::json RunReport::to_json() const {
    json j;
    j["command"] = command;
    j["config_digest"] = config_digest;
    j["seed"] = seed;
    j["pass"] = pass();
    j["wall_time_s"] = wall_time;
    json list = json::array();
    for (const auto& c : checks) {
        json e = {{"id", c.id}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}};
        if (!c.detail.empty()) e["detail"] = c.detail;
        list.push_back(e);
    }
    j["checks"] = list;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace rw::io
