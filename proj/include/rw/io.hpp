#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rw/config.hpp"
#include "rw/connection.hpp"
#include "rw/integrator.hpp"

namespace rw::io {

/// Reads a configuration; complex numbers are [re, im] pairs. Malformed JSON and
/// schema problems both raise ParseError with a 1-based line and column.
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

nlohmann::json config_to_json(const ProblemConfig& cfg);

/// 64-bit FNV-1a of the canonical JSON dump, as 16 hex digits.
std::string config_digest(const ProblemConfig& cfg);

struct CycleSpec {
    integrator::CyclePair gamma1;
    integrator::CyclePair gamma2;
    double radius = 0.05;
};

/// {"gamma1": {"pair": "0" | "inf" | "<j>"} or {"a": [re, im], "b": [re, im]},
///  "gamma2": ..., "radius": r}
CycleSpec parse_cycle(const std::string& text);
CycleSpec load_cycle(const std::string& path);

integrator::ProductCycle build_cycle(const CycleSpec& desc, const ProblemConfig& cfg);

/// "re+imi" with 17 significant digits.
std::string csv_cell(cplx z);

nlohmann::json matrix_to_json(const connection::ConnectionMatrix& m);
std::string matrix_to_csv(const connection::ConnectionMatrix& m);

struct CheckLine {
    std::string id;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::string command;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<CheckLine> checks;
    double wall_time = 0.0;

    /// True when every residual is below its tolerance.
    bool pass() const;
    nlohmann::json to_json() const;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace rw::io
