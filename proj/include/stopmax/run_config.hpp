#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "stopmax/boundary_solver.hpp"
#include "stopmax/dp_oracle.hpp"

namespace stopmax {

struct McConfig {
    double dt = 0.0;  ///< 0 selects 1e-3 T
    std::size_t n_paths = 1000000;
    std::uint64_t seed = 1;
    bool operator==(const McConfig&) const = default;
};

/// Everything needed to reproduce one CLI run. Worker count is deliberately absent
/// from the serialized form because it never changes any output.
struct RunConfig {
    std::string command = "solve";
    ProblemSpec spec;
    SolverConfig solver;
    McConfig mc;
    DpConfig dp;
    std::string factors = "1,2,4";  ///< convergence multipliers
    int value_times = 11;
    int value_levels = 31;
    double value_x_max = 0.0;       ///< 0 selects 3 sqrt(T)
    std::string table_path;         ///< optional boundary CSV to reuse
    std::string out_path;
    int workers = 1;

    void validate() const;
    double resolved_dt() const { return mc.dt > 0.0 ? mc.dt : 1e-3 * spec.horizon; }
    /// `key=value` pairs separated by single spaces, in a fixed key order.
    std::string serialize() const;
};

/// Applies one `key = value` setting; unknown keys or malformed values throw ConfigError.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` file, `#` comments, blank lines ignored.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Inverse of RunConfig::serialize.
RunConfig parse_serialized(const std::string& line);

std::uint64_t fnv1a64(const std::string& data);

/// Header comment lines, then the body. The header records the configuration
/// and a hash of the body.
std::string make_artifact(const RunConfig& cfg, const std::string& body, const std::string& summary = {});

struct Artifact {
    std::map<std::string, std::string> header;  ///< "config", "content-hash", ...
    std::string body;
};

/// Parses an artifact and verifies its content hash.
Artifact parse_artifact(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace stopmax
