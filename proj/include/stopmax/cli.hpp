#pragma once

#include <exception>
#include <string>

#include "stopmax/run_config.hpp"

namespace stopmax {

enum ExitCode : int {
    kExitOk = 0,
    kExitOther = 1,
    kExitConfig = 2,
    kExitSpecMismatch = 3,
    kExitBracketing = 4,
    kExitTolerance = 5,
};

/// Executes one command and returns the artifact text (header + CSV body).
/// Errors propagate as the typed exceptions of errors.hpp.
std::string run(const RunConfig& cfg);

int exit_code_for(const std::exception& e);

/// One-line JSON error record: {"error": kind, "exit_code": n, "message": ...}.
std::string error_record(const std::exception& e);

/// Loads a boundary artifact written by `solve` and checks it belongs to `spec`.
BoundaryTable load_table(const std::string& path, const ProblemSpec& spec);

}  // namespace stopmax
