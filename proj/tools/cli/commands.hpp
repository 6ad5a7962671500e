#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "cli/config.hpp"

namespace dpp::cli {

struct Invocation {
    std::string command;
    RunConfig config;
    std::optional<std::string> calibration_path;  // record read by `oc`
};

// Writes the command's primary output to `out` and a human summary (if any)
// to `report`. Returns the process exit code.
int run_weights(const Invocation& inv, std::ostream& out);
int run_calibrate(const Invocation& inv, std::ostream& out, std::ostream& report);
int run_oc(const Invocation& inv, std::ostream& out);
int run_optimize(const Invocation& inv, std::ostream& out, std::ostream& report);
int run_eess(const Invocation& inv, std::ostream& out);
int run_sweep(const Invocation& inv, std::ostream& out);

// '#'-prefixed provenance lines: version, command, seed, config hash and
// the effective config.
std::string header(const Invocation& inv);

struct CalibrationRecord {
    double tau;
    std::string design_hash;
};
CalibrationRecord read_calibration(const std::string& path);

}  // namespace dpp::cli
