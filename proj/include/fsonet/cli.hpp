#pragma once

#include "fsonet/scenario.hpp"

#include <filesystem>
#include <ostream>

namespace fsonet::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitData = 2,
    kExitInternal = 3,
};

/// Parses the command line and runs one subcommand. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// summary.csv, correlation.csv, one directory of CSVs per configuration and
/// the SVG charts.
void write_sweep(const scenario::Scenario& scenario, const scenario::JoinedData& joined,
                 const scenario::SweepResult& sweep, const std::filesystem::path& out_dir);

/// Directory-safe form of a configuration name.
std::string directory_name(std::string_view name);

}  // namespace fsonet::cli
