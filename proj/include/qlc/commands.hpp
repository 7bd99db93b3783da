#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qlc/config.hpp"
#include "qlc/csv.hpp"

namespace qlc {

/// Tables (file name, contents) plus a JSON summary, as written by the CLI.
struct CommandOutput {
    std::vector<std::pair<std::string, CsvTable>> tables;
    nlohmann::ordered_json summary;
};

CommandOutput cmd_boltzmann(const RunConfig& cfg);
CommandOutput cmd_match(const RunConfig& cfg);
CommandOutput cmd_pump(const RunConfig& cfg);
CommandOutput cmd_cool(const RunConfig& cfg);
CommandOutput cmd_scan(const RunConfig& cfg);
CommandOutput cmd_detect(const RunConfig& cfg);

/// Wilson score interval for k successes in n trials at ~95% (z = 1.96).
std::pair<double, double> wilson_interval(long k, long n, double z = 1.96);

/// Writes every table as <dir>/<name> and the summary as <dir>/<command>.json.
void write_outputs(const CommandOutput& out, const std::string& command,
                   const std::filesystem::path& dir);

}  // namespace qlc
