#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "report.hpp"

namespace mfsmp::cli {

const std::vector<std::string>& suite_names();

/// Model used by a suite when the config names none.
std::string default_model(const std::string& suite);

/// Resolves the model and checks every precondition without touching the
/// filesystem. Throws ConfigError.
Scenario resolve_scenario(const ExperimentConfig& config);

/// Runs one suite and writes its trace CSVs into `out`. Library errors other
/// than ConfigError become a failing `error.<Kind>` row.
RunReport run_suite(const ExperimentConfig& config, const std::filesystem::path& out);

/// resolve_scenario, run_suite, then report.csv and summary.txt. ConfigError
/// escapes before any output is written.
RunReport execute(const ExperimentConfig& config, const std::filesystem::path& out);

}  // namespace mfsmp::cli
