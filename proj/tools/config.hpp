#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mfsmp/expansion.hpp"
#include "mfsmp/finance.hpp"
#include "mfsmp/models.hpp"
#include "mfsmp/regression.hpp"

namespace mfsmp::cli {

/// Every experiment setting. Grid times are in the units of the horizon;
/// spike start and widths are fractions of T.
struct ExperimentConfig {
    std::string suite;
    double T = 1.5, l = 1.0, dt = 1e-3;
    std::size_t particles = 10000;
    std::uint64_t seed = 42;
    std::string model;  ///< empty: the suite's default model
    double tau_fraction = 0.6;
    double eps_fraction = 0.1;
    std::vector<double> eps_fractions{0.2, 0.1, 0.05, 0.025};
    RegressionBasis basis;
    bool picard = false;
    std::optional<double> control_lo, control_hi;
    std::optional<int> control_points;
    std::size_t max_cells = 10000;
    std::vector<std::string> targets;  ///< empty: all rate targets
    MarketModel market;
    InvestorModel investor;
    double alpha = 0.03, beta = 0.01, appreciation = 0.07, volatility = 0.2;
    int iterations = 5;
    double shift = 0.5;
    NPlayerConfig nplayer;
    CustomTable custom;
    int threads = 0;
    std::string out = "out";
};

/// Reads a flat INI file. Throws ConfigError naming the line and key for
/// unknown sections or keys, malformed values and failed preconditions.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Defaults with the market functions wired to the scalar fields.
ExperimentConfig default_config();

/// Re-derives the market model from the scalar fields after overrides.
void finalize(ExperimentConfig& c);

/// Precondition checks shared by file and default configs.
void validate(const ExperimentConfig& c);

/// INI text that reproduces the configuration when loaded.
std::string echo(const ExperimentConfig& c);

std::vector<double> parse_list(const std::string& text, const std::string& key);

}  // namespace mfsmp::cli
