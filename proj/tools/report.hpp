#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mfsmp::cli {

/// One check: passes when estimate <= tolerance.
struct CheckRow {
    std::string id;
    double estimate = 0;
    double tolerance = 0;
    bool pass() const { return estimate <= tolerance; }
};

class RunReport {
public:
    void add(std::string id, double estimate, double tolerance);
    /// Passes iff `value` is strictly below `bound`.
    void add_strictly_below(std::string id, double value, double bound);
    void note(std::string line);

    const std::vector<CheckRow>& rows() const { return rows_; }
    const std::vector<std::string>& notes() const { return notes_; }
    bool all_pass() const;

    /// check,estimate,tolerance,verdict
    void write_csv(const std::filesystem::path& path) const;
    /// Deterministic summary: version, suite, seed, verdicts, notes, config echo.
    void write_summary(const std::filesystem::path& path, const std::string& suite, unsigned long long seed,
                       const std::string& config_echo) const;

private:
    std::vector<CheckRow> rows_;
    std::vector<std::string> notes_;
};

inline constexpr const char* kVersion = "mfsmp 1.0.0";

}  // namespace mfsmp::cli
