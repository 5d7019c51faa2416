#pragma once

#include <stdexcept>
#include <string>

namespace mfsmp {

/// Base for every error raised by the library. `kind()` is the stable
/// error name surfaced by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define MFSMP_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name, what) {}    \
    };

MFSMP_DEFINE_ERROR(NonAlignedDelay)
MFSMP_DEFINE_ERROR(DelayRegime)
MFSMP_DEFINE_ERROR(DimensionMismatch)
MFSMP_DEFINE_ERROR(NumericalBlowup)
MFSMP_DEFINE_ERROR(RankDeficient)
MFSMP_DEFINE_ERROR(InsufficientGrid)
MFSMP_DEFINE_ERROR(NoConvergence)
MFSMP_DEFINE_ERROR(ModelInvariant)
MFSMP_DEFINE_ERROR(ConfigError)

#undef MFSMP_DEFINE_ERROR

}  // namespace mfsmp
