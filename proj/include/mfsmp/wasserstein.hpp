#pragma once

#include <cstdint>

#include "mfsmp/empirical_measure.hpp"

namespace mfsmp {

/// Exact W2 between 1-D empirical measures via the sorted coupling. When the
/// sample counts differ, the smaller sample is resampled with replacement to
/// the larger count using `seed`. Throws DimensionMismatch for 2-D inputs.
double wasserstein2_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::uint64_t seed = 0);

}  // namespace mfsmp
