#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "mfsmp/path_ensemble.hpp"
#include "mfsmp/time_grid.hpp"

namespace mfsmp {

/// Shortest text that reads back to the same double.
std::string format_double(double v);

/// Writes `time,particle,<name>...` rows for the given ensembles on columns
/// [first, last] of the grid. Every `stride`-th particle is written.
void write_ensembles_csv(std::ostream& os, const TimeGrid& grid,
                         const std::vector<std::pair<std::string, const PathEnsemble*>>& columns, int first,
                         int last, std::size_t stride = 1);

}  // namespace mfsmp
