#include "mfsmp/csv.hpp"

#include <charconv>

namespace mfsmp {

std::string format_double(double v) {
    // Shortest text that reads back to the same double.
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

void write_ensembles_csv(std::ostream& os, const TimeGrid& grid,
                         const std::vector<std::pair<std::string, const PathEnsemble*>>& columns, int first,
                         int last, std::size_t stride) {
    os << "time,particle";
    for (const auto& c : columns) os << ',' << c.first;
    os << '\n';
    if (columns.empty()) return;
    const std::size_t n = columns.front().second->particles();
    for (int j = first; j <= last; ++j) {
        for (std::size_t i = 0; i < n; i += stride) {
            os << format_double(grid.time(j)) << ',' << i;
            for (const auto& c : columns) os << ',' << format_double(c.second->at(i, j));
            os << '\n';
        }
    }
}

}  // namespace mfsmp
