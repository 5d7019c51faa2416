#include "mfsmp/path_ensemble.hpp"

#include <algorithm>
#include <stdexcept>

namespace mfsmp {

PathEnsemble::PathEnsemble(std::size_t particles, int delay_steps, int last, std::vector<double> prefix)
    : particles_(particles), k_(delay_steps), last_(last), prefix_(std::move(prefix)) {
    if (particles_ == 0) throw std::invalid_argument("PathEnsemble: need at least one particle");
    if (prefix_.size() != static_cast<std::size_t>(k_))
        throw std::invalid_argument("PathEnsemble: prefix must hold k values");
    data_.assign(static_cast<std::size_t>(last_ + 1) * particles_, 0.0);
}

PathEnsemble PathEnsemble::with_initial_path(const TimeGrid& grid, std::size_t particles,
                                             const std::function<double(double)>& init) {
    const int k = grid.delay_steps();
    std::vector<double> prefix(static_cast<std::size_t>(k));
    for (int j = -k; j < 0; ++j) prefix[static_cast<std::size_t>(j + k)] = init(grid.time(j));
    PathEnsemble e(particles, k, grid.steps(), std::move(prefix));
    std::fill_n(e.data_.begin(), particles, init(0.0));
    return e;
}

PathEnsemble PathEnsemble::zeros(const TimeGrid& grid, std::size_t particles) {
    return PathEnsemble(particles, grid.delay_steps(), grid.steps(),
                        std::vector<double>(static_cast<std::size_t>(grid.delay_steps()), 0.0));
}

void PathEnsemble::column(int j, std::span<double> out) const {
    if (j >= 0 && j <= last_) {
        std::copy(slice(j).begin(), slice(j).end(), out.begin());
        return;
    }
    std::fill(out.begin(), out.end(), at(0, j));
}

}  // namespace mfsmp
