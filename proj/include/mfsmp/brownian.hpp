#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfsmp/time_grid.hpp"

namespace mfsmp {

/// Brownian increments dW_i(t_j) for particles i < N and steps j in [0, n).
/// Particle i's stream depends only on (seed, i), so adding particles leaves
/// existing streams untouched. Stored step-major.
class BrownianBundle {
public:
    BrownianBundle(const TimeGrid& grid, std::size_t particles, std::uint64_t seed);

    std::size_t particles() const { return particles_; }
    int steps() const { return steps_; }
    std::uint64_t seed() const { return seed_; }
    double dt() const { return dt_; }

    double increment(std::size_t particle, int step) const {
        return data_[static_cast<std::size_t>(step) * particles_ + particle];
    }
    /// Increments of all particles over step j.
    std::span<const double> step(int j) const {
        return {data_.data() + static_cast<std::size_t>(j) * particles_, particles_};
    }

private:
    std::size_t particles_;
    int steps_;
    std::uint64_t seed_;
    double dt_;
    std::vector<double> data_;
};

inline BrownianBundle sample_brownian(const TimeGrid& grid, std::size_t particles, std::uint64_t seed) {
    return BrownianBundle(grid, particles, seed);
}

}  // namespace mfsmp
