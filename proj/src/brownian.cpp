#include "mfsmp/brownian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mfsmp/philox.hpp"

namespace mfsmp {

double standard_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    const auto w = philox_words(seed, stream, index);
    const double u1 = philox_uniform(w[0], w[1]);
    const double u2 = philox_uniform(w[2], w[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t uniform_index(std::uint64_t seed, std::uint64_t stream, std::uint64_t index, std::uint64_t bound) {
    const auto w = philox_words(seed, stream, index);
    const double u = philox_uniform(w[0], w[1]);
    const auto r = static_cast<std::uint64_t>(u * static_cast<double>(bound));
    return r < bound ? r : bound - 1;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ b);
}

BrownianBundle::BrownianBundle(const TimeGrid& grid, std::size_t particles, std::uint64_t seed)
    : particles_(particles), steps_(grid.steps()), seed_(seed), dt_(grid.dt()) {
    if (particles == 0) throw std::invalid_argument("sample_brownian: need at least one particle");
    data_.resize(static_cast<std::size_t>(steps_) * particles_);
    const double scale = std::sqrt(dt_);
    const auto n = static_cast<long>(particles_);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) {
        for (int j = 0; j < steps_; ++j)
            data_[static_cast<std::size_t>(j) * particles_ + static_cast<std::size_t>(i)] =
                scale * standard_normal(seed_, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    }
}

}  // namespace mfsmp
