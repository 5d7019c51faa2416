#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mfsmp/time_grid.hpp"

namespace mfsmp {

/// N scalar paths on the grid. Columns 0..last are stored per particle
/// (step-major). The initial segment on [-k, -1] is deterministic and shared
/// by all particles. Reads past `last` return 0, which realises the zero
/// tails on (T, T + l] required by the adjoint equations.
class PathEnsemble {
public:
    PathEnsemble() = default;
    PathEnsemble(std::size_t particles, int delay_steps, int last, std::vector<double> prefix);

    /// Forward process with deterministic initial path x(theta) on [-l, 0].
    static PathEnsemble with_initial_path(const TimeGrid& grid, std::size_t particles,
                                          const std::function<double(double)>& init);
    /// Zero initial segment, columns 0..n (variational, adjoint and BSDE processes).
    static PathEnsemble zeros(const TimeGrid& grid, std::size_t particles);

    std::size_t particles() const { return particles_; }
    int delay_steps() const { return k_; }
    int last_index() const { return last_; }

    /// Value of particle i at grid index j. Indices below -k read the
    /// initial segment at -k.
    double at(std::size_t i, int j) const {
        if (j > last_) return 0.0;
        if (j < 0) return prefix_[static_cast<std::size_t>(std::max(j, -k_) + k_)];
        return data_[static_cast<std::size_t>(j) * particles_ + i];
    }
    /// at(i, j - k): no interpolation.
    double delayed(std::size_t i, int j) const { return at(i, j - k_); }

    void set(std::size_t i, int j, double v) { data_[static_cast<std::size_t>(j) * particles_ + i] = v; }

    std::span<double> slice(int j) {
        return {data_.data() + static_cast<std::size_t>(j) * particles_, particles_};
    }
    std::span<const double> slice(int j) const {
        return {data_.data() + static_cast<std::size_t>(j) * particles_, particles_};
    }
    /// Shared initial-segment value at index j in [-k, -1].
    double prefix(int j) const { return prefix_[static_cast<std::size_t>(j + k_)]; }

    /// Fills `out` with column j, including prefix and zero-tail columns.
    void column(int j, std::span<double> out) const;

private:
    std::size_t particles_ = 0;
    int k_ = 0;
    int last_ = -1;
    std::vector<double> prefix_;
    std::vector<double> data_;
};

}  // namespace mfsmp
