#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mfsmp/path_ensemble.hpp"
#include "mfsmp/time_grid.hpp"

namespace mfsmp {

/// Open-loop t -> U or feedback (t, x, x') -> U control.
class ControlSpec {
public:
    using OpenLoop = std::function<double(double)>;
    using Feedback = std::function<double(double, double, double)>;

    ControlSpec() : open_([](double) { return 0.0; }) {}
    static ControlSpec open_loop(OpenLoop u);
    static ControlSpec feedback(Feedback u);
    static ControlSpec constant(double c);
    /// Piecewise constant on grid steps: value[j] on [t_j, t_{j+1}).
    static ControlSpec tabulated(const TimeGrid& grid, std::vector<double> values);

    bool is_open_loop() const { return static_cast<bool>(open_); }
    double operator()(double t, double x, double xd) const { return open_ ? open_(t) : feedback_(t, x, xd); }

private:
    OpenLoop open_;
    Feedback feedback_;
};

/// Realised control values v_i(t_j) for j in [0, n]; shared across particles
/// when the control is deterministic.
class ControlTrace {
public:
    ControlTrace() = default;
    ControlTrace(std::size_t particles, int steps, bool shared);

    bool shared() const { return shared_; }
    std::size_t particles() const { return particles_; }
    int steps() const { return steps_; }
    double at(std::size_t i, int j) const {
        return shared_ ? data_[static_cast<std::size_t>(j)] : data_[static_cast<std::size_t>(j) * particles_ + i];
    }
    void set(std::size_t i, int j, double v) {
        data_[shared_ ? static_cast<std::size_t>(j) : static_cast<std::size_t>(j) * particles_ + i] = v;
    }

private:
    std::size_t particles_ = 0;
    int steps_ = 0;
    bool shared_ = true;
    std::vector<double> data_;
};

/// Needle variation: the alternate control on E = [tau, tau + eps), base elsewhere.
/// tau and eps are snapped to whole grid steps.
struct SpikeVariation {
    ControlSpec alternate;
    int first_step = 0;
    int width_steps = 0;
    double dt = 0;

    double tau() const { return first_step * dt; }
    double eps() const { return width_steps * dt; }
    bool active(int j) const { return j >= first_step && j < first_step + width_steps; }
};

/// Throws std::invalid_argument unless [tau, tau + eps) lies in [0, T].
SpikeVariation make_spike(const TimeGrid& grid, ControlSpec alternate, double tau, double eps);

/// Realises an open-loop control (shared trace) or evaluates a feedback on `path`.
ControlTrace realize_control(const ControlSpec& control, const PathEnsemble& path, const TimeGrid& grid);

/// Control process of the spiked run: the base trace off the spike and the
/// alternate evaluated along the base path on it.
ControlTrace spiked_trace(const ControlTrace& base, const SpikeVariation& spike, const PathEnsemble& base_path,
                          const TimeGrid& grid);

}  // namespace mfsmp
