#pragma once

namespace mfsmp {

/// Uniform grid on [-l, T + l] with the delay an exact multiple of the step.
/// Index i maps to time i * dt; indices run from -k to n + k.
class TimeGrid {
public:
    /// Throws NonAlignedDelay or DelayRegime.
    static TimeGrid build(double horizon, double delay, double dt);

    double horizon() const { return n_ * dt_; }
    double delay() const { return k_ * dt_; }
    double dt() const { return dt_; }
    int steps() const { return n_; }
    int delay_steps() const { return k_; }
    int first_index() const { return -k_; }
    int last_index() const { return n_ + k_; }

    double time(int i) const { return i * dt_; }
    /// Nearest grid index to t.
    int index_of(double t) const;

private:
    TimeGrid(double dt, int n, int k) : dt_(dt), n_(n), k_(k) {}
    double dt_;
    int n_;
    int k_;
};

inline TimeGrid build_grid(double horizon, double delay, double dt) {
    return TimeGrid::build(horizon, delay, dt);
}

}  // namespace mfsmp
