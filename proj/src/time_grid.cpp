#include "mfsmp/time_grid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mfsmp/errors.hpp"

namespace mfsmp {

namespace {

// Integer ratio a / b, or -1 if it is not an integer to within a few ulps.
long exact_ratio(double a, double b) {
    const double q = a / b;
    const double r = std::round(q);
    const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(q));
    if (r < 1.0 || std::abs(q - r) > tol) return -1;
    return static_cast<long>(r);
}

}  // namespace

TimeGrid TimeGrid::build(double horizon, double delay, double dt) {
    if (!(horizon > 0.0) || !(delay > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("build_grid: T, l and dt must be positive");
    const long k = exact_ratio(delay, dt);
    const long n = exact_ratio(horizon, dt);
    if (k < 0 || n < 0) {
        std::ostringstream os;
        os << "l/dt = " << delay / dt << ", T/dt = " << horizon / dt << " must both be integers";
        throw NonAlignedDelay(os.str());
    }
    if (n <= k || n > 2 * k) {
        std::ostringstream os;
        os << "need l < T <= 2l, got T = " << horizon << ", l = " << delay;
        throw DelayRegime(os.str());
    }
    // dt is re-derived from l so that k * dt reproduces l.
    return TimeGrid(delay / static_cast<double>(k), static_cast<int>(n), static_cast<int>(k));
}

int TimeGrid::index_of(double t) const {
    return static_cast<int>(std::lround(t / dt_));
}

}  // namespace mfsmp
