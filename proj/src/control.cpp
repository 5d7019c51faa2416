#include "mfsmp/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfsmp/kernels.hpp"

namespace mfsmp {

ControlSpec ControlSpec::open_loop(OpenLoop u) {
    ControlSpec c;
    c.open_ = std::move(u);
    c.feedback_ = nullptr;
    return c;
}

ControlSpec ControlSpec::feedback(Feedback u) {
    ControlSpec c;
    c.open_ = nullptr;
    c.feedback_ = std::move(u);
    return c;
}

ControlSpec ControlSpec::constant(double c) {
    ControlSpec s = open_loop([c](double) { return c; });
    return s;
}

ControlSpec ControlSpec::tabulated(const TimeGrid& grid, std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("ControlSpec::tabulated: no values");
    const double dt = grid.dt();
    return open_loop([dt, v = std::move(values)](double t) {
        const long j = std::lround(std::floor(t / dt + 1e-9));
        return v[static_cast<std::size_t>(std::clamp<long>(j, 0, static_cast<long>(v.size()) - 1))];
    });
}

ControlTrace::ControlTrace(std::size_t particles, int steps, bool shared)
    : particles_(particles), steps_(steps), shared_(shared),
      data_(shared ? static_cast<std::size_t>(steps + 1) : static_cast<std::size_t>(steps + 1) * particles, 0.0) {}

SpikeVariation make_spike(const TimeGrid& grid, ControlSpec alternate, double tau, double eps) {
    if (eps < 0) throw std::invalid_argument("make_spike: negative width");
    SpikeVariation s;
    s.alternate = std::move(alternate);
    s.first_step = grid.index_of(tau);
    s.width_steps = grid.index_of(eps);
    s.dt = grid.dt();
    if (s.first_step < 0 || s.first_step + s.width_steps > grid.steps())
        throw std::invalid_argument("make_spike: [tau, tau + eps) must lie in [0, T]");
    return s;
}

ControlTrace realize_control(const ControlSpec& control, const PathEnsemble& path, const TimeGrid& grid) {
    const int n = grid.steps();
    ControlTrace tr(path.particles(), n, control.is_open_loop());
    if (control.is_open_loop()) {
        for (int j = 0; j <= n; ++j) tr.set(0, j, control(grid.time(j), 0.0, 0.0));
        return tr;
    }
    for (int j = 0; j <= n; ++j)
        kernels::parallel_for(path.particles(), [&](std::size_t i) {
            tr.set(i, j, control(grid.time(j), path.at(i, j), path.delayed(i, j)));
        });
    return tr;
}

ControlTrace spiked_trace(const ControlTrace& base, const SpikeVariation& spike, const PathEnsemble& base_path,
                          const TimeGrid& grid) {
    const int n = grid.steps();
    const std::size_t N = base_path.particles();
    const bool shared = base.shared() && spike.alternate.is_open_loop();
    ControlTrace tr(N, n, shared);
    for (int j = 0; j <= n; ++j) {
        const double t = grid.time(j);
        if (shared) {
            tr.set(0, j, spike.active(j) ? spike.alternate(t, 0.0, 0.0) : base.at(0, j));
            continue;
        }
        kernels::parallel_for(N, [&](std::size_t i) {
            tr.set(i, j, spike.active(j) ? spike.alternate(t, base_path.at(i, j), base_path.delayed(i, j))
                                         : base.at(i, j));
        });
    }
    return tr;
}

}  // namespace mfsmp
