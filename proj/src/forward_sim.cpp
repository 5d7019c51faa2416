#include "mfsmp/forward_sim.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "step_data.hpp"

namespace mfsmp {

namespace {

void fill_prefix_stats(const CoefficientSet& coeffs, ForwardSolution& sol, int k) {
    sol.drift_stats.assign(sol.drift_stats.size(), 0.0);
    sol.diffusion_stats.assign(sol.diffusion_stats.size(), 0.0);
    for (int j = -k; j < 0; ++j) {
        const double x = sol.x.prefix(j);
        sol.drift_stats[static_cast<std::size_t>(j + k)] = coeffs.drift_inner(x);
        sol.diffusion_stats[static_cast<std::size_t>(j + k)] = coeffs.diffusion_inner(x);
    }
}

// Shared Euler loop; `control_at(i, j, x, xd)` returns and records v_i(t_j).
template <class ControlAt>
ForwardSolution run_forward(const CoefficientSet& coeffs, const TimeGrid& grid, const BrownianBundle& bundle,
                            const InitialPath& init, const ForwardOptions& options, ControlTrace trace,
                            ControlAt&& control_at) {
    const int n = grid.steps(), k = grid.delay_steps();
    const std::size_t N = bundle.particles();
    const double dt = grid.dt();
    ForwardSolution sol;
    sol.x = PathEnsemble::with_initial_path(grid, N, init);
    sol.drift_stats.resize(static_cast<std::size_t>(n + k + 1));
    sol.diffusion_stats.resize(static_cast<std::size_t>(n + k + 1));
    fill_prefix_stats(coeffs, sol, k);
    sol.control = std::move(trace);

    std::atomic<bool> blown{false};
    for (int j = 0; j <= n; ++j) {
        const auto xj = sol.x.slice(j);
        sol.drift_stats[static_cast<std::size_t>(j + k)] = inner_mean(coeffs.drift_inner, xj);
        sol.diffusion_stats[static_cast<std::size_t>(j + k)] = inner_mean(coeffs.diffusion_inner, xj);
        if (j == n) {
            for (std::size_t i = 0; i < N; ++i) control_at(sol.control, i, j, sol.x.at(i, j), sol.x.delayed(i, j));
            break;
        }
        const double t = grid.time(j);
        const double mb = sol.drift_stat(j), ms = sol.diffusion_stat(j);
        const auto dw = bundle.step(j);
        auto next = sol.x.slice(j + 1);
        kernels::parallel_for(N, [&](std::size_t i) {
            const double x = xj[i], xd = sol.x.delayed(i, j);
            const double v = control_at(sol.control, i, j, x, xd);
            const double b = coeffs.drift ? coeffs.drift({t, x, xd, mb, v}).value : 0.0;
            const double s = coeffs.diffusion ? coeffs.diffusion({t, x, xd, ms, v}).value : 0.0;
            const double y = x + b * dt + s * dw[i];
            next[i] = y;
            if (!(std::abs(y) <= options.blowup_guard)) blown = true;
        });
        if (blown) {
            std::ostringstream os;
            os << "|X| exceeded " << options.blowup_guard << " at t = " << grid.time(j + 1);
            throw NumericalBlowup(os.str());
        }
    }
    sol.terminal_stat = inner_mean(coeffs.terminal_inner, sol.x.slice(n));
    return sol;
}

}  // namespace

ForwardSolution simulate_forward(const CoefficientSet& coeffs, const ControlSpec& control, const TimeGrid& grid,
                                 const BrownianBundle& bundle, const InitialPath& init,
                                 const ForwardOptions& options) {
    const bool shared = control.is_open_loop();
    ControlTrace trace(bundle.particles(), grid.steps(), shared);
    if (shared)
        for (int j = 0; j <= grid.steps(); ++j) trace.set(0, j, control(grid.time(j), 0.0, 0.0));
    return run_forward(coeffs, grid, bundle, init, options, std::move(trace),
                       [&](ControlTrace& tr, std::size_t i, int j, double x, double xd) {
                           if (shared) return tr.at(i, j);
                           const double v = control(grid.time(j), x, xd);
                           tr.set(i, j, v);
                           return v;
                       });
}

ForwardSolution simulate_forward(const CoefficientSet& coeffs, const ControlTrace& control, const TimeGrid& grid,
                                 const BrownianBundle& bundle, const InitialPath& init,
                                 const ForwardOptions& options) {
    return run_forward(coeffs, grid, bundle, init, options, control,
                       [](ControlTrace& tr, std::size_t i, int j, double, double) { return tr.at(i, j); });
}

ForwardSolution simulate_spiked(const CoefficientSet& coeffs, const ForwardSolution& base,
                                const SpikeVariation& spike, const TimeGrid& grid, const BrownianBundle& bundle,
                                const InitialPath& init, const ForwardOptions& options) {
    return simulate_forward(coeffs, spiked_trace(base.control, spike, base.x, grid), grid, bundle, init, options);
}

}  // namespace mfsmp
