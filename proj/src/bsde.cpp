#include "mfsmp/bsde.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "step_data.hpp"

namespace mfsmp {

double BackwardSolution::cost() const { return kernels::mean(y.slice(0)); }

double BackwardSolution::cost_standard_error() const { return kernels::standard_error(y.slice(0)); }

BackwardSolution solve_backward_mfbsde(const CoefficientSet& coeffs, const ForwardSolution& forward,
                                       const TimeGrid& grid, const BrownianBundle& bundle,
                                       const RegressionBasis& basis, const BackwardOptions& options) {
    const int n = grid.steps();
    const std::size_t N = forward.x.particles();
    const double dt = grid.dt();
    const ForwardSolution& feat = options.features ? *options.features : forward;

    BackwardSolution sol;
    sol.y = PathEnsemble::zeros(grid, N);
    sol.z = PathEnsemble::zeros(grid, N);
    sol.driver_stats.assign(static_cast<std::size_t>(n + 1), 0.0);

    {
        auto yn = sol.y.slice(n);
        const double m = forward.terminal_stat;
        kernels::parallel_for(N, [&](std::size_t i) { yn[i] = coeffs.terminal ? coeffs.terminal(forward.x.at(i, n), m).value : 0.0; });
        sol.driver_stats[static_cast<std::size_t>(n)] = inner_mean(coeffs.driver_inner, forward.x.slice(n), yn);
    }

    std::atomic<bool> blown{false};
    for (int j = n - 1; j >= 0; --j) {
        const LeastSquaresProjector proj(
            options.spread ? spread_features(feat, *options.spread, j) : step_features(feat, j), basis);
        const auto next = sol.y.slice(j + 1);
        const auto [cont, z] = conditional_step(proj, next, bundle.step(j), dt);
        auto zj = sol.z.slice(j);
        std::copy(z.begin(), z.end(), zj.begin());

        const double t = grid.time(j);
        auto yj = sol.y.slice(j);
        auto sweep = [&](std::span<const double> y_for_law) {
            const double m = inner_mean(coeffs.driver_inner, forward.x.slice(j), y_for_law);
            kernels::parallel_for(N, [&](std::size_t i) {
                const double f = coeffs.driver ? coeffs.driver({t, forward.x.at(i, j), forward.x.delayed(i, j), cont[i],
                                                                z[i], m, forward.control.at(i, j)})
                                                     .value
                                               : 0.0;
                yj[i] = cont[i] + f * dt;
                if (!(std::abs(yj[i]) <= options.blowup_guard)) blown = true;
            });
        };
        sweep(cont);
        if (options.picard) {
            const std::vector<double> first(yj.begin(), yj.end());
            sweep(first);
        }
        if (blown) {
            std::ostringstream os;
            os << "|Y| exceeded " << options.blowup_guard << " at t = " << t;
            throw NumericalBlowup(os.str());
        }
        sol.driver_stats[static_cast<std::size_t>(j)] = inner_mean(coeffs.driver_inner, forward.x.slice(j), yj);
    }
    return sol;
}

}  // namespace mfsmp
