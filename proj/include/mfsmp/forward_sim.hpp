#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "mfsmp/brownian.hpp"
#include "mfsmp/coefficients.hpp"
#include "mfsmp/control.hpp"
#include "mfsmp/path_ensemble.hpp"

namespace mfsmp {

using InitialPath = std::function<double(double)>;

struct ForwardOptions {
    double blowup_guard = 1e8;
};

/// Forward trajectory with its realised control and the per-step measure
/// statistics of nu = law of X(t) for the drift, diffusion and terminal inner
/// functions (indices -k..n; negative indices use the initial segment).
struct ForwardSolution {
    PathEnsemble x;
    ControlTrace control;
    std::vector<double> drift_stats;
    std::vector<double> diffusion_stats;
    double terminal_stat = 0;

    double drift_stat(int j) const { return drift_stats[static_cast<std::size_t>(j + x.delay_steps())]; }
    double diffusion_stat(int j) const { return diffusion_stats[static_cast<std::size_t>(j + x.delay_steps())]; }
    /// Control at index j, clamped to [0, n].
    double control_at(std::size_t i, int j) const {
        return control.at(i, std::clamp(j, 0, control.steps()));
    }
};

/// Explicit Euler-Maruyama with beginning-of-step empirical laws.
/// Throws NumericalBlowup when |X| exceeds the guard.
ForwardSolution simulate_forward(const CoefficientSet& coeffs, const ControlSpec& control, const TimeGrid& grid,
                                 const BrownianBundle& bundle, const InitialPath& init,
                                 const ForwardOptions& options = {});

/// Same scheme driven by a pre-realised control process.
ForwardSolution simulate_forward(const CoefficientSet& coeffs, const ControlTrace& control, const TimeGrid& grid,
                                 const BrownianBundle& bundle, const InitialPath& init,
                                 const ForwardOptions& options = {});

/// Trajectory under the spiked control v^eps built from the base solution.
ForwardSolution simulate_spiked(const CoefficientSet& coeffs, const ForwardSolution& base,
                                const SpikeVariation& spike, const TimeGrid& grid, const BrownianBundle& bundle,
                                const InitialPath& init, const ForwardOptions& options = {});

/// First variational equation. Zero on [-l, 0].
PathEnsemble simulate_first_variation(const CoefficientSet& coeffs, const SpikeVariation& spike,
                                      const ForwardSolution& base, const TimeGrid& grid,
                                      const BrownianBundle& bundle, const ForwardOptions& options = {});

/// Second variational equation driven by X^1.
PathEnsemble simulate_second_variation(const CoefficientSet& coeffs, const SpikeVariation& spike,
                                       const ForwardSolution& base, const PathEnsemble& x1, const TimeGrid& grid,
                                       const BrownianBundle& bundle, const ForwardOptions& options = {});

struct QuadraticProcesses {
    PathEnsemble k;   ///< (X^1)^2
    PathEnsemble k1;  ///< X^1(t) X^1(t - l)
};

QuadraticProcesses quadratic_processes(const PathEnsemble& x1, const TimeGrid& grid);

struct KDiagnostics {
    double residual_k = 0;    ///< RMS over particles of sup_t |K_euler - K|
    double residual_k1 = 0;   ///< same for K1
    double l12_magnitude = 0; ///< E[(int |L1| + |L2| dt)^2]
    double l34_magnitude = 0; ///< E[(int |L3| + |L4| dt)^2]
};

/// Integrates the Ito dynamics of K and K1 (with the remainders L1..L4) by
/// Euler and compares them with the direct products.
KDiagnostics verify_k_dynamics(const CoefficientSet& coeffs, const SpikeVariation& spike,
                               const ForwardSolution& base, const PathEnsemble& x1, const TimeGrid& grid,
                               const BrownianBundle& bundle);

}  // namespace mfsmp
