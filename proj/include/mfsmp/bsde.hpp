#pragma once

#include "mfsmp/brownian.hpp"
#include "mfsmp/coefficients.hpp"
#include "mfsmp/forward_sim.hpp"
#include "mfsmp/regression.hpp"

namespace mfsmp {

/// (Y, Z) on [0, T] with the per-step driver statistic of mu = law of (X, Y).
struct BackwardSolution {
    PathEnsemble y;
    PathEnsemble z;
    std::vector<double> driver_stats;  ///< index j in [0, n], computed from the final Y_j

    double driver_stat(int j) const { return driver_stats[static_cast<std::size_t>(j)]; }
    /// J(v) = average of Y(0).
    double cost() const;
    double cost_standard_error() const;
};

struct BackwardOptions {
    /// Features for E[. | F_t]; defaults to the solved trajectory itself.
    const ForwardSolution* features = nullptr;
    /// When set, the differences spread - features at t and t - l are added
    /// as regression features (both zero, hence dropped, where the paths agree).
    const ForwardSolution* spread = nullptr;
    /// Second pass that rebuilds mu_j from the updated Y_j.
    bool picard = false;
    double blowup_guard = 1e8;
};

/// Least-squares Monte Carlo sweep j = n-1..0:
/// C_j = E[Y_{j+1} | F_j], Z_j = E[(Y_{j+1} - C_j) dW_j | F_j] / dt,
/// Y_j = C_j + f(t_j, X_j, X_{j-k}, C_j, Z_j, mu_j, v_j) dt.
BackwardSolution solve_backward_mfbsde(const CoefficientSet& coeffs, const ForwardSolution& forward,
                                       const TimeGrid& grid, const BrownianBundle& bundle,
                                       const RegressionBasis& basis, const BackwardOptions& options = {});

}  // namespace mfsmp
