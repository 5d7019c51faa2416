#pragma once

#include <cstdint>
#include <span>
#include <functional>
#include <utility>
#include <vector>

#include "mfsmp/adjoint.hpp"
#include "mfsmp/hamiltonian.hpp"
#include "mfsmp/models.hpp"

namespace mfsmp {

using TimeFunction = std::function<double(double)>;

/// Delayed wealth market: dX = (alpha X + beta X(t - l) + g(nu) + v (b - alpha)) dt + v sigma dW.
struct MarketModel {
    TimeFunction alpha = [](double) { return 0.03; };
    TimeFunction beta = [](double) { return 0.01; };
    TimeFunction appreciation = [](double) { return 0.07; };
    TimeFunction volatility = [](double) { return 0.2; };
    double delay = 1.0;
    double horizon = 1.5;
    double initial_wealth = 1.0;
};

/// Mean-field drift g(nu) = gamma E[X] and recursive-utility driver
/// f = -delta y + zeta y^2 / 2 + kappa E[Y] + lambda v^2 / 2 with Y(T) = X(T).
/// zeta = 0 is the standard model; zeta != 0 adds curvature in y.
struct InvestorModel {
    double gamma = 0.05;
    double delta = 0.1;
    double kappa = 0.05;
    double lambda = 1.0;
    double zeta = 0.0;
    double control_lo = -5.0, control_hi = 5.0;
    int control_points = 101;
};

/// Throws ModelInvariant when sigma(t) <= 0 on the grid, kappa, lambda or
/// delta are not positive, wealth is not positive, or l < T <= 2l fails.
CoefficientSet build_finance_coeffs(const MarketModel& market, const InvestorModel& investor);
Scenario finance_scenario(const MarketModel& market, const InvestorModel& investor);

struct CandidateControl {
    ControlSpec control;
    std::vector<double> values;       ///< u*(t_j), j in [0, n]
    std::vector<double> sup_changes;  ///< sup_j |u^{k+1} - u^k| per iteration
};

/// Fixed point u^{k+1}(t) = -(E p(t) (b - alpha) + E q(t) sigma) / lambda from u^0 = 0.
/// Stops when the sup-change is below 1e-4; throws NoConvergence if the last
/// change exceeds 1e-2.
CandidateControl candidate_control(const MarketModel& market, const InvestorModel& investor, const TimeGrid& grid,
                                   const BrownianBundle& bundle, const RegressionBasis& basis, int iterations);

std::pair<AdjointFirst, AdjointSecond> solve_finance_adjoints(const MarketModel& market,
                                                              const InvestorModel& investor, const Star& star,
                                                              const TimeGrid& grid, const BrownianBundle& bundle,
                                                              const RegressionBasis& basis);

/// Inequality (p (b - alpha) + q sigma)(v - u*) + P sigma^2 (v - u*)^2 / 2 + lambda (v^2 - u*^2) / 2 >= 0
/// over the control grid at every sampled cell.
SmpReport check_finance_smp(const MarketModel& market, const InvestorModel& investor, const Star& star,
                            const AdjointFirst& first, const AdjointSecond& second, const ControlSet& controls,
                            const TimeGrid& grid, const SmpOptions& options = {});

/// Pointwise minimiser of the finance Hamiltonian in v (unconstrained).
double finance_minimizer(const MarketModel& market, const InvestorModel& investor, double t, double p, double q,
                         double P, double u_star);

struct NPlayerConfig {
    std::vector<int> players{8, 64, 512};
    int replicates = 32;
    std::uint64_t seed = 42;
};

/// Terminal wealth of every player in every replicate game for one N.
struct NPlayerSamples {
    int players = 0;
    std::vector<std::vector<double>> terminal;  ///< [replicate][player]
};

/// N coupled investors per game, interacting through the empirical mean of
/// their wealth, with independent Brownian motions and the shared control.
std::vector<NPlayerSamples> simulate_nplayer(const MarketModel& market, const InvestorModel& investor,
                                             const ControlSpec& control, const TimeGrid& grid,
                                             const NPlayerConfig& config);

struct ChaosGap {
    int players = 0;
    double w2 = 0;     ///< replicate mean of W2(N-player terminal law, mean-field terminal law)
    double se = 0;     ///< standard error across replicates
};

std::vector<ChaosGap> chaos_gaps(const std::vector<NPlayerSamples>& samples, std::span<const double> mean_field,
                                 std::uint64_t seed);

}  // namespace mfsmp
