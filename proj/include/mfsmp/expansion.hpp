#pragma once

#include <string>
#include <vector>

#include "mfsmp/adjoint.hpp"
#include "mfsmp/forward_sim.hpp"

namespace mfsmp {

/// Spike family: one alternate control and start time, several widths (time units).
struct SpikeFamily {
    ControlSpec alternate;
    double tau = 0;
    std::vector<double> eps;
};

/// Estimates tracked across a spike-width sweep.
enum class RateTarget {
    StateGap,              ///< E[sup |X^e - X*|^2], slope 1
    FirstVariation,        ///< E[sup |X^1|^2], slope 1
    SecondVariation,       ///< E[sup |X^2|^2], slope 2
    FirstRemainder,        ///< E[sup |X^e - X* - X^1|^2], slope 2
    SecondRemainder,       ///< E[sup |X^e - X* - X^1 - X^2|^2] / eps^2 decreasing
    MeanFieldFourth,       ///< E[int |E^[b^_nu X^1]|^4 + |E^[s^_nu X^1]|^4 dt] / eps^2 decreasing
    DriverKernel,          ///< driver measure-kernel integral against X^1, / eps^2 decreasing
    DriverKernelAdjoint,   ///< same weighted by p, / eps^2 decreasing
};

const std::vector<RateTarget>& all_rate_targets();
std::string rate_target_id(RateTarget t);
/// Throws ConfigError for an unknown id.
RateTarget parse_rate_target(const std::string& id);
/// Expected log-log slope, or 0 for targets judged by a decreasing eps^-2 ratio.
double expected_slope(RateTarget t);
bool needs_adjoint(RateTarget t);

struct RateSeries {
    RateTarget target{};
    std::vector<double> values;
    std::vector<double> normalized;  ///< values / eps^2
    double slope = 0;
    bool pass = false;
};

/// One row of the backward expansion sweep.
struct ExpansionRow {
    double eps = 0;
    int width_steps = 0;
    double r = 0;            ///< (E[sup_t |Delta Y|^2])^{1/2}
    double r_se = 0;
    double ratio = 0;        ///< r / eps
    double ratio_se = 0;
    double r_first = 0;      ///< same with the P and P1 terms dropped
    double ratio_first = 0;
    double aux_sup = 0;      ///< E[sup |Y-breve|^2]
};

struct ExpansionReport {
    std::vector<double> eps;
    std::vector<ExpansionRow> rows;
    std::vector<RateSeries> rates;
};

/// Least-squares slope of log(values) against log(eps). Throws InsufficientGrid
/// for fewer than two points; returns NaN if a value is not positive.
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& values);

/// True when every consecutive value is strictly smaller than its predecessor.
bool strictly_decreasing(const std::vector<double>& values);

/// Decreasing-width sweep of the backward remainder
/// Y^e - Y* - p (X^1 + X^2) - P (X^1)^2 / 2 - P1 X^1 X^1(. - l) - Y-breve.
/// Y* and Y^e are re-solved on the features (X*, X*(t - l)) augmented by the
/// spiked-minus-star differences, so their projection errors cancel.
ExpansionReport check_expansion_residual(const CoefficientSet& coeffs, const SpikeFamily& family, const Star& star,
                                         const AdjointFirst& first, const AdjointSecond& second,
                                         const TimeGrid& grid, const BrownianBundle& bundle,
                                         const RegressionBasis& basis, const InitialPath& init);

/// Forward (and, for the kernel targets, adjoint-weighted) rate sweep.
/// `first` may be null when no requested target needs p.
ExpansionReport run_rate_experiment(const std::vector<RateTarget>& targets, const CoefficientSet& coeffs,
                                    const SpikeFamily& family, const Star& star, const AdjointFirst* first,
                                    const TimeGrid& grid, const BrownianBundle& bundle, const InitialPath& init);

/// Writes eps,r,ratio,r_se,ratio_first,aux_sup rows.
void write_expansion_csv(std::ostream& os, const ExpansionReport& report);
/// Writes target,eps,value,normalized rows.
void write_rates_csv(std::ostream& os, const ExpansionReport& report);

}  // namespace mfsmp
