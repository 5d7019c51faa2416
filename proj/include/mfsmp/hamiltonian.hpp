#pragma once

#include <cstdint>
#include <vector>

#include "mfsmp/adjoint.hpp"

namespace mfsmp {

/// Inputs of H. Laws enter through their cylindrical statistics; the frozen
/// optimal point (x_star, xd_star, diffusion_stat_star, u_star) fixes sigma*.
struct HamiltonianInputs {
    double t = 0, x = 0, xd = 0, y = 0, z = 0;
    double drift_stat = 0, diffusion_stat = 0, driver_stat = 0;
    double v = 0;
    double p = 0, q = 0, P = 0;
    double x_star = 0, xd_star = 0, diffusion_stat_star = 0, u_star = 0;
};

/// H = p b + q sigma + P (sigma - sigma*)^2 / 2 + f(t, x, x', y, z + p (sigma - sigma*), mu, v).
double eval_hamiltonian(const HamiltonianInputs& in, const CoefficientSet& coeffs);

/// Statistics of nu (1-D) and mu (2-D) for the coefficient inner functions.
struct MeasureStats {
    double drift = 0, diffusion = 0, driver = 0;
};
MeasureStats measure_stats(const CoefficientSet& coeffs, const EmpiricalMeasure& nu, const EmpiricalMeasure& mu);

struct SmpCell {
    int step = 0;
    std::size_t particle = 0;
    double min_gap = 0;
    double argmin = 0;
};

struct SmpReport {
    std::vector<SmpCell> cells;
    double global_min_gap = 0;
    double standard_error = 0;   ///< SE of the mean of per-cell minimum gaps
    double tolerance = 0;        ///< 3 SE plus a round-off floor
    double fraction_below_tol = 0;
    bool pass = true;
};

struct SmpOptions {
    std::size_t max_cells = 10000;
};

/// Evenly spaced subsample of the (step, particle) cells, at most `max_cells`.
std::vector<std::pair<int, std::size_t>> sample_cells(int steps, std::size_t particles, std::size_t max_cells);

/// Builds a report from per-cell minimum gaps and a round-off scale.
SmpReport summarize_gaps(std::vector<SmpCell> cells, double scale);

/// gap(v) = H(v) - H(u*) at the frozen optimal values for every sampled cell.
SmpReport check_smp_inequality(const CoefficientSet& coeffs, const Star& star, const AdjointFirst& first,
                               const AdjointSecond& second, const ControlSet& controls, const TimeGrid& grid,
                               const SmpOptions& options = {});

struct DualityResult {
    double lhs = 0, rhs = 0, diff = 0, standard_error = 0;
};

/// Compares the mean of Y-breve(0) with the mean of the trapezoid integral of
/// Gamma (A1 + Delta f) over the spike.
DualityResult check_duality_identity(const AuxiliaryBsde& aux, const GammaProcess& gamma,
                                     const SpikeVariation& spike, const TimeGrid& grid);

struct GammaPositivity {
    double min_value = 0;
    bool positive = false;
};

GammaPositivity check_gamma_positivity(const GammaProcess& gamma, const TimeGrid& grid);

}  // namespace mfsmp
