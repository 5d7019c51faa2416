#pragma once

#include <vector>

#include "mfsmp/bsde.hpp"
#include "mfsmp/control.hpp"

namespace mfsmp {

/// Optimal trajectory pair (X*, Y*, Z*) under u*. Non-owning.
struct Star {
    const ForwardSolution* forward = nullptr;
    const BackwardSolution* backward = nullptr;

    const ForwardSolution& fw() const { return *forward; }
    const BackwardSolution& bw() const { return *backward; }
};

/// (p, q) on [0, T + l]: stored on [0, T], zero tails beyond.
struct AdjointFirst {
    PathEnsemble p;
    PathEnsemble q;
};

/// ((P, Q), (P1, Q1)) on [0, T + l] with zero tails.
struct AdjointSecond {
    PathEnsemble P, Q, P1, Q1;
};

/// Anticipated mean-field BSDE for (p, q). Conditional expectations regress on
/// (X*(t), X*(t - l)); the anticipated terms use the stored values at t + l.
AdjointFirst solve_first_adjoint(const CoefficientSet& coeffs, const Star& star, const TimeGrid& grid,
                                 const BrownianBundle& bundle, const RegressionBasis& basis);

/// Coupled second-order adjoint with drivers G and G1.
AdjointSecond solve_second_adjoint(const CoefficientSet& coeffs, const Star& star, const AdjointFirst& first,
                                   const TimeGrid& grid, const BrownianBundle& bundle,
                                   const RegressionBasis& basis);

/// Auxiliary BSDE for the spike: Y-breve, Z-breve, and the driver pieces
/// A1 and Delta f on the spike steps (row r holds step spike.first_step + r).
struct AuxiliaryBsde {
    PathEnsemble y;
    PathEnsemble z;
    std::vector<std::vector<double>> a1;
    std::vector<std::vector<double>> delta_f;
    int first_step = 0;
};

AuxiliaryBsde solve_auxiliary_bsde(const CoefficientSet& coeffs, const Star& star, const AdjointFirst& first,
                                   const AdjointSecond& second, const SpikeVariation& spike, const TimeGrid& grid,
                                   const BrownianBundle& bundle, const RegressionBasis& basis);

/// Gamma on [0, T], Gamma(0) = 1.
struct GammaProcess {
    PathEnsemble gamma;
};

GammaProcess simulate_gamma(const CoefficientSet& coeffs, const Star& star, const TimeGrid& grid,
                            const BrownianBundle& bundle, double blowup_guard = 1e8);

/// Writes time,particle,p,q,P,Q,P1,Q1 for every `stride`-th particle.
void write_adjoints_csv(std::ostream& os, const TimeGrid& grid, const AdjointFirst& first,
                        const AdjointSecond& second, std::size_t stride = 1);

}  // namespace mfsmp
