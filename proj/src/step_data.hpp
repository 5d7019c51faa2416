#pragma once

// Per-step coefficient data along a trajectory, shared by the variational,
// adjoint and verification code.

#include <span>
#include <vector>

#include "mfsmp/bsde.hpp"
#include "mfsmp/coefficients.hpp"
#include "mfsmp/forward_sim.hpp"
#include "mfsmp/kernels.hpp"

namespace mfsmp {

inline double inner_mean(const ScalarFunction& h, std::span<const double> x) {
    if (h.is_zero()) return 0.0;
    std::vector<double> v(x.size());
    kernels::parallel_for(x.size(), [&](std::size_t i) { v[i] = h(x[i]); });
    return kernels::mean(v);
}

inline double inner_mean(const PlanarFunction& h, std::span<const double> x, std::span<const double> y) {
    if (h.is_zero()) return 0.0;
    std::vector<double> v(x.size());
    kernels::parallel_for(x.size(), [&](std::size_t i) { v[i] = h(x[i], y[i]); });
    return kernels::mean(v);
}

/// Jets of b and sigma at index j along `fw` with controls from `control`.
/// Negative j reads the initial segment, with the control clamped to t = 0.
struct SdeSlice {
    std::vector<SdeJet> b, s;

    void evaluate(const CoefficientSet& coeffs, const ForwardSolution& fw, const TimeGrid& grid, int j,
                  const ControlTrace& control) {
        const std::size_t n = fw.x.particles();
        b.resize(n);
        s.resize(n);
        const double t = grid.time(j), mb = fw.drift_stat(j), ms = fw.diffusion_stat(j);
        const int jc = std::clamp(j, 0, control.steps());
        kernels::parallel_for(n, [&](std::size_t i) {
            const double x = fw.x.at(i, j), xd = fw.x.delayed(i, j), v = control.at(i, jc);
            b[i] = coeffs.drift ? coeffs.drift({t, x, xd, mb, v}) : SdeJet{};
            s[i] = coeffs.diffusion ? coeffs.diffusion({t, x, xd, ms, v}) : SdeJet{};
        });
    }
};

/// Jets of f at index j in [0, n] along the star pair (X, Y, Z).
struct DriverSlice {
    std::vector<DriverJet> f;
    double stat = 0;

    void evaluate(const CoefficientSet& coeffs, const ForwardSolution& fw, const BackwardSolution& bw,
                  const TimeGrid& grid, int j, const ControlTrace& control) {
        const std::size_t n = fw.x.particles();
        f.resize(n);
        stat = bw.driver_stat(j);
        const double t = grid.time(j);
        kernels::parallel_for(n, [&](std::size_t i) {
            f[i] = coeffs.driver ? coeffs.driver({t, fw.x.at(i, j), fw.x.delayed(i, j), bw.y.at(i, j),
                                                  bw.z.at(i, j), stat, control.at(i, j)})
                                 : DriverJet{};
        });
    }
};

/// Values h'(X_i(t_j)) (or h'') of an inner function over the slice.
inline std::vector<double> inner_derivative(const ScalarFunction& h, const PathEnsemble& x, int j, int order) {
    std::vector<double> out(x.particles());
    kernels::parallel_for(out.size(), [&](std::size_t i) {
        const double a = x.at(i, j);
        out[i] = order == 1 ? h.d1(a) : h.d2(a);
    });
    return out;
}

}  // namespace mfsmp

namespace mfsmp {

/// Regression features (X(t_j), X(t_j - l)) of a trajectory, optionally with Y(t_j).
inline Eigen::MatrixXd step_features(const ForwardSolution& fw, int j, const PathEnsemble* y = nullptr) {
    const std::size_t n = fw.x.particles();
    Eigen::MatrixXd f(static_cast<Eigen::Index>(n), y ? 3 : 2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        f(r, 0) = fw.x.at(i, j);
        f(r, 1) = fw.x.delayed(i, j);
        if (y) f(r, 2) = y->at(i, j);
    }
    return f;
}

/// Features (X(t), X(t - l), S(t) - X(t), S(t - l) - X(t - l)) for a second trajectory S.
inline Eigen::MatrixXd spread_features(const ForwardSolution& fw, const ForwardSolution& spread, int j) {
    const std::size_t n = fw.x.particles();
    Eigen::MatrixXd f(static_cast<Eigen::Index>(n), 4);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        f(r, 0) = fw.x.at(i, j);
        f(r, 1) = fw.x.delayed(i, j);
        f(r, 2) = spread.x.at(i, j) - f(r, 0);
        f(r, 3) = spread.x.delayed(i, j) - f(r, 1);
    }
    return f;
}

/// Martingale-increment regression: E[(next - cont) dW | F_j] / dt.
inline std::vector<double> martingale_integrand(const LeastSquaresProjector& proj, std::span<const double> next,
                                                std::span<const double> cont, std::span<const double> dw,
                                                double dt) {
    std::vector<double> r(next.size());
    kernels::parallel_for(r.size(), [&](std::size_t i) { r[i] = (next[i] - cont[i]) * dw[i] / dt; });
    return proj.project(r);
}

/// Continuation E[next | F_j] and integrand E[next dW_j | F_j] / dt. The
/// continuation is regressed from next - Z dW_j, which has the same
/// conditional mean without the martingale-increment noise.
struct ConditionalStep {
    std::vector<double> cont;
    std::vector<double> mart;
};

inline ConditionalStep conditional_step(const LeastSquaresProjector& proj, std::span<const double> next,
                                        std::span<const double> dw, double dt) {
    ConditionalStep c;
    const std::vector<double> rough = proj.project(next);
    c.mart = martingale_integrand(proj, next, rough, dw, dt);
    std::vector<double> r(next.size());
    kernels::parallel_for(r.size(), [&](std::size_t i) { r[i] = next[i] - c.mart[i] * dw[i]; });
    c.cont = proj.project(r);
    return c;
}

}  // namespace mfsmp
