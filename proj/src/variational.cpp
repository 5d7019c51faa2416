#include <atomic>
#include <cmath>
#include <sstream>

#include "mfsmp/errors.hpp"
#include "mfsmp/forward_sim.hpp"
#include "mfsmp/kernels.hpp"
#include "step_data.hpp"

namespace mfsmp {

namespace {

void check_guard(const std::atomic<bool>& blown, const ForwardOptions& options, const char* what, double t) {
    if (!blown) return;
    std::ostringstream os;
    os << "|" << what << "| exceeded " << options.blowup_guard << " at t = " << t;
    throw NumericalBlowup(os.str());
}

// Spike differences of b and sigma at one step: alternate minus base jets.
struct SpikeDelta {
    SdeSlice base, alt;
    bool active = false;

    void evaluate(const CoefficientSet& coeffs, const ForwardSolution& fw, const TimeGrid& grid, int j,
                  const ControlTrace& alt_trace, const SpikeVariation& spike) {
        base.evaluate(coeffs, fw, grid, j, fw.control);
        active = j >= 0 && spike.active(j);
        if (active) alt.evaluate(coeffs, fw, grid, j, alt_trace);
    }
    double db(std::size_t i) const { return active ? alt.b[i].value - base.b[i].value : 0.0; }
    double ds(std::size_t i) const { return active ? alt.s[i].value - base.s[i].value : 0.0; }
};

// Hat average (1/N) sum_j h'(X_j) w_j of an inner function derivative.
double hat_mean(const std::vector<double>& dh, std::span<const double> w) {
    return kernels::mean_product(dh, w);
}

}  // namespace

PathEnsemble simulate_first_variation(const CoefficientSet& coeffs, const SpikeVariation& spike,
                                      const ForwardSolution& base, const TimeGrid& grid,
                                      const BrownianBundle& bundle, const ForwardOptions& options) {
    const int n = grid.steps();
    const std::size_t N = base.x.particles();
    const double dt = grid.dt();
    const ControlTrace alt = spiked_trace(base.control, spike, base.x, grid);
    PathEnsemble x1 = PathEnsemble::zeros(grid, N);
    SpikeDelta d;
    std::atomic<bool> blown{false};
    for (int j = 0; j < n; ++j) {
        d.evaluate(coeffs, base, grid, j, alt, spike);
        const auto cur = x1.slice(j);
        const double hb = hat_mean(inner_derivative(coeffs.drift_inner, base.x, j, 1), cur);
        const double hs = hat_mean(inner_derivative(coeffs.diffusion_inner, base.x, j, 1), cur);
        const auto dw = bundle.step(j);
        auto next = x1.slice(j + 1);
        kernels::parallel_for(N, [&](std::size_t i) {
            const SdeJet& b = d.base.b[i];
            const SdeJet& s = d.base.s[i];
            const double x = cur[i], xd = x1.delayed(i, j);
            const double drift = b.x * x + b.xd * xd + b.m * hb + d.db(i);
            const double diff = s.x * x + s.xd * xd + s.m * hs + d.ds(i);
            next[i] = x + drift * dt + diff * dw[i];
            if (!(std::abs(next[i]) <= options.blowup_guard)) blown = true;
        });
        check_guard(blown, options, "X1", grid.time(j + 1));
    }
    return x1;
}

PathEnsemble simulate_second_variation(const CoefficientSet& coeffs, const SpikeVariation& spike,
                                       const ForwardSolution& base, const PathEnsemble& x1, const TimeGrid& grid,
                                       const BrownianBundle& bundle, const ForwardOptions& options) {
    const int n = grid.steps();
    const std::size_t N = base.x.particles();
    const double dt = grid.dt();
    const ControlTrace alt = spiked_trace(base.control, spike, base.x, grid);
    PathEnsemble x2 = PathEnsemble::zeros(grid, N);
    SpikeDelta d;
    std::vector<double> sq(N);
    std::atomic<bool> blown{false};
    for (int j = 0; j < n; ++j) {
        d.evaluate(coeffs, base, grid, j, alt, spike);
        const auto cur = x2.slice(j);
        const auto c1 = x1.slice(j);
        const auto hb1 = inner_derivative(coeffs.drift_inner, base.x, j, 1);
        const auto hs1 = inner_derivative(coeffs.diffusion_inner, base.x, j, 1);
        const auto hb2 = inner_derivative(coeffs.drift_inner, base.x, j, 2);
        const auto hs2 = inner_derivative(coeffs.diffusion_inner, base.x, j, 2);
        kernels::parallel_for(N, [&](std::size_t i) { sq[i] = c1[i] * c1[i]; });
        // Hat averages over the Lions argument.
        const double b_x2 = hat_mean(hb1, cur), s_x2 = hat_mean(hs1, cur);
        const double b_x1 = hat_mean(hb1, c1), s_x1 = hat_mean(hs1, c1);
        const double b_sq = hat_mean(hb2, sq), s_sq = hat_mean(hs2, sq);
        const auto dw = bundle.step(j);
        auto next = x2.slice(j + 1);
        kernels::parallel_for(N, [&](std::size_t i) {
            const SdeJet& b = d.base.b[i];
            const SdeJet& s = d.base.s[i];
            const double x = cur[i], xd = x2.delayed(i, j);
            const double y = c1[i], yd = x1.delayed(i, j);
            double drift = b.x * x + b.xd * xd + b.m * b_x2 + b.xxd * y * yd +
                           0.5 * (b.xx * y * y + b.m * b_sq + b.xdxd * yd * yd);
            double diff = s.x * x + s.xd * xd + s.m * s_x2 + s.xxd * y * yd +
                          0.5 * (s.xx * y * y + s.m * s_sq + s.xdxd * yd * yd);
            if (d.active) {
                const SdeJet& ab = d.alt.b[i];
                const SdeJet& as = d.alt.s[i];
                drift += (ab.x - b.x) * y + (ab.xd - b.xd) * yd + (ab.m - b.m) * b_x1;
                diff += (as.x - s.x) * y + (as.xd - s.xd) * yd + (as.m - s.m) * s_x1;
            }
            next[i] = x + drift * dt + diff * dw[i];
            if (!(std::abs(next[i]) <= options.blowup_guard)) blown = true;
        });
        check_guard(blown, options, "X2", grid.time(j + 1));
    }
    return x2;
}

QuadraticProcesses quadratic_processes(const PathEnsemble& x1, const TimeGrid& grid) {
    const std::size_t N = x1.particles();
    QuadraticProcesses q{PathEnsemble::zeros(grid, N), PathEnsemble::zeros(grid, N)};
    for (int j = 0; j <= grid.steps(); ++j) {
        auto k = q.k.slice(j);
        auto k1 = q.k1.slice(j);
        kernels::parallel_for(N, [&](std::size_t i) {
            const double a = x1.at(i, j);
            k[i] = a * a;
            k1[i] = a * x1.delayed(i, j);
        });
    }
    return q;
}

KDiagnostics verify_k_dynamics(const CoefficientSet& coeffs, const SpikeVariation& spike,
                               const ForwardSolution& base, const PathEnsemble& x1, const TimeGrid& grid,
                               const BrownianBundle& bundle) {
    const int n = grid.steps(), k = grid.delay_steps();
    const std::size_t N = base.x.particles();
    const double dt = grid.dt();
    const ControlTrace alt = spiked_trace(base.control, spike, base.x, grid);

    std::vector<double> kt(N, 0.0), k1t(N, 0.0), sup_k(N, 0.0), sup_k1(N, 0.0), l12(N, 0.0), l34(N, 0.0);
    SpikeDelta d, dl;
    for (int j = 0; j < n; ++j) {
        d.evaluate(coeffs, base, grid, j, alt, spike);
        const auto c1 = x1.slice(j);
        const double mb = hat_mean(inner_derivative(coeffs.drift_inner, base.x, j, 1), c1);
        const double ms = hat_mean(inner_derivative(coeffs.diffusion_inner, base.x, j, 1), c1);
        const bool delayed = j >= k;
        double mb_l = 0, ms_l = 0;
        if (delayed) {
            dl.evaluate(coeffs, base, grid, j - k, alt, spike);
            const auto cl = x1.slice(j - k);
            mb_l = hat_mean(inner_derivative(coeffs.drift_inner, base.x, j - k, 1), cl);
            ms_l = hat_mean(inner_derivative(coeffs.diffusion_inner, base.x, j - k, 1), cl);
        }
        const double ind = spike.active(j) ? 1.0 : 0.0;
        const auto dw = bundle.step(j);
        const auto dw_l = delayed ? bundle.step(j - k) : dw;
        kernels::parallel_for(N, [&](std::size_t i) {
            const SdeJet& b = d.base.b[i];
            const SdeJet& s = d.base.s[i];
            const double A = c1[i], B = x1.delayed(i, j);
            const double Mb = b.m * mb, Ms = s.m * ms;
            const double K = A * A, K1 = A * B, Kl = B * B;
            const double Db = d.db(i), Ds = d.ds(i);
            const double L1 = ind * (2 * Db * A + 2 * s.x * Ds * A + 2 * s.xd * Ds * B) + 2 * Mb * A + Ms * Ms +
                              2 * s.x * A * Ms + 2 * s.xd * B * Ms + 2 * Ds * Ms * ind;
            const double L2 = 2 * Ds * A * ind + 2 * Ms * A;
            const double kd = (2 * b.x + s.x * s.x) * K + (2 * b.xd + 2 * s.x * s.xd) * K1 + s.xd * s.xd * Kl +
                              Ds * Ds * ind + L1;
            const double kw = 2 * s.x * K + 2 * s.xd * K1 + L2;
            kt[i] += kd * dt + kw * dw[i];
            l12[i] += (std::abs(L1) + std::abs(L2)) * dt;
            if (delayed) {
                // Product rule for X1(t) X1(t - l); the delayed factor moves with dW(t - l).
                const SdeJet& bl = dl.base.b[i];
                const SdeJet& sl = dl.base.s[i];
                const double Mbl = bl.m * mb_l, Msl = sl.m * ms_l;
                const double Dbl = dl.db(i), Dsl = dl.ds(i);
                const double indl = spike.active(j - k) ? 1.0 : 0.0;
                const double L3 = A * Dbl * indl + B * Db * ind + B * Mb + A * Mbl;
                const double L4 = B * Ms + B * Ds * ind;
                const double L4l = A * Msl + A * Dsl * indl;
                const double k1d = (b.x + bl.x) * K1 + b.xd * Kl + L3;
                const double k1w = s.x * K1 + s.xd * Kl + L4;
                const double k1wl = sl.x * K1 + L4l;
                k1t[i] += k1d * dt + k1w * dw[i] + k1wl * dw_l[i];
                l34[i] += (std::abs(L3) + std::abs(L4) + std::abs(L4l)) * dt;
            }
            const double a1 = x1.at(i, j + 1);
            sup_k[i] = std::max(sup_k[i], std::abs(kt[i] - a1 * a1));
            sup_k1[i] = std::max(sup_k1[i], std::abs(k1t[i] - a1 * x1.delayed(i, j + 1)));
        });
    }
    auto rms = [](std::vector<double>& v) {
        for (double& x : v) x *= x;
        return std::sqrt(kernels::mean(v));
    };
    for (double& x : l12) x *= x;
    for (double& x : l34) x *= x;
    KDiagnostics out;
    out.residual_k = rms(sup_k);
    out.residual_k1 = rms(sup_k1);
    out.l12_magnitude = kernels::mean(l12);
    out.l34_magnitude = kernels::mean(l34);
    return out;
}

}  // namespace mfsmp
