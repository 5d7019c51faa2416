#include "mfsmp/hamiltonian.hpp"

#include <algorithm>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mfsmp/kernels.hpp"
#include "step_data.hpp"

namespace mfsmp {

double eval_hamiltonian(const HamiltonianInputs& in, const CoefficientSet& coeffs) {
    const double b = coeffs.drift ? coeffs.drift({in.t, in.x, in.xd, in.drift_stat, in.v}).value : 0.0;
    const double s = coeffs.diffusion ? coeffs.diffusion({in.t, in.x, in.xd, in.diffusion_stat, in.v}).value : 0.0;
    const double s_star =
        coeffs.diffusion
            ? coeffs.diffusion({in.t, in.x_star, in.xd_star, in.diffusion_stat_star, in.u_star}).value
            : 0.0;
    const double ds = s - s_star;
    const double f =
        coeffs.driver ? coeffs.driver({in.t, in.x, in.xd, in.y, in.z + in.p * ds, in.driver_stat, in.v}).value : 0.0;
    return in.p * b + in.q * s + 0.5 * in.P * ds * ds + f;
}

MeasureStats measure_stats(const CoefficientSet& coeffs, const EmpiricalMeasure& nu, const EmpiricalMeasure& mu) {
    MeasureStats m;
    m.drift = inner_mean(coeffs.drift_inner, nu.first());
    m.diffusion = inner_mean(coeffs.diffusion_inner, nu.first());
    m.driver = inner_mean(coeffs.driver_inner, mu.first(), mu.second());
    return m;
}

std::vector<std::pair<int, std::size_t>> sample_cells(int steps, std::size_t particles, std::size_t max_cells) {
    const std::size_t total = static_cast<std::size_t>(steps) * particles;
    const std::size_t count = std::min(total, max_cells);
    std::vector<std::pair<int, std::size_t>> out(count);
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t c = static_cast<std::size_t>((static_cast<unsigned __int128>(r) * total) / count);
        out[r] = {static_cast<int>(c / particles), c % particles};
    }
    return out;
}

SmpReport summarize_gaps(std::vector<SmpCell> cells, double scale) {
    SmpReport r;
    std::vector<double> g(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) g[c] = cells[c].min_gap;
    r.global_min_gap = g.empty() ? 0.0 : *std::min_element(g.begin(), g.end());
    r.standard_error = kernels::standard_error(g);
    // Round-off floor: differences of H values of size `scale`.
    r.tolerance = 3.0 * r.standard_error + 64.0 * std::numeric_limits<double>::epsilon() * scale;
    const auto below = std::count_if(g.begin(), g.end(), [&](double v) { return v < -r.tolerance; });
    r.fraction_below_tol = g.empty() ? 0.0 : static_cast<double>(below) / static_cast<double>(g.size());
    r.pass = r.global_min_gap >= -r.tolerance;
    r.cells = std::move(cells);
    return r;
}

SmpReport check_smp_inequality(const CoefficientSet& coeffs, const Star& star, const AdjointFirst& first,
                               const AdjointSecond& second, const ControlSet& controls, const TimeGrid& grid,
                               const SmpOptions& options) {
    const ForwardSolution& fw = star.fw();
    const BackwardSolution& bw = star.bw();
    const auto cells = sample_cells(grid.steps(), fw.x.particles(), options.max_cells);
    const auto& U = controls.points();
    std::vector<SmpCell> out(cells.size());
    std::vector<double> scale(cells.size(), 0.0);
    kernels::parallel_for(cells.size(), [&](std::size_t c) {
        const auto [j, i] = cells[c];
        HamiltonianInputs in;
        in.t = grid.time(j);
        in.x = in.x_star = fw.x.at(i, j);
        in.xd = in.xd_star = fw.x.delayed(i, j);
        in.y = bw.y.at(i, j);
        in.z = bw.z.at(i, j);
        in.drift_stat = fw.drift_stat(j);
        in.diffusion_stat = in.diffusion_stat_star = fw.diffusion_stat(j);
        in.driver_stat = bw.driver_stat(j);
        in.p = first.p.at(i, j);
        in.q = first.q.at(i, j);
        in.P = second.P.at(i, j);
        in.u_star = in.v = fw.control.at(i, j);
        const double h_star = eval_hamiltonian(in, coeffs);
        SmpCell cell{j, i, 0.0, in.u_star};
        double sc = std::abs(h_star);
        for (double v : U) {
            in.v = v;
            const double h = eval_hamiltonian(in, coeffs);
            sc = std::max(sc, std::abs(h));
            if (h - h_star < cell.min_gap) {
                cell.min_gap = h - h_star;
                cell.argmin = v;
            }
        }
        out[c] = cell;
        scale[c] = sc;
    });
    const double s = scale.empty() ? 0.0 : *std::max_element(scale.begin(), scale.end());
    return summarize_gaps(std::move(out), s);
}

DualityResult check_duality_identity(const AuxiliaryBsde& aux, const GammaProcess& gamma,
                                     const SpikeVariation& spike, const TimeGrid& grid) {
    const std::size_t N = aux.y.particles();
    const double dt = grid.dt();
    const int n = grid.steps();
    std::vector<double> lhs(N), rhs(N, 0.0), diff(N);
    kernels::parallel_for(N, [&](std::size_t i) {
        auto g = [&](int j) {
            if (!spike.active(j)) return 0.0;
            const auto r = static_cast<std::size_t>(j - aux.first_step);
            return gamma.gamma.at(i, j) * (aux.a1[r][i] + aux.delta_f[r][i]);
        };
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += 0.5 * (g(j) + g(j + 1)) * dt;
        lhs[i] = aux.y.at(i, 0);
        rhs[i] = s;
        diff[i] = lhs[i] - rhs[i];
    });
    DualityResult d;
    d.lhs = kernels::mean(lhs);
    d.rhs = kernels::mean(rhs);
    d.diff = d.lhs - d.rhs;
    d.standard_error = kernels::standard_error(diff);
    return d;
}

GammaPositivity check_gamma_positivity(const GammaProcess& gamma, const TimeGrid& grid) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= grid.steps(); ++j) {
        const auto s = gamma.gamma.slice(j);
        m = std::min(m, *std::min_element(s.begin(), s.end()));
    }
    return {m, m > 0.0};
}

}  // namespace mfsmp
