#include "mfsmp/finance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "mfsmp/philox.hpp"
#include "mfsmp/wasserstein.hpp"

namespace mfsmp {

CoefficientSet build_finance_coeffs(const MarketModel& market, const InvestorModel& investor) {
    const double T = market.horizon, l = market.delay;
    if (!(l < T && T <= 2 * l)) throw ModelInvariant("finance model needs l < T <= 2l");
    if (!(market.initial_wealth > 0)) throw ModelInvariant("initial wealth must be positive");
    if (!(investor.kappa > 0)) throw ModelInvariant("kappa must be positive");
    if (!(investor.lambda > 0)) throw ModelInvariant("lambda must be positive");
    if (!(investor.delta > 0)) throw ModelInvariant("delta must be positive");
    for (int s = 0; s <= 1000; ++s) {
        const double t = T * s / 1000.0;
        if (!(market.volatility(t) > 0)) throw ModelInvariant("volatility must be positive on [0, T]");
        for (double v : {market.alpha(t), market.beta(t), market.appreciation(t), market.volatility(t)})
            if (!std::isfinite(v)) throw ModelInvariant("market functions must be bounded on [0, T]");
    }

    CoefficientSet c;
    c.name = "finance";
    const MarketModel m = market;
    const double gamma = investor.gamma, delta = investor.delta, kappa = investor.kappa,
                 lambda = investor.lambda, zeta = investor.zeta;
    c.drift = [m, gamma](const SdeArgs& a) {
        const double al = m.alpha(a.t);
        SdeJet j;
        j.value = al * a.x + m.beta(a.t) * a.xd + gamma * a.m + a.v * (m.appreciation(a.t) - al);
        j.x = al;
        j.xd = m.beta(a.t);
        j.m = gamma;
        return j;
    };
    c.diffusion = [m](const SdeArgs& a) {
        SdeJet j;
        j.value = a.v * m.volatility(a.t);
        return j;
    };
    c.driver = [=](const DriverArgs& a) {
        DriverJet j;
        j.value = -delta * a.y + 0.5 * zeta * a.y * a.y + kappa * a.m + 0.5 * lambda * a.v * a.v;
        j.y = -delta + zeta * a.y;
        j.yy = zeta;
        j.m = kappa;
        return j;
    };
    c.terminal = [](double x, double) { return TerminalJet{x, 1.0, 0.0, 0.0}; };
    c.drift_inner = ScalarFunction::identity();
    c.driver_inner = PlanarFunction::linear(0.0, 1.0);
    c.controls = ControlSet::interval(investor.control_lo, investor.control_hi, investor.control_points);
    c.growth_constant = 1.0;
    return c;
}

Scenario finance_scenario(const MarketModel& market, const InvestorModel& investor) {
    Scenario sc;
    sc.name = "finance";
    sc.coeffs = build_finance_coeffs(market, investor);
    sc.base = ControlSpec::constant(0.0);
    sc.alternate = ControlSpec::constant(1.0);
    const double x0 = market.initial_wealth;
    sc.init = [x0](double) { return x0; };
    return sc;
}

CandidateControl candidate_control(const MarketModel& market, const InvestorModel& investor, const TimeGrid& grid,
                                   const BrownianBundle& bundle, const RegressionBasis& basis, int iterations) {
    const CoefficientSet coeffs = build_finance_coeffs(market, investor);
    const int n = grid.steps();
    const double x0 = market.initial_wealth;
    const InitialPath init = [x0](double) { return x0; };
    CandidateControl out;
    out.values.assign(static_cast<std::size_t>(n + 1), 0.0);
    out.control = ControlSpec::tabulated(grid, out.values);
    for (int it = 0; it < iterations; ++it) {
        const ForwardSolution fw = simulate_forward(coeffs, out.control, grid, bundle, init);
        const BackwardSolution bw = solve_backward_mfbsde(coeffs, fw, grid, bundle, basis);
        const AdjointFirst first = solve_first_adjoint(coeffs, Star{&fw, &bw}, grid, bundle, basis);
        std::vector<double> next(out.values.size());
        double change = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double t = grid.time(j);
            const double p = kernels::mean(first.p.slice(j)), q = kernels::mean(first.q.slice(j));
            const double u = -(p * (market.appreciation(t) - market.alpha(t)) + q * market.volatility(t)) /
                             investor.lambda;
            next[static_cast<std::size_t>(j)] = u;
            change = std::max(change, std::abs(u - out.values[static_cast<std::size_t>(j)]));
        }
        out.values = std::move(next);
        out.control = ControlSpec::tabulated(grid, out.values);
        out.sup_changes.push_back(change);
        if (change < 1e-4) break;
    }
    if (!out.sup_changes.empty() && out.sup_changes.back() > 1e-2) {
        std::ostringstream os;
        os << "candidate control: last sup-change " << out.sup_changes.back() << " after "
           << out.sup_changes.size() << " iterations";
        throw NoConvergence(os.str());
    }
    return out;
}

std::pair<AdjointFirst, AdjointSecond> solve_finance_adjoints(const MarketModel& market,
                                                              const InvestorModel& investor, const Star& star,
                                                              const TimeGrid& grid, const BrownianBundle& bundle,
                                                              const RegressionBasis& basis) {
    const CoefficientSet coeffs = build_finance_coeffs(market, investor);
    AdjointFirst first = solve_first_adjoint(coeffs, star, grid, bundle, basis);
    AdjointSecond second = solve_second_adjoint(coeffs, star, first, grid, bundle, basis);
    return {std::move(first), std::move(second)};
}

double finance_minimizer(const MarketModel& market, const InvestorModel& investor, double t, double p, double q,
                         double P, double u_star) {
    const double s = market.volatility(t);
    const double a = p * (market.appreciation(t) - market.alpha(t)) + q * s;
    const double c = P * s * s;
    // d/dv: a + c (v - u*) + lambda v = 0.
    return (c * u_star - a) / (c + investor.lambda);
}

SmpReport check_finance_smp(const MarketModel& market, const InvestorModel& investor, const Star& star,
                            const AdjointFirst& first, const AdjointSecond& second, const ControlSet& controls,
                            const TimeGrid& grid, const SmpOptions& options) {
    const ForwardSolution& fw = star.fw();
    const auto cells = sample_cells(grid.steps(), fw.x.particles(), options.max_cells);
    const auto& U = controls.points();
    std::vector<SmpCell> out(cells.size());
    std::vector<double> scale(cells.size());
    kernels::parallel_for(cells.size(), [&](std::size_t c) {
        const auto [j, i] = cells[c];
        const double t = grid.time(j);
        const double p = first.p.at(i, j), q = first.q.at(i, j), P = second.P.at(i, j);
        const double u = fw.control.at(i, j), s = market.volatility(t);
        const double a = p * (market.appreciation(t) - market.alpha(t)) + q * s;
        SmpCell cell{j, i, 0.0, u};
        double sc = std::abs(0.5 * investor.lambda * u * u);
        for (double v : U) {
            const double d = v - u;
            const double g = a * d + 0.5 * P * s * s * d * d + 0.5 * investor.lambda * (v * v - u * u);
            sc = std::max(sc, 0.5 * investor.lambda * v * v);
            if (g < cell.min_gap) {
                cell.min_gap = g;
                cell.argmin = v;
            }
        }
        out[c] = cell;
        scale[c] = sc;
    });
    const double s = scale.empty() ? 0.0 : *std::max_element(scale.begin(), scale.end());
    return summarize_gaps(std::move(out), s);
}

std::vector<NPlayerSamples> simulate_nplayer(const MarketModel& market, const InvestorModel& investor,
                                             const ControlSpec& control, const TimeGrid& grid,
                                             const NPlayerConfig& config) {
    const CoefficientSet coeffs = build_finance_coeffs(market, investor);
    const double x0 = market.initial_wealth;
    const InitialPath init = [x0](double) { return x0; };
    std::vector<NPlayerSamples> out;
    for (int N : config.players) {
        if (N < 1) throw std::invalid_argument("player count must be positive");
        NPlayerSamples s;
        s.players = N;
        for (int r = 0; r < config.replicates; ++r) {
            const std::uint64_t seed =
                derive_seed(config.seed, static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(r));
            const BrownianBundle bundle = sample_brownian(grid, static_cast<std::size_t>(N), seed);
            const ForwardSolution fw = simulate_forward(coeffs, control, grid, bundle, init);
            const auto last = fw.x.slice(grid.steps());
            s.terminal.emplace_back(last.begin(), last.end());
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<ChaosGap> chaos_gaps(const std::vector<NPlayerSamples>& samples, std::span<const double> mean_field,
                                 std::uint64_t seed) {
    std::vector<ChaosGap> out;
    for (const NPlayerSamples& s : samples) {
        std::vector<double> w(s.terminal.size());
        for (std::size_t r = 0; r < s.terminal.size(); ++r)
            w[r] = wasserstein2_1d(EmpiricalMeasure(s.terminal[r]), EmpiricalMeasure(mean_field),
                                   derive_seed(seed, static_cast<std::uint64_t>(s.players), r));
        out.push_back({s.players, kernels::mean(w), kernels::standard_error(w)});
    }
    return out;
}

}  // namespace mfsmp
