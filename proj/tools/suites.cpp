#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include "mfsmp/adjoint.hpp"
#include "mfsmp/brownian.hpp"
#include "mfsmp/bsde.hpp"
#include "mfsmp/csv.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/expansion.hpp"
#include "mfsmp/finance.hpp"
#include "mfsmp/hamiltonian.hpp"
#include "mfsmp/kernels.hpp"

namespace mfsmp::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kTraceParticles = 16;

struct Context {
    const ExperimentConfig& cfg;
    Scenario sc;
    TimeGrid grid;
    BrownianBundle bundle;
    fs::path out;
    RunReport report;

    std::size_t stride() const { return std::max<std::size_t>(1, cfg.particles / kTraceParticles); }
    double tau() const { return cfg.tau_fraction * cfg.T; }
    std::vector<double> widths() const {
        std::vector<double> e;
        for (double f : cfg.eps_fractions) e.push_back(f * cfg.T);
        return e;
    }
    std::ofstream trace(const std::string& name) const { return std::ofstream(out / name); }
};

double max_abs(std::span<const double> v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double count_nonfinite(const PathEnsemble& e, int last) {
    double bad = 0;
    for (int j = 0; j <= last; ++j)
        for (double x : e.slice(j)) bad += !std::isfinite(x);
    return bad;
}

/// Largest cross-particle standard deviation over columns [0, last].
double max_cross_sd(const PathEnsemble& e, int last) {
    double worst = 0;
    for (int j = 0; j <= last; ++j) {
        const auto s = e.slice(j);
        worst = std::max(worst, kernels::standard_error(s) * std::sqrt(static_cast<double>(s.size())));
    }
    return worst;
}

double max_consecutive_ratio(const std::vector<double>& v) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 1; a < v.size(); ++a) worst = std::max(worst, v[a] / v[a - 1]);
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return worst;
}

// Trapezoid integration of x' = -0.5 x + 0.8 x(t - l) on a fine grid aligned
// with the delay; the initial path 1 + 0.5 theta is exact there.
std::vector<double> delay_ode_reference(const TimeGrid& grid, int refine) {
    const int k = grid.delay_steps() * refine, n = grid.steps() * refine;
    const double h = grid.dt() / refine;
    std::vector<double> x(static_cast<std::size_t>(n + k + 1));
    for (int i = -k; i <= 0; ++i) x[static_cast<std::size_t>(i + k)] = 1.0 + 0.5 * i * h;
    for (int i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i + k)];
        const double a = -0.5 * xi + 0.8 * x[static_cast<std::size_t>(i)];
        // Trapezoid rule; the implicit linear term is solved exactly.
        const double lag = 0.8 * x[static_cast<std::size_t>(i + 1)];
        const double next = (xi + 0.5 * h * (a + lag)) / (1.0 + 0.25 * h);
        x[static_cast<std::size_t>(i + 1 + k)] = next;
    }
    std::vector<double> coarse(static_cast<std::size_t>(grid.steps() + 1));
    for (int j = 0; j <= grid.steps(); ++j) coarse[static_cast<std::size_t>(j)] = x[static_cast<std::size_t>(j * refine + k)];
    return coarse;
}

double delay_ode_error(const ExperimentConfig& cfg, const Scenario& sc, double dt) {
    const TimeGrid g = build_grid(cfg.T, cfg.l, dt);
    const BrownianBundle b = sample_brownian(g, 1, cfg.seed);
    const ForwardSolution fw = simulate_forward(sc.coeffs, sc.base, g, b, sc.init);
    const std::vector<double> ref = delay_ode_reference(g, 64);
    double err = 0;
    for (int j = 0; j <= g.steps(); ++j) err = std::max(err, std::abs(fw.x.at(0, j) - ref[static_cast<std::size_t>(j)]));
    return err;
}

void simulate_suite(Context& cx) {
    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, cx.sc.base, cx.grid, cx.bundle, cx.sc.init);
    const int n = cx.grid.steps(), k = cx.grid.delay_steps();
    double seg = 0;
    for (int j = -k; j < 0; ++j) seg = std::max(seg, std::abs(fw.x.prefix(j) - cx.sc.init(cx.grid.time(j))));
    for (double x : fw.x.slice(0)) seg = std::max(seg, std::abs(x - cx.sc.init(0.0)));
    cx.report.add("forward.initial_segment", seg, 0.0);
    cx.report.add("forward.nonfinite", count_nonfinite(fw.x, n), 0.0);

    const SpikeVariation none = make_spike(cx.grid, cx.sc.alternate, cx.tau(), 0.0);
    const ForwardSolution same = simulate_spiked(cx.sc.coeffs, fw, none, cx.grid, cx.bundle, cx.sc.init);
    double zero_gap = 0;
    for (int j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < cx.cfg.particles; ++i)
            zero_gap = std::max(zero_gap, std::abs(same.x.at(i, j) - fw.x.at(i, j)));
    cx.report.add("forward.zero_width_spike", zero_gap, 0.0);

    const SpikeVariation spike = make_spike(cx.grid, cx.sc.alternate, cx.tau(), cx.cfg.eps_fraction * cx.cfg.T);
    const ForwardSolution late = simulate_spiked(cx.sc.coeffs, fw, spike, cx.grid, cx.bundle, cx.sc.init);
    double causal = 0;
    for (int j = 0; j <= spike.first_step; ++j)
        for (std::size_t i = 0; i < cx.cfg.particles; ++i)
            causal = std::max(causal, std::abs(late.x.at(i, j) - fw.x.at(i, j)));
    cx.report.add("forward.causality", causal, 0.0);

    const std::string& model = cx.sc.name;
    const auto terminal = fw.x.slice(n);
    if (model == "meanfield-exp") {
        const double exact = std::exp(cx.cfg.T);
        cx.report.add("forward.meanfield_exp_relative", std::abs(kernels::mean(terminal) - exact) / exact, 0.02);
    } else if (model == "gbm") {
        const double exact = std::exp(0.1 * cx.cfg.T);
        cx.report.add("forward.gbm_mean", std::abs(kernels::mean(terminal) - exact),
                      3 * kernels::standard_error(terminal) + 10 * cx.cfg.dt);
    } else if (model == "delay-ode") {
        const double e1 = delay_ode_error(cx.cfg, cx.sc, cx.cfg.dt);
        const double e2 = delay_ode_error(cx.cfg, cx.sc, cx.cfg.dt / 2);
        cx.report.add("forward.delay_ode_sup_error", e1, 10 * cx.cfg.dt);
        cx.report.add("forward.delay_ode_order", -std::log2(e1 / e2), -0.9);
    } else if (model == "zero") {
        cx.report.add("forward.zero_constant", max_abs(terminal) - std::abs(cx.sc.init(0.0)), 0.0);
    }

    auto os = cx.trace("paths.csv");
    write_ensembles_csv(os, cx.grid, {{"x", &fw.x}}, -k, n, cx.stride());
}

void bsde_suite(Context& cx) {
    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, cx.sc.base, cx.grid, cx.bundle, cx.sc.init);
    BackwardOptions opts;
    opts.picard = cx.cfg.picard;
    const BackwardSolution bw = solve_backward_mfbsde(cx.sc.coeffs, fw, cx.grid, cx.bundle, cx.cfg.basis, opts);
    const int n = cx.grid.steps();
    double term = 0;
    for (std::size_t i = 0; i < cx.cfg.particles; ++i) {
        const double phi = cx.sc.coeffs.terminal ? cx.sc.coeffs.terminal(fw.x.at(i, n), fw.terminal_stat).value : 0.0;
        term = std::max(term, std::abs(bw.y.at(i, n) - phi));
    }
    cx.report.add("bsde.terminal", term, 0.0);
    cx.report.add("bsde.nonfinite", count_nonfinite(bw.y, n) + count_nonfinite(bw.z, n), 0.0);
    if (cx.sc.name == "gbm") {
        std::vector<double> disc(fw.x.slice(n).begin(), fw.x.slice(n).end());
        for (double& v : disc) v *= std::exp(-0.05 * cx.cfg.T);
        cx.report.add("bsde.gbm_discounted_mean", std::abs(bw.cost() - kernels::mean(disc)),
                      3 * kernels::standard_error(disc) + 10 * cx.cfg.dt);
    } else if (cx.sc.name == "zero") {
        cx.report.add("bsde.zero_solution", max_abs(bw.y.slice(0)) - std::abs(cx.sc.init(0.0)), 0.0);
    }
    cx.report.note("cost J(u) = " + format_double(bw.cost()) + " +- " + format_double(bw.cost_standard_error()));

    auto os = cx.trace("bsde.csv");
    write_ensembles_csv(os, cx.grid, {{"x", &fw.x}, {"y", &bw.y}, {"z", &bw.z}}, 0, n, cx.stride());
}

void adjoint_checks(Context& cx, const Star& star, const AdjointFirst& first, const AdjointSecond& second,
                    const std::string& prefix) {
    const CoefficientSet& co = cx.sc.coeffs;
    const ForwardSolution& fw = star.fw();
    const int n = cx.grid.steps(), k = cx.grid.delay_steps();
    const std::size_t N = cx.cfg.particles;
    const double m = fw.terminal_stat;
    double phi_m = 0;
    if (co.terminal) {
        std::vector<double> parts(N);
        for (std::size_t j = 0; j < N; ++j) parts[j] = co.terminal(fw.x.at(j, n), m).m;
        phi_m = kernels::mean(parts);
    }
    double pt = 0, Pt = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const double x = fw.x.at(i, n);
        const TerminalJet jet = co.terminal ? co.terminal(x, m) : TerminalJet{};
        const double p = jet.x + co.terminal_inner.d1(x) * phi_m;
        const double P = jet.xx + co.terminal_inner.d2(x) * phi_m;
        pt = std::max(pt, std::abs(first.p.at(i, n) - p) / (1 + std::abs(p)));
        Pt = std::max(Pt, std::abs(second.P.at(i, n) - P) / (1 + std::abs(P)));
    }
    cx.report.add(prefix + ".p_terminal", pt, 1e-12);
    cx.report.add(prefix + ".P_terminal", Pt, 1e-12);
    cx.report.add(prefix + ".q_terminal", max_abs(first.q.slice(n)), 0.0);
    cx.report.add(prefix + ".Q_terminal", max_abs(second.Q.slice(n)), 0.0);
    cx.report.add(prefix + ".P1_terminal", max_abs(second.P1.slice(n)), 0.0);
    cx.report.add(prefix + ".Q1_terminal", max_abs(second.Q1.slice(n)), 0.0);
    double tails = 0;
    for (int j = n + 1; j <= n + k; ++j)
        for (std::size_t i = 0; i < N; ++i)
            for (const PathEnsemble* e : {&first.p, &first.q, &second.P, &second.Q, &second.P1, &second.Q1})
                tails = std::max(tails, std::abs(e->at(i, j)));
    cx.report.add(prefix + ".tails", tails, 0.0);
    cx.report.add(prefix + ".nonfinite",
                  count_nonfinite(first.p, n) + count_nonfinite(first.q, n) + count_nonfinite(second.P, n) +
                      count_nonfinite(second.P1, n),
                  0.0);
    // A deterministic state makes p deterministic up to regression noise.
    if (max_cross_sd(fw.x, n) <= 1e-12 * (1 + max_abs(fw.x.slice(n))))
        cx.report.add(prefix + ".p_cross_sd", max_cross_sd(first.p, n), 1e-3);
}

void adjoints_suite(Context& cx) {
    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, cx.sc.base, cx.grid, cx.bundle, cx.sc.init);
    const BackwardSolution bw = solve_backward_mfbsde(cx.sc.coeffs, fw, cx.grid, cx.bundle, cx.cfg.basis);
    const Star star{&fw, &bw};
    const AdjointFirst first = solve_first_adjoint(cx.sc.coeffs, star, cx.grid, cx.bundle, cx.cfg.basis);
    const AdjointSecond second = solve_second_adjoint(cx.sc.coeffs, star, first, cx.grid, cx.bundle, cx.cfg.basis);
    adjoint_checks(cx, star, first, second, "adjoint");
    auto os = cx.trace("adjoints.csv");
    write_adjoints_csv(os, cx.grid, first, second, cx.stride());
}

void rates_suite(Context& cx) {
    std::vector<RateTarget> targets;
    if (cx.cfg.targets.empty()) targets = all_rate_targets();
    for (const std::string& t : cx.cfg.targets) targets.push_back(parse_rate_target(t));
    const bool adjoint = std::any_of(targets.begin(), targets.end(), needs_adjoint);

    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, cx.sc.base, cx.grid, cx.bundle, cx.sc.init);
    const BackwardSolution bw = solve_backward_mfbsde(cx.sc.coeffs, fw, cx.grid, cx.bundle, cx.cfg.basis);
    const Star star{&fw, &bw};
    AdjointFirst first;
    if (adjoint) first = solve_first_adjoint(cx.sc.coeffs, star, cx.grid, cx.bundle, cx.cfg.basis);
    const SpikeFamily family{cx.sc.alternate, cx.tau(), cx.widths()};
    const ExpansionReport rep = run_rate_experiment(targets, cx.sc.coeffs, family, star, adjoint ? &first : nullptr,
                                                    cx.grid, cx.bundle, cx.sc.init);
    for (const RateSeries& s : rep.rates) {
        const std::string id = "rates." + rate_target_id(s.target);
        const double e = expected_slope(s.target);
        if (e > 0) cx.report.add(id + ".slope_error", std::abs(s.slope - e), 0.2);
        else cx.report.add_strictly_below(id + ".max_ratio_step", max_consecutive_ratio(s.normalized), 1.0);
    }
    auto os = cx.trace("rates.csv");
    write_rates_csv(os, rep);
}

void expansion_suite(Context& cx) {
    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, cx.sc.base, cx.grid, cx.bundle, cx.sc.init);
    const BackwardSolution bw = solve_backward_mfbsde(cx.sc.coeffs, fw, cx.grid, cx.bundle, cx.cfg.basis);
    const Star star{&fw, &bw};
    const AdjointFirst first = solve_first_adjoint(cx.sc.coeffs, star, cx.grid, cx.bundle, cx.cfg.basis);
    const AdjointSecond second = solve_second_adjoint(cx.sc.coeffs, star, first, cx.grid, cx.bundle, cx.cfg.basis);
    const SpikeFamily family{cx.sc.alternate, cx.tau(), cx.widths()};
    const ExpansionReport rep = check_expansion_residual(cx.sc.coeffs, family, star, first, second, cx.grid,
                                                         cx.bundle, cx.cfg.basis, cx.sc.init);
    std::vector<double> ratios;
    for (const ExpansionRow& r : rep.rows) ratios.push_back(r.ratio);
    if (rep.rows.size() < 2) throw InsufficientGrid("expansion needs at least two spike widths");
    cx.report.add_strictly_below("expansion.max_ratio_step", max_consecutive_ratio(ratios), 1.0);
    const ExpansionRow& big = rep.rows.front();
    const ExpansionRow& small = rep.rows.back();
    const double se = std::sqrt(small.ratio_se * small.ratio_se + 0.25 * big.ratio_se * big.ratio_se);
    cx.report.add("expansion.halving", small.ratio - 0.5 * big.ratio, 3 * se + 10 * cx.cfg.dt);
    for (const ExpansionRow& r : rep.rows)
        cx.report.add("expansion.second_vs_first.eps=" + format_double(r.eps), r.ratio - r.ratio_first, 0.0);
    auto os = cx.trace("expansion.csv");
    write_expansion_csv(os, rep);
}

struct FinanceRun {
    CandidateControl candidate;
    ForwardSolution fw;
    BackwardSolution bw;
    AdjointFirst first;
    AdjointSecond second;
    Star star() const { return {&fw, &bw}; }
};

FinanceRun solve_finance(Context& cx, const ControlSpec& control) {
    FinanceRun r;
    r.fw = simulate_forward(cx.sc.coeffs, control, cx.grid, cx.bundle, cx.sc.init);
    r.bw = solve_backward_mfbsde(cx.sc.coeffs, r.fw, cx.grid, cx.bundle, cx.cfg.basis);
    auto [first, second] = solve_finance_adjoints(cx.cfg.market, cx.cfg.investor, r.star(), cx.grid, cx.bundle,
                                                  cx.cfg.basis);
    r.first = std::move(first);
    r.second = std::move(second);
    return r;
}

CandidateControl run_candidate(Context& cx) {
    CandidateControl c =
        candidate_control(cx.cfg.market, cx.cfg.investor, cx.grid, cx.bundle, cx.cfg.basis, cx.cfg.iterations);
    std::string changes = "candidate sup-changes:";
    for (double s : c.sup_changes) changes += ' ' + format_double(s);
    cx.report.note(changes);
    cx.report.add("finance.candidate_change", c.sup_changes.empty() ? 0.0 : c.sup_changes.back(), 1e-2);
    auto os = cx.trace("candidate.csv");
    os << "time,u\n";
    for (int j = 0; j <= cx.grid.steps(); ++j)
        os << format_double(cx.grid.time(j)) << ',' << format_double(c.values[static_cast<std::size_t>(j)]) << '\n';
    return c;
}

void duality_and_gamma(Context& cx, const Star& star, const AdjointFirst& first, const AdjointSecond& second) {
    const SpikeVariation spike = make_spike(cx.grid, cx.sc.alternate, cx.tau(), cx.cfg.eps_fraction * cx.cfg.T);
    const AuxiliaryBsde aux =
        solve_auxiliary_bsde(cx.sc.coeffs, star, first, second, spike, cx.grid, cx.bundle, cx.cfg.basis);
    const GammaProcess gamma = simulate_gamma(cx.sc.coeffs, star, cx.grid, cx.bundle);
    const DualityResult d = check_duality_identity(aux, gamma, spike, cx.grid);
    cx.report.note("duality: Y-breve(0) = " + format_double(d.lhs) + ", integral = " + format_double(d.rhs));
    cx.report.add("duality.residual", std::abs(d.diff), 3 * d.standard_error + 10 * cx.cfg.dt);
    const GammaPositivity g = check_gamma_positivity(gamma, cx.grid);
    cx.report.add_strictly_below("gamma.negative_min", -g.min_value, 0.0);
}

void write_cells(const Context& cx, const SmpReport& rep, const std::string& name) {
    auto os = cx.trace(name);
    os << "step,particle,min_gap,argmin\n";
    for (const SmpCell& c : rep.cells)
        os << c.step << ',' << c.particle << ',' << format_double(c.min_gap) << ',' << format_double(c.argmin)
           << '\n';
}

void smp_suite(Context& cx) {
    ControlSpec base = cx.sc.base;
    if (cx.sc.name == "finance") base = run_candidate(cx).control;
    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, base, cx.grid, cx.bundle, cx.sc.init);
    const BackwardSolution bw = solve_backward_mfbsde(cx.sc.coeffs, fw, cx.grid, cx.bundle, cx.cfg.basis);
    const Star star{&fw, &bw};
    const AdjointFirst first = solve_first_adjoint(cx.sc.coeffs, star, cx.grid, cx.bundle, cx.cfg.basis);
    const AdjointSecond second = solve_second_adjoint(cx.sc.coeffs, star, first, cx.grid, cx.bundle, cx.cfg.basis);
    const SmpReport rep = check_smp_inequality(cx.sc.coeffs, star, first, second, cx.sc.coeffs.controls, cx.grid,
                                               SmpOptions{cx.cfg.max_cells});
    cx.report.add("smp.negative_min_gap", -rep.global_min_gap, rep.tolerance);
    cx.report.note("smp: fraction of cells below tolerance " + format_double(rep.fraction_below_tol));
    duality_and_gamma(cx, star, first, second);
    write_cells(cx, rep, "smp_cells.csv");
}

std::vector<ChaosGap> chaos_sweep(Context& cx, const ControlSpec& control, const ForwardSolution& mean_field) {
    const std::vector<NPlayerSamples> samples =
        simulate_nplayer(cx.cfg.market, cx.cfg.investor, control, cx.grid, cx.cfg.nplayer);
    const std::vector<ChaosGap> gaps = chaos_gaps(samples, mean_field.x.slice(cx.grid.steps()), cx.cfg.seed);
    for (std::size_t a = 1; a < gaps.size(); ++a)
        cx.report.add("nplayer.w2_increase.N=" + std::to_string(gaps[a].players), gaps[a].w2 - gaps[a - 1].w2,
                      std::hypot(gaps[a].se, gaps[a - 1].se));
    auto os = cx.trace("chaos.csv");
    os << "players,w2,se\n";
    for (const ChaosGap& g : gaps) os << g.players << ',' << format_double(g.w2) << ',' << format_double(g.se) << '\n';
    return gaps;
}

void finance_suite(Context& cx) {
    const MarketModel& mk = cx.cfg.market;
    const InvestorModel& inv = cx.cfg.investor;
    const CandidateControl cand = run_candidate(cx);
    const FinanceRun run = solve_finance(cx, cand.control);
    adjoint_checks(cx, run.star(), run.first, run.second, "finance.adjoint");

    const SmpReport rep = check_finance_smp(mk, inv, run.star(), run.first, run.second, cx.sc.coeffs.controls,
                                            cx.grid, SmpOptions{cx.cfg.max_cells});
    cx.report.add("finance.smp.negative_min_gap", -rep.global_min_gap, rep.tolerance);
    write_cells(cx, rep, "smp_cells.csv");

    std::vector<double> shifted = cand.values;
    for (double& u : shifted) u += cx.cfg.shift;
    const FinanceRun moved = solve_finance(cx, ControlSpec::tabulated(cx.grid, shifted));
    const SmpReport bad = check_finance_smp(mk, inv, moved.star(), moved.first, moved.second, cx.sc.coeffs.controls,
                                            cx.grid, SmpOptions{cx.cfg.max_cells});
    const double s0 = mk.volatility(0.0);
    const double P0 = kernels::mean(moved.second.P.slice(0));
    const double analytic = 0.5 * (inv.lambda + P0 * s0 * s0) * cx.cfg.shift * cx.cfg.shift;
    cx.report.add("finance.shifted_min_gap", bad.global_min_gap, -0.1 * analytic);

    duality_and_gamma(cx, run.star(), run.first, run.second);
    chaos_sweep(cx, cand.control, run.fw);

    auto os = cx.trace("paths.csv");
    write_ensembles_csv(os, cx.grid, {{"wealth", &run.fw.x}, {"utility", &run.bw.y}}, 0, cx.grid.steps(),
                        cx.stride());
    cx.report.note("utility J(u*) = " + format_double(run.bw.cost()) + " +- " +
                   format_double(run.bw.cost_standard_error()));
}

void nplayer_suite(Context& cx) {
    const CandidateControl cand = run_candidate(cx);
    const ForwardSolution fw = simulate_forward(cx.sc.coeffs, cand.control, cx.grid, cx.bundle, cx.sc.init);
    chaos_sweep(cx, cand.control, fw);
}

using SuiteFn = void (*)(Context&);

const std::map<std::string, SuiteFn>& registry() {
    static const std::map<std::string, SuiteFn> r{
        {"simulate", simulate_suite}, {"bsde", bsde_suite},         {"adjoints", adjoints_suite},
        {"rates", rates_suite},       {"expansion", expansion_suite}, {"smp", smp_suite},
        {"finance", finance_suite},   {"nplayer", nplayer_suite},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> n{"simulate", "bsde", "adjoints", "rates",
                                            "expansion", "smp", "finance", "nplayer"};
    return n;
}

std::string default_model(const std::string& suite) {
    if (suite == "simulate" || suite == "bsde") return "gbm";
    if (suite == "rates") return "gbm-spike";
    if (suite == "expansion") return "smooth";
    return "finance";
}

Scenario resolve_scenario(const ExperimentConfig& c) {
    if (!registry().count(c.suite)) throw ConfigError("unknown suite '" + c.suite + "'");
    validate(c);
    const std::string model = c.model.empty() ? default_model(c.suite) : c.model;
    if ((c.suite == "finance" || c.suite == "nplayer") && model != "finance")
        throw ConfigError("[model] name: suite '" + c.suite + "' requires the finance model");
    Scenario sc;
    if (model == "finance") {
        try {
            sc = finance_scenario(c.market, c.investor);
        } catch (const ModelInvariant& e) {
            throw ConfigError(std::string("[finance] ") + e.what());
        }
    } else if (model == "custom") {
        sc = custom_scenario(c.custom);
    } else {
        sc = builtin_scenario(model);
    }
    sc.name = model;
    if (c.control_lo || c.control_hi || c.control_points) {
        const ControlSet& u = sc.coeffs.controls;
        const double lo = c.control_lo.value_or(u.lower()), hi = c.control_hi.value_or(u.upper());
        const int pts = c.control_points.value_or(static_cast<int>(u.points().size()));
        if (hi < lo) throw ConfigError("[controls] hi < lo");
        sc.coeffs.controls = ControlSet::interval(lo, hi, pts);
    }
    return sc;
}

RunReport run_suite(const ExperimentConfig& config, const fs::path& out) {
    Scenario sc = resolve_scenario(config);
    const TimeGrid grid = build_grid(config.T, config.l, config.dt);
    Context cx{config, std::move(sc), grid, sample_brownian(grid, config.particles, config.seed), out, {}};
    try {
        registry().at(config.suite)(cx);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        cx.report.add("error." + e.kind(), std::numeric_limits<double>::quiet_NaN(), 0.0);
        cx.report.note(e.what());
    }
    return std::move(cx.report);
}

RunReport execute(const ExperimentConfig& config, const fs::path& out) {
    resolve_scenario(config);
    fs::create_directories(out);
    RunReport report = run_suite(config, out);
    report.write_csv(out / "report.csv");
    report.write_summary(out / "summary.txt", config.suite, config.seed, echo(config));
    return report;
}

}  // namespace mfsmp::cli
