#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "finance_oracle.hpp"
#include "mfsmp/adjoint.hpp"
#include "mfsmp/brownian.hpp"
#include "mfsmp/bsde.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/expansion.hpp"
#include "mfsmp/finance.hpp"
#include "mfsmp/kernels.hpp"
#include "mfsmp/models.hpp"
#include "mfsmp/regression.hpp"

using namespace mfsmp;

namespace {

struct Solved {
    TimeGrid grid;
    BrownianBundle bundle;
    Scenario sc;
    ForwardSolution fw;
    BackwardSolution bw;
    Star star() const { return {&fw, &bw}; }
};

Solved solve(const Scenario& sc, double dt, std::size_t n, const ControlSpec* control = nullptr,
             RegressionBasis basis = {}) {
    const TimeGrid grid = build_grid(1.5, 1.0, dt);
    BrownianBundle bundle = sample_brownian(grid, n, 42);
    ForwardSolution fw = simulate_forward(sc.coeffs, control ? *control : sc.base, grid, bundle, sc.init);
    BackwardSolution bw = solve_backward_mfbsde(sc.coeffs, fw, grid, bundle, basis);
    return {grid, std::move(bundle), sc, std::move(fw), std::move(bw)};
}

double sup_abs(const PathEnsemble& e, int first, int last) {
    double m = 0;
    for (int j = first; j <= last; ++j)
        for (std::size_t i = 0; i < e.particles(); ++i) m = std::max(m, std::abs(e.at(i, j)));
    return m;
}

MarketModel market() { return MarketModel{}; }

}  // namespace

TEST(Regression, ConstantTargets) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd f(200, 2);
    for (int i = 0; i < 200; ++i) f.row(i) << n01(rng), n01(rng);
    const std::vector<double> t(200, 3.25);
    const FittedRegression r = regress_conditional(f, t, RegressionBasis{});
    for (int i = 0; i < 5; ++i) {
        const double row[2] = {n01(rng), n01(rng)};
        EXPECT_NEAR(r(row), 3.25, 1e-9);
    }
}

TEST(Regression, LinearTargetsRecoveredExactly) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd f(100, 2);
    std::vector<double> t(100);
    for (int i = 0; i < 100; ++i) {
        f.row(i) << n01(rng), 3 * n01(rng);
        t[i] = 1 - 2 * f(i, 0) + 0.5 * f(i, 1);
    }
    const FittedRegression r = regress_conditional(f, t, RegressionBasis{1, 0.0});
    const double row[2] = {0.3, -1.1};
    EXPECT_NEAR(r(row), 1 - 0.6 - 0.55, 1e-10);
}

TEST(Regression, QuadraticRepresentable) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd f(1000, 2);
    std::vector<double> t(1000);
    for (int i = 0; i < 1000; ++i) {
        f.row(i) << n01(rng), n01(rng);
        t[i] = f(i, 0) * f(i, 0);
    }
    const LeastSquaresProjector proj(f, RegressionBasis{2, 0.0});
    const std::vector<double> fitted = proj.project(t);
    for (int i = 0; i < 1000; ++i) ASSERT_NEAR(fitted[i], t[i], 1e-8);
}

TEST(Regression, TooFewRowsIsRankDeficient) {
    Eigen::MatrixXd f(3, 2);
    f << 0.1, 0.5, -0.3, 0.2, 0.9, -1.0;
    const std::vector<double> t{1, 2, 3};
    EXPECT_THROW(regress_conditional(f, t, RegressionBasis{2, 0.0}), RankDeficient);
}

TEST(Bsde, ConstantStateGivesConstantSolution) {
    CustomTable t;
    t.terminal["x"] = 1;
    t.init = 2.0;
    const Solved s = solve(custom_scenario(t), 0.01, 100);
    EXPECT_LT(sup_abs(s.bw.y, 0, s.grid.steps()) - 2.0, 1e-12);
    for (double y : s.bw.y.slice(0)) EXPECT_NEAR(y, 2.0, 1e-12);
    EXPECT_LT(sup_abs(s.bw.z, 0, s.grid.steps()), 1e-12);
}

TEST(Bsde, UnitDriverIntegratesTime) {
    CustomTable t;
    t.driver["c"] = 1;
    t.drift["x"] = 0.1;
    t.diffusion["x"] = 0.2;
    const Solved s = solve(custom_scenario(t), 0.01, 500);
    for (int j = 0; j <= s.grid.steps(); ++j) {
        for (std::size_t i = 0; i < 500; i += 50) ASSERT_NEAR(s.bw.y.at(i, j), 1.5 - s.grid.time(j), 0.01);
    }
    EXPECT_LT(sup_abs(s.bw.z, 0, s.grid.steps() - 1), 1e-8);
}

TEST(Bsde, DiscountedGbm) {
    const Solved s = solve(builtin_scenario("gbm"), 1e-3, 10000);
    const auto xT = s.fw.x.slice(s.grid.steps());
    std::vector<double> disc(xT.begin(), xT.end());
    for (double& v : disc) v *= std::exp(-0.05 * 1.5);
    EXPECT_LE(std::abs(s.bw.cost() - kernels::mean(disc)), 3 * kernels::standard_error(disc) + 10e-3);
}

TEST(Bsde, TowerPropertyWithStateOnlyDriver) {
    CustomTable t;
    t.drift["x"] = 0.1;
    t.diffusion["x"] = 0.2;
    t.driver["x"] = 0.3;
    t.terminal["x"] = 1;
    const Solved s = solve(custom_scenario(t), 0.01, 5000);
    const int n = s.grid.steps(), k = s.grid.delay_steps();
    for (int j : {n / 4, n / 2, 3 * n / 4}) {
        Eigen::MatrixXd f(5000, 2);
        std::vector<double> target(5000);
        for (std::size_t i = 0; i < 5000; ++i) {
            f(i, 0) = s.fw.x.at(i, j);
            f(i, 1) = s.fw.x.at(i, j - k);
            double acc = s.fw.x.at(i, n);
            for (int m = j; m < n; ++m) acc += 0.3 * s.fw.x.at(i, m) * s.grid.dt();
            target[i] = acc;
        }
        const std::vector<double> fitted = LeastSquaresProjector(f, RegressionBasis{}).project(target);
        double rms = 0, spread = 0;
        for (std::size_t i = 0; i < 5000; ++i) {
            rms += std::pow(fitted[i] - s.bw.y.at(i, j), 2);
            spread += std::pow(target[i] - fitted[i], 2);
        }
        // Projection noise of a six-term basis plus the Euler bias.
        const double noise = std::sqrt(spread / 5000) * std::sqrt(6.0 / 5000);
        EXPECT_LT(std::sqrt(rms / 5000), 3 * noise + s.grid.dt()) << j;
    }
}

TEST(Bsde, TerminalConditionIsExact) {
    const Solved s = solve(builtin_scenario("smooth"), 0.01, 300);
    const int n = s.grid.steps();
    for (std::size_t i = 0; i < 300; ++i) {
        const double x = s.fw.x.at(i, n);
        ASSERT_EQ(s.bw.y.at(i, n), s.sc.coeffs.terminal(x, s.fw.terminal_stat).value);
    }
}

TEST(FirstAdjoint, TrivialCoefficients) {
    CustomTable t;
    t.terminal["x"] = 1;
    t.diffusion["c"] = 0.3;
    const Solved s = solve(custom_scenario(t), 0.01, 200);
    const AdjointFirst a = solve_first_adjoint(s.sc.coeffs, s.star(), s.grid, s.bundle, RegressionBasis{});
    const int n = s.grid.steps(), k = s.grid.delay_steps();
    for (int j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < 200; ++i) {
            ASSERT_NEAR(a.p.at(i, j), 1.0, 1e-12);
            ASSERT_NEAR(a.q.at(i, j), 0.0, 1e-12);
        }
    EXPECT_EQ(sup_abs(a.p, n + 1, n + k), 0.0);
    EXPECT_EQ(sup_abs(a.q, n, n + k), 0.0);
}

TEST(FirstAdjoint, FinanceMatchesMethodOfSteps) {
    const InvestorModel inv;
    const Scenario sc = finance_scenario(market(), inv);
    const Solved s = solve(sc, 1e-3, 1000);
    const AdjointFirst a = solve_first_adjoint(sc.coeffs, s.star(), s.grid, s.bundle, RegressionBasis{});
    const FinanceOracle o = finance_oracle({});
    double err = 0, sd = 0;
    for (int j = 0; j <= s.grid.steps(); ++j) {
        err = std::max(err, std::abs(kernels::mean(a.p.slice(j)) - o.p[j]));
        sd = std::max(sd, kernels::standard_error(a.p.slice(j)) * std::sqrt(1000.0));
    }
    EXPECT_LE(err, 1e-2);
    EXPECT_LE(sd, 1e-3);
    for (double p : a.p.slice(s.grid.steps())) EXPECT_EQ(p, 1.0);
}

TEST(SecondAdjoint, ZeroSourcesGiveZero) {
    CustomTable t;
    t.terminal["x"] = 1;
    t.drift["x"] = 0.2;
    const Solved s = solve(custom_scenario(t), 0.01, 100);
    const AdjointFirst a = solve_first_adjoint(s.sc.coeffs, s.star(), s.grid, s.bundle, RegressionBasis{});
    const AdjointSecond b = solve_second_adjoint(s.sc.coeffs, s.star(), a, s.grid, s.bundle, RegressionBasis{});
    const int last = s.grid.steps() + s.grid.delay_steps();
    for (const PathEnsemble* e : {&b.P, &b.Q, &b.P1, &b.Q1}) EXPECT_EQ(sup_abs(*e, 0, last), 0.0);
}

TEST(SecondAdjoint, ConstantTerminalCurvaturePropagates) {
    CustomTable t;
    t.terminal["xx"] = 1;
    const Solved s = solve(custom_scenario(t), 0.01, 100);
    const AdjointFirst a = solve_first_adjoint(s.sc.coeffs, s.star(), s.grid, s.bundle, RegressionBasis{});
    const AdjointSecond b = solve_second_adjoint(s.sc.coeffs, s.star(), a, s.grid, s.bundle, RegressionBasis{});
    const int n = s.grid.steps(), k = s.grid.delay_steps();
    for (int j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < 100; ++i) {
            ASSERT_NEAR(b.P.at(i, j), 2.0, 1e-12);
            ASSERT_EQ(b.P1.at(i, j), 0.0);
        }
    EXPECT_EQ(sup_abs(b.P, n + 1, n + k), 0.0);
}

TEST(SecondAdjoint, CurvedFinanceMatchesMethodOfSteps) {
    InvestorModel inv;
    inv.zeta = 0.5;
    const Scenario sc = finance_scenario(market(), inv);
    const Solved s = solve(sc, 1e-3, 500);
    const AdjointFirst a = solve_first_adjoint(sc.coeffs, s.star(), s.grid, s.bundle, RegressionBasis{});
    const AdjointSecond b = solve_second_adjoint(sc.coeffs, s.star(), a, s.grid, s.bundle, RegressionBasis{});
    FinanceOracleParams prm;
    prm.zeta = 0.5;
    const FinanceOracle o = finance_oracle(prm);
    double ey = 0, ep = 0, eP = 0, eP1 = 0;
    for (int j = 0; j <= s.grid.steps(); ++j) {
        ey = std::max(ey, std::abs(kernels::mean(s.bw.y.slice(j)) - o.y[j]));
        ep = std::max(ep, std::abs(kernels::mean(a.p.slice(j)) - o.p[j]));
        eP = std::max(eP, std::abs(kernels::mean(b.P.slice(j)) - o.P[j]));
        eP1 = std::max(eP1, std::abs(kernels::mean(b.P1.slice(j)) - o.P1[j]));
    }
    EXPECT_LE(ey, 1e-2);
    EXPECT_LE(ep, 1e-2);
    EXPECT_LE(eP, 1e-2);
    EXPECT_LE(eP1, 1e-2);
    EXPECT_GT(std::abs(o.P[0]), 0.1);
    EXPECT_GT(std::abs(o.P1[0]), 1e-3);
}

TEST(Auxiliary, ZeroWidthIsZero) {
    const Solved s = solve(builtin_scenario("smooth"), 0.01, 200);
    const RegressionBasis basis;
    const AdjointFirst a = solve_first_adjoint(s.sc.coeffs, s.star(), s.grid, s.bundle, basis);
    const AdjointSecond b = solve_second_adjoint(s.sc.coeffs, s.star(), a, s.grid, s.bundle, basis);
    const SpikeVariation none = make_spike(s.grid, s.sc.alternate, 0.9, 0.0);
    const AuxiliaryBsde aux = solve_auxiliary_bsde(s.sc.coeffs, s.star(), a, b, none, s.grid, s.bundle, basis);
    EXPECT_EQ(sup_abs(aux.y, 0, s.grid.steps()), 0.0);
    EXPECT_EQ(sup_abs(aux.z, 0, s.grid.steps()), 0.0);
}

TEST(Auxiliary, ConstantSourceIntegrates) {
    CustomTable t;
    t.driver["v"] = 0.7;
    const Solved s = solve(custom_scenario(t), 0.01, 50);
    const RegressionBasis basis;
    const AdjointFirst a = solve_first_adjoint(s.sc.coeffs, s.star(), s.grid, s.bundle, basis);
    const AdjointSecond b = solve_second_adjoint(s.sc.coeffs, s.star(), a, s.grid, s.bundle, basis);
    const SpikeVariation sp = make_spike(s.grid, s.sc.alternate, 0.6, 0.3);
    const AuxiliaryBsde aux = solve_auxiliary_bsde(s.sc.coeffs, s.star(), a, b, sp, s.grid, s.bundle, basis);
    for (int j = 0; j <= s.grid.steps(); ++j) {
        const double t0 = s.grid.time(j);
        const double expect = 0.7 * std::clamp(sp.tau() + sp.eps() - t0, 0.0, sp.eps());
        ASSERT_NEAR(aux.y.at(3, j), expect, 1e-12) << j;
    }
}

TEST(Auxiliary, SupNormShrinksFasterThanEps) {
    const Solved s = solve(builtin_scenario("smooth"), 0.005, 1000);
    const RegressionBasis basis;
    const AdjointFirst a = solve_first_adjoint(s.sc.coeffs, s.star(), s.grid, s.bundle, basis);
    const AdjointSecond b = solve_second_adjoint(s.sc.coeffs, s.star(), a, s.grid, s.bundle, basis);
    std::vector<double> ratio;
    for (double eps : {0.3, 0.15, 0.075}) {
        const SpikeVariation sp = make_spike(s.grid, s.sc.alternate, 0.9, eps);
        const AuxiliaryBsde aux = solve_auxiliary_bsde(s.sc.coeffs, s.star(), a, b, sp, s.grid, s.bundle, basis);
        std::vector<double> sup(1000, 0.0);
        for (int j = 0; j <= s.grid.steps(); ++j)
            for (std::size_t i = 0; i < 1000; ++i) sup[i] = std::max(sup[i], aux.y.at(i, j) * aux.y.at(i, j));
        ratio.push_back(kernels::mean(sup) / sp.eps());
    }
    EXPECT_TRUE(strictly_decreasing(ratio));
}

TEST(Gamma, TrivialDriverGivesOne) {
    const Solved s = solve(builtin_scenario("gbm-spike"), 0.01, 100);
    CoefficientSet c = s.sc.coeffs;
    c.driver = [](const DriverArgs&) { return DriverJet{}; };
    c.driver_inner = PlanarFunction::zero();
    const GammaProcess g = simulate_gamma(c, s.star(), s.grid, s.bundle);
    for (int j = 0; j <= s.grid.steps(); ++j)
        for (double v : g.gamma.slice(j)) ASSERT_EQ(v, 1.0);
    EXPECT_EQ(check_gamma_positivity(g, s.grid).min_value, 1.0);
}

TEST(Gamma, LinearDriverIsExponential) {
    CustomTable t;
    t.driver["y"] = 0.4;
    t.terminal["x"] = 1;
    const Solved s = solve(custom_scenario(t), 1e-3, 20);
    const GammaProcess g = simulate_gamma(s.sc.coeffs, s.star(), s.grid, s.bundle);
    for (int j = 0; j <= s.grid.steps(); j += 100)
        ASSERT_NEAR(g.gamma.at(0, j), std::exp(0.4 * s.grid.time(j)), 5e-3 * std::exp(0.6));
}

TEST(Gamma, StochasticExponentialIsMartingale) {
    CustomTable t;
    t.driver["z"] = 0.5;
    t.terminal["x"] = 1;
    t.diffusion["c"] = 0.2;
    const Solved s = solve(custom_scenario(t), 1e-3, 10000);
    const GammaProcess g = simulate_gamma(s.sc.coeffs, s.star(), s.grid, s.bundle);
    const auto gT = g.gamma.slice(s.grid.steps());
    EXPECT_LT(std::abs(kernels::mean(gT) - 1.0), 3 * kernels::standard_error(gT));
}

TEST(Gamma, PositiveOnFinance) {
    const Scenario sc = finance_scenario(market(), InvestorModel{});
    const ControlSpec u = ControlSpec::constant(0.5);
    const Solved s = solve(sc, 0.005, 2000, &u);
    const GammaPositivity p = check_gamma_positivity(simulate_gamma(sc.coeffs, s.star(), s.grid, s.bundle), s.grid);
    EXPECT_TRUE(p.positive);
    EXPECT_GT(p.min_value, 0.0);
}

TEST(Bsde, BasisEnrichmentIsStable) {
    const Scenario sc = finance_scenario(market(), InvestorModel{});
    const ControlSpec u = ControlSpec::constant(0.5);
    const Solved lo = solve(sc, 0.005, 5000, &u, RegressionBasis{2, 1e-8});
    const Solved hi = solve(sc, 0.005, 5000, &u, RegressionBasis{4, 1e-8});
    const double se = kernels::standard_error(lo.bw.y.slice(lo.grid.steps()));
    EXPECT_LT(std::abs(lo.bw.cost() - hi.bw.cost()), 3 * std::sqrt(2.0) * se);
}
