#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mfsmp/brownian.hpp"
#include "mfsmp/coefficients.hpp"
#include "mfsmp/csv.hpp"
#include "mfsmp/cylindrical.hpp"
#include "mfsmp/empirical_measure.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "mfsmp/models.hpp"
#include "mfsmp/path_ensemble.hpp"
#include "mfsmp/philox.hpp"
#include "mfsmp/time_grid.hpp"
#include "mfsmp/wasserstein.hpp"

using namespace mfsmp;

TEST(Grid, ExactDivision) {
    const TimeGrid g = build_grid(1.5, 1.0, 0.25);
    EXPECT_EQ(g.delay_steps(), 4);
    EXPECT_EQ(g.steps(), 6);
    EXPECT_EQ(g.first_index(), -4);
    EXPECT_EQ(g.last_index(), 10);
}

TEST(Grid, RejectsNonAlignedDelay) { EXPECT_THROW(build_grid(1.5, 1.0, 0.3), NonAlignedDelay); }

TEST(Grid, RejectsDelayRegime) {
    EXPECT_THROW(build_grid(2.5, 1.0, 0.25), DelayRegime);
    EXPECT_THROW(build_grid(1.0, 1.0, 0.25), DelayRegime);
    EXPECT_NO_THROW(build_grid(2.0, 1.0, 0.25));
}

TEST(Grid, ShiftByDelayIsExact) {
    const TimeGrid g = build_grid(1.5, 1.0, 1e-3);
    for (int i = g.first_index() + g.delay_steps(); i <= g.last_index(); ++i) {
        ASSERT_EQ(g.time(i), i * g.dt());
        ASSERT_NEAR(g.time(i) - g.time(i - g.delay_steps()), 1.0, 1e-12);
    }
    EXPECT_EQ(g.time(g.steps()), g.steps() * g.dt());
}

TEST(Philox, StatelessAndKeyed) {
    EXPECT_EQ(standard_normal(42, 3, 7), standard_normal(42, 3, 7));
    EXPECT_NE(standard_normal(42, 3, 7), standard_normal(43, 3, 7));
    EXPECT_NE(standard_normal(42, 3, 7), standard_normal(42, 4, 7));
    EXPECT_NE(derive_seed(42, 8, 0), derive_seed(42, 64, 0));
    for (int i = 0; i < 1000; ++i) ASSERT_LT(uniform_index(1, 2, i, 17), 17u);
}

TEST(Brownian, RegenerationIsIdentical) {
    const TimeGrid g = build_grid(1.5, 1.0, 0.01);
    const BrownianBundle a = sample_brownian(g, 100, 42), b = sample_brownian(g, 100, 42);
    for (int j = 0; j < g.steps(); ++j) ASSERT_TRUE(std::ranges::equal(a.step(j), b.step(j)));
}

TEST(Brownian, StreamsDoNotDependOnParticleCount) {
    const TimeGrid g = build_grid(1.5, 1.0, 0.01);
    const BrownianBundle small = sample_brownian(g, 10, 7), large = sample_brownian(g, 100, 7);
    for (int j = 0; j < g.steps(); ++j)
        for (std::size_t i = 0; i < 10; ++i) ASSERT_EQ(small.increment(i, j), large.increment(i, j));
}

TEST(Brownian, IdenticalAcrossThreadCounts) {
    const TimeGrid g = build_grid(1.5, 1.0, 0.01);
    kernels::set_threads(1);
    const BrownianBundle a = sample_brownian(g, 257, 9);
    kernels::set_threads(4);
    const BrownianBundle b = sample_brownian(g, 257, 9);
    kernels::set_threads(0);
    for (int j = 0; j < g.steps(); ++j) ASSERT_TRUE(std::ranges::equal(a.step(j), b.step(j)));
}

TEST(Brownian, MomentsMatchScaledGaussian) {
    const TimeGrid g = build_grid(1.5, 1.0, 1e-3);
    const std::size_t N = 10000;
    const BrownianBundle b = sample_brownian(g, N, 42);
    const double count = static_cast<double>(N) * g.steps();
    double s = 0, s2 = 0;
    for (int j = 0; j < g.steps(); ++j)
        for (double w : b.step(j)) {
            s += w;
            s2 += w * w;
        }
    const double mean = s / count;
    const double var = s2 / count - mean * mean;
    EXPECT_LT(std::abs(mean), 4 * std::sqrt(g.dt() / count));
    EXPECT_LT(std::abs(var / g.dt() - 1), 0.05);
}

TEST(PathEnsemble, InitialSegmentAndTails) {
    const TimeGrid g = build_grid(1.5, 1.0, 0.25);
    const PathEnsemble x = PathEnsemble::with_initial_path(g, 3, [](double t) { return 2 + t; });
    for (int j = -4; j <= 0; ++j)
        for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(x.at(i, j), 2 + g.time(j));
    EXPECT_EQ(x.at(0, g.steps() + 1), 0.0);
    PathEnsemble z = PathEnsemble::zeros(g, 3);
    for (int j = -4; j <= g.steps(); ++j) EXPECT_EQ(z.at(1, j), 0.0);
    z.set(2, 5, 3.5);
    EXPECT_EQ(z.delayed(2, 5 + 4), 3.5);
    EXPECT_EQ(z.delayed(2, 5 + 3), 0.0);
}

TEST(EmpiricalMeasure, Expectations) {
    const std::vector<double> s{1, 2, 3};
    EXPECT_DOUBLE_EQ(empirical_expectation(EmpiricalMeasure(s), [](double x) { return x; }), 2.0);
    EXPECT_DOUBLE_EQ(empirical_expectation(EmpiricalMeasure(s), [](double) { return 4.5; }), 4.5);
    const std::vector<double> pm{-1, 1};
    EXPECT_DOUBLE_EQ(empirical_expectation(EmpiricalMeasure(pm), [](double x) { return x * x; }), 1.0);
}

namespace {

ScalarFunction quadratic() { return ScalarFunction::square(); }

}  // namespace

TEST(Lions, FirstDerivativeExamples) {
    const std::vector<double> mean3{2, 3, 4};
    const CylindricalFunctional sq(quadratic(), ScalarFunction::identity());
    EXPECT_DOUBLE_EQ(lions_first(sq, EmpiricalMeasure(mean3), 0.7), 6.0);

    const CylindricalFunctional id(ScalarFunction::linear(1.0), ScalarFunction::identity());
    for (double a : {-2.0, 0.0, 5.0}) EXPECT_DOUBLE_EQ(lions_first(id, EmpiricalMeasure(mean3), a), 1.0);

    const std::vector<double> ones{1, 1};
    const CylindricalFunctional sqsq(quadratic(), quadratic());
    EXPECT_DOUBLE_EQ(lions_first(sqsq, EmpiricalMeasure(ones), 1.0), 4.0);
}

TEST(Lions, MixedDerivativeExamples) {
    const std::vector<double> s{0.3, -1.2, 2.0};
    const CylindricalFunctional lin(quadratic(), ScalarFunction::linear(3.0, 1.0));
    EXPECT_EQ(lions_mixed(lin, EmpiricalMeasure(s), 0.4), 0.0);
    const CylindricalFunctional m(ScalarFunction::identity(), quadratic());
    EXPECT_DOUBLE_EQ(lions_mixed(m, EmpiricalMeasure(s), 2.0), 2.0);
}

TEST(Lions, MixedMatchesDifferenceOfFirst) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::vector<ScalarFunction> fs{ScalarFunction::sine(), ScalarFunction::cosine(), quadratic()};
    for (int trial = 0; trial < 30; ++trial) {
        const CylindricalFunctional g(fs[trial % 3], fs[(trial / 3) % 3]);
        std::vector<double> s(6);
        for (double& v : s) v = u(rng);
        const EmpiricalMeasure mu(s);
        const double a = u(rng), h = 1e-4;
        const double fd = (lions_first(g, mu, a + h) - lions_first(g, mu, a - h)) / (2 * h);
        EXPECT_NEAR(lions_mixed(g, mu, a), fd, 10 * h * h + 1e-9);
    }
}

TEST(Lions, FdOracleExamples) {
    const std::vector<double> s{0.5, 1.5, -2.0, 4.0};
    const EmpiricalMeasure mu(s);
    const CylindricalFunctional lin(ScalarFunction::linear(2.0, 1.0), ScalarFunction::linear(3.0));
    for (double h : {1e-1, 1e-3}) EXPECT_NEAR(lions_fd_oracle(lin, mu, 1, h), 6.0 / 4, 1e-9);
    const CylindricalFunctional constant(ScalarFunction::linear(0.0, 2.0), ScalarFunction::identity());
    EXPECT_EQ(lions_fd_oracle(constant, mu, 2, 1e-3), 0.0);
}

TEST(Lions, FdOracleConvergesAtFirstOrder) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    const std::vector<ScalarFunction> fs{ScalarFunction::sine(), ScalarFunction::cosine(), quadratic(),
                                         ScalarFunction::identity()};
    int checked = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const CylindricalFunctional g(fs[trial % 4], fs[(trial / 4) % 3]);
        std::vector<double> s(5);
        for (double& v : s) v = u(rng);
        const EmpiricalMeasure mu(s);
        const std::size_t idx = trial % 5;
        const double exact = lions_first(g, mu, s[idx]) / 5.0;
        std::vector<double> err;
        for (double h : {1e-3, 1e-4, 1e-5}) err.push_back(std::abs(lions_fd_oracle(g, mu, idx, h) - exact));
        if (err[0] < 1e-10) continue;
        ++checked;
        const double slope = std::log10(err[0] / err[1]);
        EXPECT_GE(slope, 0.9) << "trial " << trial;
    }
    EXPECT_GT(checked, 50);
}

TEST(Wasserstein, Examples) {
    const std::vector<double> a{0.1, -0.4, 2.0};
    EXPECT_EQ(wasserstein2_1d(EmpiricalMeasure(a), EmpiricalMeasure(a)), 0.0);
    const std::vector<double> zeros(4, 0.0), ones(4, 1.0);
    EXPECT_DOUBLE_EQ(wasserstein2_1d(EmpiricalMeasure(zeros), EmpiricalMeasure(ones)), 1.0);
    const std::vector<double> u{0, 2}, v{3, 1};
    EXPECT_DOUBLE_EQ(wasserstein2_1d(EmpiricalMeasure(u), EmpiricalMeasure(v)), 1.0);
}

TEST(Wasserstein, BruteForceOptimalCoupling) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> u(5), v(5);
        for (double& x : u) x = n01(rng);
        for (double& x : v) x = n01(rng) + 0.5;
        std::vector<int> perm{0, 1, 2, 3, 4};
        double best = INFINITY;
        do {
            double c = 0;
            for (int i = 0; i < 5; ++i) c += (u[i] - v[perm[i]]) * (u[i] - v[perm[i]]);
            best = std::min(best, c);
        } while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_NEAR(wasserstein2_1d(EmpiricalMeasure(u), EmpiricalMeasure(v)), std::sqrt(best / 5), 1e-12);
    }
}

TEST(Wasserstein, MetricAxioms) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(40), b(40), c(40);
        for (auto* s : {&a, &b, &c})
            for (double& x : *s) x = n01(rng) * (1 + trial % 3);
        const EmpiricalMeasure A(a), B(b), C(c);
        EXPECT_EQ(wasserstein2_1d(A, B), wasserstein2_1d(B, A));
        EXPECT_LE(wasserstein2_1d(A, C), wasserstein2_1d(A, B) + wasserstein2_1d(B, C) + 1e-12);
        std::vector<double> shuffled = a;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        EXPECT_EQ(wasserstein2_1d(A, EmpiricalMeasure(shuffled)), 0.0);
    }
}

TEST(Wasserstein, RejectsPlanarMeasures) {
    const std::vector<double> x{1, 2}, y{3, 4};
    EXPECT_THROW(wasserstein2_1d(EmpiricalMeasure(x, y), EmpiricalMeasure(x)), DimensionMismatch);
}

TEST(Wasserstein, UnequalCountsResampleDeterministically) {
    const std::vector<double> a{0, 1, 2, 3, 4, 5}, b{0.5, 2.5};
    const double w1 = wasserstein2_1d(EmpiricalMeasure(a), EmpiricalMeasure(b), 42);
    EXPECT_EQ(w1, wasserstein2_1d(EmpiricalMeasure(a), EmpiricalMeasure(b), 42));
    EXPECT_GT(w1, 0.0);
}

TEST(Coefficients, BuiltinsPassDerivativeProbes) {
    for (const std::string& name : builtin_names()) {
        const ProbeReport r = probe_derivatives(builtin_scenario(name).coeffs, 42);
        EXPECT_TRUE(r.pass) << name << " " << r.worst_partial << " " << r.worst_excess;
    }
}

TEST(Coefficients, ProbeCatchesMiswiredPartial) {
    CoefficientSet c = builtin_scenario("gbm").coeffs;
    const auto drift = c.drift;
    c.drift = [drift](const SdeArgs& a) {
        SdeJet j = drift(a);
        j.x += 0.01;
        return j;
    };
    const ProbeReport r = probe_derivatives(c, 42);
    EXPECT_FALSE(r.pass);
}

TEST(Coefficients, GrowthProbe) {
    EXPECT_TRUE(probe_growth(builtin_scenario("gbm-spike").coeffs, 1).pass);
    CoefficientSet c = builtin_scenario("gbm").coeffs;
    c.growth_constant = 1e-3;
    EXPECT_FALSE(probe_growth(c, 1).pass);
}

TEST(Coefficients, ControlSets) {
    const ControlSet u = ControlSet::interval(-5, 5, 101);
    ASSERT_EQ(u.points().size(), 101u);
    EXPECT_DOUBLE_EQ(u.points().front(), -5.0);
    EXPECT_DOUBLE_EQ(u.points().back(), 5.0);
    EXPECT_NEAR(u.points()[50], 0.0, 1e-15);
    EXPECT_EQ(ControlSet::finite({0.5}).points(), std::vector<double>{0.5});
}

TEST(Models, UnknownNamesAreConfigErrors) {
    EXPECT_THROW(builtin_scenario("nope"), ConfigError);
    CustomTable t;
    t.drift["cubic"] = 1;
    EXPECT_THROW(build_custom_coeffs(t), ConfigError);
    CustomTable u;
    u.drift_inner = "tangent";
    EXPECT_THROW(build_custom_coeffs(u), ConfigError);
}

TEST(Csv, FormatRoundTrips) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 40 - 20);
        ASSERT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}
