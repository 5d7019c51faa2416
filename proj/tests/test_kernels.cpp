#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mfsmp/kernels.hpp"
#include "mfsmp/philox.hpp"

using namespace mfsmp;

namespace {

std::vector<double> normals(std::size_t n, std::uint64_t stream) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = standard_normal(7, stream, i) * (1 + 1e6 * (i % 3 == 0));
    return v;
}

class KernelThreads : public ::testing::Test {
protected:
    void TearDown() override { kernels::set_threads(0); }
};

}  // namespace

TEST_F(KernelThreads, SumIsBitwiseThreadInvariant) {
    for (std::size_t n : {0u, 1u, 7u, 4096u, 100003u}) {
        const auto v = normals(n, 1);
        kernels::set_threads(1);
        const double one = kernels::sum(v);
        for (int t : {2, 3, 8}) {
            kernels::set_threads(t);
            ASSERT_EQ(kernels::sum(v), one) << n << " " << t;
        }
        double scale = 0;
        for (double x : v) scale += std::abs(x);
        EXPECT_NEAR(kernels::serial::sum(v), one, 1e-13 * scale) << n;
    }
}

TEST_F(KernelThreads, MeanAndMeanProduct) {
    const auto a = normals(5000, 2);
    const auto b = normals(5000, 3);
    kernels::set_threads(1);
    const double m1 = kernels::mean(a), p1 = kernels::mean_product(a, b);
    kernels::set_threads(8);
    EXPECT_EQ(kernels::mean(a), m1);
    EXPECT_EQ(kernels::mean_product(a, b), p1);
    long double ref = 0;
    for (std::size_t i = 0; i < a.size(); ++i) ref += static_cast<long double>(a[i]) * b[i];
    EXPECT_NEAR(p1, static_cast<double>(ref / a.size()), 1e-9 * std::abs(p1) + 1e-6);
}

TEST(Kernels, StandardErrorFormula) {
    const std::vector<double> v{1, 2, 3, 4};
    EXPECT_NEAR(kernels::standard_error(v), std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
    EXPECT_EQ(kernels::standard_error(std::vector<double>{3.0}), 0.0);
}

TEST_F(KernelThreads, SeparableAverageMatchesSerialCrossAverage) {
    const std::size_t n = 700;
    const auto left = normals(n, 4);
    const auto right = normals(n, 5);
    const auto values = normals(n, 6);
    std::vector<double> ref(n), out(n);
    kernels::serial::cross_average(n, [&](std::size_t i, std::size_t j) { return left[i] * right[j]; }, values, ref);
    for (int t : {1, 4}) {
        kernels::set_threads(t);
        kernels::separable_average(left, right, values, out);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(out[i], ref[i], 1e-9 * (std::abs(ref[i]) + 1)) << i;
    }
}

TEST_F(KernelThreads, ParallelForVisitsEveryIndexOnce) {
    kernels::set_threads(4);
    std::vector<int> hits(10007, 0);
    kernels::parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    EXPECT_EQ(std::accumulate(hits.begin(), hits.end(), 0), 10007);
    for (int h : hits) ASSERT_EQ(h, 1);
    EXPECT_EQ(kernels::threads(), 4);
}
