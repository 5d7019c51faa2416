#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mfsmp::kernels {

/// Sets the OpenMP thread count used by every parallel kernel (0 keeps the default).
void set_threads(int n);
int threads();

/// Runs body(i) for i in [0, n) across threads. Bodies must only write to
/// index-i state.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const auto m = static_cast<long>(n);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < m; ++i) body(static_cast<std::size_t>(i));
}

/// Fixed-block summation: the result does not depend on the thread count.
double sum(std::span<const double> v);
double mean(std::span<const double> v);
/// Mean of a(j) * b(j).
double mean_product(std::span<const double> a, std::span<const double> b);

/// Sample standard error of the mean.
double standard_error(std::span<const double> v);

/// Factorised cross-particle average for separable Lions kernels
/// k(i, j) = left(i) * right(j):  out_i = left_i * (1/N) sum_j right_j * values_j.
/// With left = outer partial at the state and right = h'(argument) this is the
/// hat kernel; with the roles swapped it is the star kernel.
void separable_average(std::span<const double> left, std::span<const double> right,
                       std::span<const double> values, std::span<double> out);

/// Serial references kept for testing the parallel kernels.
namespace serial {

double sum(std::span<const double> v);
/// out_i = (1/N) sum_j kernel(i, j) * values_j, by direct O(N^2) double sum.
void cross_average(std::size_t n, const std::function<double(std::size_t, std::size_t)>& kernel,
                   std::span<const double> values, std::span<double> out);

}  // namespace serial

}  // namespace mfsmp::kernels
