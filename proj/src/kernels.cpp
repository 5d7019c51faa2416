#include "mfsmp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace mfsmp::kernels {

namespace {
constexpr std::size_t kBlock = 512;
}

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

int threads() { return omp_get_max_threads(); }

double sum(std::span<const double> v) {
    const std::size_t blocks = (v.size() + kBlock - 1) / kBlock;
    if (blocks <= 1) return serial::sum(v);
    std::vector<double> partial(blocks);
    parallel_for(blocks, [&](std::size_t b) {
        const std::size_t lo = b * kBlock;
        partial[b] = serial::sum(v.subspan(lo, std::min(kBlock, v.size() - lo)));
    });
    return serial::sum(partial);
}

double mean(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("mean of an empty sample");
    return sum(v) / static_cast<double>(v.size());
}

double mean_product(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("mean_product: length mismatch");
    std::vector<double> p(a.size());
    parallel_for(a.size(), [&](std::size_t i) { p[i] = a[i] * b[i]; });
    return mean(p);
}

double standard_error(std::span<const double> v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    std::vector<double> d(v.size());
    parallel_for(v.size(), [&](std::size_t i) { d[i] = (v[i] - m) * (v[i] - m); });
    const double var = sum(d) / static_cast<double>(v.size() - 1);
    return std::sqrt(var / static_cast<double>(v.size()));
}

void separable_average(std::span<const double> left, std::span<const double> right,
                       std::span<const double> values, std::span<double> out) {
    const double m = mean_product(right, values);
    parallel_for(out.size(), [&](std::size_t i) { out[i] = left[i] * m; });
}

namespace serial {

double sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

void cross_average(std::size_t n, const std::function<double(std::size_t, std::size_t)>& kernel,
                   std::span<const double> values, std::span<double> out) {
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += kernel(i, j) * values[j];
        out[i] = s / static_cast<double>(n);
    }
}

}  // namespace serial

}  // namespace mfsmp::kernels
