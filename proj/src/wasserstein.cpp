#include "mfsmp/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "mfsmp/philox.hpp"

namespace mfsmp {

namespace {

std::vector<double> resampled(std::span<const double> x, std::size_t size, std::uint64_t seed) {
    if (x.size() == size) return {x.begin(), x.end()};
    std::vector<double> out(size);
    for (std::size_t j = 0; j < size; ++j) out[j] = x[uniform_index(seed, 0x5753ull, j, x.size())];
    return out;
}

}  // namespace

double wasserstein2_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, std::uint64_t seed) {
    if (mu.dimension() != 1 || nu.dimension() != 1) throw DimensionMismatch("wasserstein2_1d needs 1-D samples");
    const std::size_t n = std::max(mu.size(), nu.size());
    auto a = resampled(mu.first(), n, seed);
    auto b = resampled(nu.first(), n, seed);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = (a[j] - b[j]) * (a[j] - b[j]);
    return std::sqrt(kernels::mean(d));
}

}  // namespace mfsmp
