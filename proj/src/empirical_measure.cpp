#include "mfsmp/empirical_measure.hpp"

#include <stdexcept>
#include <vector>

#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"

namespace mfsmp {

EmpiricalMeasure::EmpiricalMeasure(std::span<const double> x) : x_(x) {
    if (x_.empty()) throw std::invalid_argument("EmpiricalMeasure: empty sample");
}

EmpiricalMeasure::EmpiricalMeasure(std::span<const double> x, std::span<const double> y) : x_(x), y_(y) {
    if (x_.empty()) throw std::invalid_argument("EmpiricalMeasure: empty sample");
    if (x_.size() != y_.size()) throw DimensionMismatch("joint sample coordinates differ in length");
}

double empirical_expectation(const EmpiricalMeasure& measure, const std::function<double(double)>& phi) {
    std::vector<double> v(measure.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = phi(measure.sample(j));
    return kernels::mean(v);
}

double empirical_expectation(const EmpiricalMeasure& measure, const std::function<double(double, double)>& phi) {
    if (measure.dimension() != 2) throw DimensionMismatch("two-argument integrand on a 1-D measure");
    std::vector<double> v(measure.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = phi(measure.first()[j], measure.second()[j]);
    return kernels::mean(v);
}

}  // namespace mfsmp
