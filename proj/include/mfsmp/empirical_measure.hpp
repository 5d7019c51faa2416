#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>

namespace mfsmp {

/// Non-owning view of one time slice: the law of X(t) (dimension 1) or the
/// joint law of (X(t), Y(t)) (dimension 2, paired by particle index).
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::span<const double> x);
    EmpiricalMeasure(std::span<const double> x, std::span<const double> y);

    int dimension() const { return y_.empty() ? 1 : 2; }
    std::size_t size() const { return x_.size(); }
    double sample(std::size_t j) const { return x_[j]; }
    std::pair<double, double> sample2(std::size_t j) const { return {x_[j], y_[j]}; }
    std::span<const double> first() const { return x_; }
    std::span<const double> second() const { return y_; }

private:
    std::span<const double> x_;
    std::span<const double> y_;
};

/// (1/N) sum_j phi(sample_j).
double empirical_expectation(const EmpiricalMeasure& measure, const std::function<double(double)>& phi);
double empirical_expectation(const EmpiricalMeasure& measure, const std::function<double(double, double)>& phi);

}  // namespace mfsmp
