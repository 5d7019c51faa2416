#pragma once

#include <array>
#include <functional>

#include "mfsmp/empirical_measure.hpp"

namespace mfsmp {

/// Scalar function with its first two derivatives. An empty function acts as zero.
struct ScalarFunction {
    std::function<double(double)> value, first, second;

    double operator()(double a) const { return value ? value(a) : 0.0; }
    double d1(double a) const { return first ? first(a) : 0.0; }
    double d2(double a) const { return second ? second(a) : 0.0; }
    bool is_zero() const { return !value; }

    static ScalarFunction zero() { return {}; }
    static ScalarFunction identity();
    static ScalarFunction linear(double slope, double intercept = 0.0);
    static ScalarFunction square();
    static ScalarFunction sine();
    static ScalarFunction cosine();
};

/// Function of two variables with gradient and Hessian. Empty acts as zero.
struct PlanarFunction {
    std::function<double(double, double)> value, d1, d2, d11, d12, d22;

    double operator()(double a, double b) const { return value ? value(a, b) : 0.0; }
    double p1(double a, double b) const { return d1 ? d1(a, b) : 0.0; }
    double p2(double a, double b) const { return d2 ? d2(a, b) : 0.0; }
    double p11(double a, double b) const { return d11 ? d11(a, b) : 0.0; }
    double p12(double a, double b) const { return d12 ? d12(a, b) : 0.0; }
    double p22(double a, double b) const { return d22 ? d22(a, b) : 0.0; }
    bool is_zero() const { return !value; }

    static PlanarFunction zero() { return {}; }
    /// c1 * a + c2 * b.
    static PlanarFunction linear(double c1, double c2);
};

/// g(nu) = h0(integral of h against nu), with h one- or two-dimensional.
class CylindricalFunctional {
public:
    CylindricalFunctional(ScalarFunction outer, ScalarFunction inner);
    CylindricalFunctional(ScalarFunction outer, PlanarFunction inner);

    int dimension() const { return planar_ ? 2 : 1; }
    const ScalarFunction& outer() const { return outer_; }
    const ScalarFunction& inner() const { return inner1_; }
    const PlanarFunction& inner2() const { return inner2_; }

    /// Integral of the inner function against the measure.
    double statistic(const EmpiricalMeasure& measure) const;
    double evaluate(const EmpiricalMeasure& measure) const { return outer_(statistic(measure)); }

private:
    ScalarFunction outer_;
    ScalarFunction inner1_;
    PlanarFunction inner2_;
    bool planar_ = false;
};

/// d_nu g(nu; a) = h0'(m) h'(a).
double lions_first(const CylindricalFunctional& g, const EmpiricalMeasure& measure, double a);
/// ((df/dmu)_1, (df/dmu)_2)(mu; a1, a2) = h0'(m) grad h(a1, a2).
std::array<double, 2> lions_first(const CylindricalFunctional& g, const EmpiricalMeasure& measure,
                                  double a1, double a2);
/// d^2_{nu a} g(nu; a) = h0'(m) h''(a).
double lions_mixed(const CylindricalFunctional& g, const EmpiricalMeasure& measure, double a);
/// (f_{mu1 a1}, f_{mu2 a2}) = h0'(m) (h_11, h_22)(a1, a2).
std::array<double, 2> lions_mixed(const CylindricalFunctional& g, const EmpiricalMeasure& measure,
                                  double a1, double a2);

/// [g(nu with sample `index` moved by h) - g(nu)] / h. For a 2-D measure,
/// `component` selects the coordinate that is moved.
double lions_fd_oracle(const CylindricalFunctional& g, const EmpiricalMeasure& measure,
                       std::size_t index, double h, int component = 0);

}  // namespace mfsmp
