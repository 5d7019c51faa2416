#include "mfsmp/cylindrical.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mfsmp/errors.hpp"

namespace mfsmp {

ScalarFunction ScalarFunction::identity() { return linear(1.0, 0.0); }

ScalarFunction ScalarFunction::linear(double slope, double intercept) {
    return {[=](double a) { return slope * a + intercept; }, [=](double) { return slope; },
            [](double) { return 0.0; }};
}

ScalarFunction ScalarFunction::square() {
    return {[](double a) { return a * a; }, [](double a) { return 2.0 * a; }, [](double) { return 2.0; }};
}

ScalarFunction ScalarFunction::sine() {
    return {[](double a) { return std::sin(a); }, [](double a) { return std::cos(a); },
            [](double a) { return -std::sin(a); }};
}

ScalarFunction ScalarFunction::cosine() {
    return {[](double a) { return std::cos(a); }, [](double a) { return -std::sin(a); },
            [](double a) { return -std::cos(a); }};
}

PlanarFunction PlanarFunction::linear(double c1, double c2) {
    auto zero = [](double, double) { return 0.0; };
    return {[=](double a, double b) { return c1 * a + c2 * b; }, [=](double, double) { return c1; },
            [=](double, double) { return c2; }, zero, zero, zero};
}

CylindricalFunctional::CylindricalFunctional(ScalarFunction outer, ScalarFunction inner)
    : outer_(std::move(outer)), inner1_(std::move(inner)) {}

CylindricalFunctional::CylindricalFunctional(ScalarFunction outer, PlanarFunction inner)
    : outer_(std::move(outer)), inner2_(std::move(inner)), planar_(true) {}

double CylindricalFunctional::statistic(const EmpiricalMeasure& measure) const {
    if (planar_) {
        if (measure.dimension() != 2) throw DimensionMismatch("2-D functional on a 1-D measure");
        return empirical_expectation(measure, [this](double a, double b) { return inner2_(a, b); });
    }
    if (measure.dimension() != 1) throw DimensionMismatch("1-D functional on a 2-D measure");
    return empirical_expectation(measure, [this](double a) { return inner1_(a); });
}

double lions_first(const CylindricalFunctional& g, const EmpiricalMeasure& measure, double a) {
    if (g.dimension() != 1) throw DimensionMismatch("lions_first: functional is 2-D");
    return g.outer().d1(g.statistic(measure)) * g.inner().d1(a);
}

std::array<double, 2> lions_first(const CylindricalFunctional& g, const EmpiricalMeasure& measure,
                                  double a1, double a2) {
    if (g.dimension() != 2) throw DimensionMismatch("lions_first: functional is 1-D");
    const double s = g.outer().d1(g.statistic(measure));
    return {s * g.inner2().p1(a1, a2), s * g.inner2().p2(a1, a2)};
}

double lions_mixed(const CylindricalFunctional& g, const EmpiricalMeasure& measure, double a) {
    if (g.dimension() != 1) throw DimensionMismatch("lions_mixed: functional is 2-D");
    return g.outer().d1(g.statistic(measure)) * g.inner().d2(a);
}

std::array<double, 2> lions_mixed(const CylindricalFunctional& g, const EmpiricalMeasure& measure,
                                  double a1, double a2) {
    if (g.dimension() != 2) throw DimensionMismatch("lions_mixed: functional is 1-D");
    const double s = g.outer().d1(g.statistic(measure));
    return {s * g.inner2().p11(a1, a2), s * g.inner2().p22(a1, a2)};
}

double lions_fd_oracle(const CylindricalFunctional& g, const EmpiricalMeasure& measure,
                       std::size_t index, double h, int component) {
    if (index >= measure.size()) throw std::out_of_range("lions_fd_oracle: particle index");
    if (h == 0.0) throw std::invalid_argument("lions_fd_oracle: h must be nonzero");
    const double base = g.evaluate(measure);
    std::vector<double> x(measure.first().begin(), measure.first().end());
    if (measure.dimension() == 1) {
        x[index] += h;
        return (g.evaluate(EmpiricalMeasure(x)) - base) / h;
    }
    std::vector<double> y(measure.second().begin(), measure.second().end());
    (component == 0 ? x : y)[index] += h;
    return (g.evaluate(EmpiricalMeasure(x, y)) - base) / h;
}

}  // namespace mfsmp
