#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfsmp/cylindrical.hpp"

namespace mfsmp {

// Measure dependence is cylindrical: b(t, x, x', nu, v) = B(t, x, x', m, v) with
// m = integral of an inner function against nu. The Lions derivative is then
// B_m * h'(a) and the mixed one B_m * h''(a).

/// Arguments of b and sigma. `m` is the drift (or diffusion) statistic of nu.
struct SdeArgs {
    double t, x, xd, m, v;
};

/// Value and partials of b or sigma. `xd` is the delayed state x'.
struct SdeJet {
    double value = 0, x = 0, xd = 0, m = 0;
    double xx = 0, xxd = 0, xdxd = 0;
};

/// Arguments of f; `m` is the driver statistic of mu = law of (X, Y).
struct DriverArgs {
    double t, x, xd, y, z, m, v;
};

/// Value and partials of f, including the (x, y, z) Hessian, the crosses with
/// x' and the state derivatives of the measure partial f_m.
struct DriverJet {
    double value = 0, x = 0, xd = 0, y = 0, z = 0, m = 0;
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;
    double xdxd = 0, xxd = 0, yxd = 0, zxd = 0;
    double mx = 0, mxd = 0, my = 0, mz = 0;
};

struct TerminalJet {
    double value = 0, x = 0, m = 0, xx = 0;
};

/// Admissible control set: a grid over an interval or a finite set.
class ControlSet {
public:
    ControlSet() = default;
    static ControlSet interval(double lo, double hi, int points);
    static ControlSet finite(std::vector<double> values);

    const std::vector<double>& points() const { return points_; }
    bool is_interval() const { return interval_; }
    double lower() const { return lo_; }
    double upper() const { return hi_; }

private:
    std::vector<double> points_;
    double lo_ = 0, hi_ = 0;
    bool interval_ = false;
};

struct CoefficientSet {
    std::string name;
    std::function<SdeJet(const SdeArgs&)> drift;
    std::function<SdeJet(const SdeArgs&)> diffusion;
    std::function<DriverJet(const DriverArgs&)> driver;
    std::function<TerminalJet(double x, double m)> terminal;
    ScalarFunction drift_inner;
    ScalarFunction diffusion_inner;
    ScalarFunction terminal_inner;
    PlanarFunction driver_inner;
    ControlSet controls = ControlSet::interval(-1.0, 1.0, 101);
    /// Declared C in |b|, |sigma| <= C (1 + |x| + |x'| + M2^{1/2} + |v|).
    double growth_constant = 10.0;
};

struct ProbeReport {
    bool pass = true;
    double worst_excess = 0;  ///< max |analytic - fd| / tolerance
    std::string worst_partial;
};

/// Compares every analytic partial with a central difference (relative step
/// 1e-5) on `probes` random points; tolerance max(1e-6, 1e-4 |value|).
ProbeReport probe_derivatives(const CoefficientSet& coeffs, std::uint64_t seed, int probes = 100);

/// Linear-growth probe with the declared constant on sampled points and measures.
ProbeReport probe_growth(const CoefficientSet& coeffs, std::uint64_t seed, int probes = 100);

}  // namespace mfsmp
