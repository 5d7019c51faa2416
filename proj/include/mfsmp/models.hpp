#pragma once

#include <map>
#include <string>
#include <vector>

#include "mfsmp/coefficients.hpp"
#include "mfsmp/control.hpp"
#include "mfsmp/forward_sim.hpp"

namespace mfsmp {

/// A coefficient set together with the controls and initial path used by the suites.
struct Scenario {
    std::string name;
    CoefficientSet coeffs;
    ControlSpec base;       ///< u*
    ControlSpec alternate;  ///< v on the spike
    InitialPath init;
    double tau_fraction = 0.6;  ///< default spike start as a fraction of T
};

/// Polynomial coefficient table. Monomial keys:
///   drift / diffusion: c, x, xd, m, v, xx, xxd, xdxd, vv, xv
///   driver: c, x, xd, y, z, m, v, yy, zz, vv, mx
///   terminal: c, x, xx, m
/// Inner functions: zero, identity, square, sine, cosine; the driver inner
/// function is linear with coefficients driver_inner_x, driver_inner_y.
struct CustomTable {
    std::map<std::string, double> drift, diffusion, driver, terminal;
    std::string drift_inner = "zero", diffusion_inner = "zero", terminal_inner = "zero";
    double driver_inner_x = 0, driver_inner_y = 0;
    double init = 1.0;
    double base_control = 0.0, alternate_control = 1.0;
    double control_lo = -1.0, control_hi = 1.0;
    int control_points = 101;
    double growth_constant = 10.0;
};

/// Throws ConfigError on an unknown monomial key or inner-function name.
CoefficientSet build_custom_coeffs(const CustomTable& table);
Scenario custom_scenario(const CustomTable& table);

ScalarFunction inner_function(const std::string& name);

/// Builtins: zero, meanfield-exp, gbm, delay-ode, gbm-spike, smooth.
/// Throws ConfigError for other names (the finance model lives in finance.hpp).
Scenario builtin_scenario(const std::string& name);
std::vector<std::string> builtin_names();

}  // namespace mfsmp
