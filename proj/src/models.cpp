#include "mfsmp/models.hpp"

#include <cmath>
#include <set>

#include "mfsmp/errors.hpp"

namespace mfsmp {

namespace {

double get(const std::map<std::string, double>& m, const char* key) {
    const auto it = m.find(key);
    return it == m.end() ? 0.0 : it->second;
}

void check_keys(const std::map<std::string, double>& m, const std::set<std::string>& allowed, const char* what) {
    for (const auto& [k, v] : m)
        if (!allowed.count(k)) throw ConfigError(std::string("unknown ") + what + " monomial '" + k + "'");
}

std::function<SdeJet(const SdeArgs&)> sde_polynomial(const std::map<std::string, double>& t) {
    const double c = get(t, "c"), cx = get(t, "x"), cxd = get(t, "xd"), cm = get(t, "m"), cv = get(t, "v");
    const double cxx = get(t, "xx"), cxxd = get(t, "xxd"), cxdxd = get(t, "xdxd"), cvv = get(t, "vv"),
                 cxv = get(t, "xv");
    return [=](const SdeArgs& a) {
        SdeJet j;
        j.value = c + cx * a.x + cxd * a.xd + cm * a.m + cv * a.v + cxx * a.x * a.x + cxxd * a.x * a.xd +
                  cxdxd * a.xd * a.xd + cvv * a.v * a.v + cxv * a.x * a.v;
        j.x = cx + 2 * cxx * a.x + cxxd * a.xd + cxv * a.v;
        j.xd = cxd + cxxd * a.x + 2 * cxdxd * a.xd;
        j.m = cm;
        j.xx = 2 * cxx;
        j.xxd = cxxd;
        j.xdxd = 2 * cxdxd;
        return j;
    };
}

}  // namespace

ScalarFunction inner_function(const std::string& name) {
    if (name == "zero") return ScalarFunction::zero();
    if (name == "identity") return ScalarFunction::identity();
    if (name == "square") return ScalarFunction::square();
    if (name == "sine") return ScalarFunction::sine();
    if (name == "cosine") return ScalarFunction::cosine();
    throw ConfigError("unknown inner function '" + name + "'");
}

CoefficientSet build_custom_coeffs(const CustomTable& t) {
    check_keys(t.drift, {"c", "x", "xd", "m", "v", "xx", "xxd", "xdxd", "vv", "xv"}, "drift");
    check_keys(t.diffusion, {"c", "x", "xd", "m", "v", "xx", "xxd", "xdxd", "vv", "xv"}, "diffusion");
    check_keys(t.driver, {"c", "x", "xd", "y", "z", "m", "v", "yy", "zz", "vv", "mx"}, "driver");
    check_keys(t.terminal, {"c", "x", "xx", "m"}, "terminal");
    CoefficientSet s;
    s.name = "custom";
    s.drift = sde_polynomial(t.drift);
    s.diffusion = sde_polynomial(t.diffusion);
    const auto& d = t.driver;
    const double c = get(d, "c"), cx = get(d, "x"), cxd = get(d, "xd"), cy = get(d, "y"), cz = get(d, "z"),
                 cm = get(d, "m"), cv = get(d, "v"), cyy = get(d, "yy"), czz = get(d, "zz"), cvv = get(d, "vv"),
                 cmx = get(d, "mx");
    s.driver = [=](const DriverArgs& a) {
        DriverJet j;
        j.value = c + cx * a.x + cxd * a.xd + cy * a.y + cz * a.z + cm * a.m + cv * a.v + cyy * a.y * a.y +
                  czz * a.z * a.z + cvv * a.v * a.v + cmx * a.m * a.x;
        j.x = cx + cmx * a.m;
        j.xd = cxd;
        j.y = cy + 2 * cyy * a.y;
        j.z = cz + 2 * czz * a.z;
        j.m = cm + cmx * a.x;
        j.yy = 2 * cyy;
        j.zz = 2 * czz;
        j.mx = cmx;
        return j;
    };
    const double tc = get(t.terminal, "c"), tx = get(t.terminal, "x"), txx = get(t.terminal, "xx"),
                 tm = get(t.terminal, "m");
    s.terminal = [=](double x, double m) {
        return TerminalJet{tc + tx * x + txx * x * x + tm * m, tx + 2 * txx * x, tm, 2 * txx};
    };
    s.drift_inner = inner_function(t.drift_inner);
    s.diffusion_inner = inner_function(t.diffusion_inner);
    s.terminal_inner = inner_function(t.terminal_inner);
    if (t.driver_inner_x != 0 || t.driver_inner_y != 0)
        s.driver_inner = PlanarFunction::linear(t.driver_inner_x, t.driver_inner_y);
    s.controls = ControlSet::interval(t.control_lo, t.control_hi, t.control_points);
    s.growth_constant = t.growth_constant;
    return s;
}

Scenario custom_scenario(const CustomTable& table) {
    Scenario sc;
    sc.name = "custom";
    sc.coeffs = build_custom_coeffs(table);
    sc.base = ControlSpec::constant(table.base_control);
    sc.alternate = ControlSpec::constant(table.alternate_control);
    const double x0 = table.init;
    sc.init = [x0](double) { return x0; };
    return sc;
}

namespace {

CoefficientSet zero_coeffs(const std::string& name) {
    CoefficientSet s;
    s.name = name;
    s.drift = [](const SdeArgs&) { return SdeJet{}; };
    s.diffusion = [](const SdeArgs&) { return SdeJet{}; };
    s.driver = [](const DriverArgs&) { return DriverJet{}; };
    s.terminal = [](double, double) { return TerminalJet{}; };
    return s;
}

TerminalJet identity_terminal(double x, double) { return TerminalJet{x, 1.0, 0.0, 0.0}; }

Scenario base(const std::string& name, double x0) {
    Scenario sc;
    sc.name = name;
    sc.coeffs = zero_coeffs(name);
    sc.base = ControlSpec::constant(0.0);
    sc.alternate = ControlSpec::constant(1.0);
    sc.init = [x0](double) { return x0; };
    return sc;
}

// Nonlinear mean-field instance used for the rate and expansion sweeps:
//   b = 0.1 x + 0.05 x' + 0.1 E[sin X] + 0.2 v
//   sigma = (0.2 + 0.1 v) x + 0.3 v + 0.05 E[cos X]
//   f = -0.05 y + 0.1 z + 0.1 E[sin X + 0.5 Y] (1 + 0.1 x) + 0.5 v^2,  Phi = x
Scenario spike_instance(const std::string& name) {
    Scenario sc = base(name, 1.0);
    CoefficientSet& c = sc.coeffs;
    c.drift = [](const SdeArgs& a) {
        SdeJet j;
        j.value = 0.1 * a.x + 0.05 * a.xd + 0.1 * a.m + 0.2 * a.v;
        j.x = 0.1;
        j.xd = 0.05;
        j.m = 0.1;
        return j;
    };
    c.diffusion = [](const SdeArgs& a) {
        SdeJet j;
        j.value = (0.2 + 0.1 * a.v) * a.x + 0.3 * a.v + 0.05 * a.m;
        j.x = 0.2 + 0.1 * a.v;
        j.m = 0.05;
        return j;
    };
    c.driver = [](const DriverArgs& a) {
        DriverJet j;
        j.value = -0.05 * a.y + 0.1 * a.z + 0.1 * a.m * (1 + 0.1 * a.x) + 0.5 * a.v * a.v;
        j.x = 0.01 * a.m;
        j.y = -0.05;
        j.z = 0.1;
        j.m = 0.1 * (1 + 0.1 * a.x);
        j.mx = 0.01;
        return j;
    };
    c.terminal = identity_terminal;
    c.drift_inner = ScalarFunction::sine();
    c.diffusion_inner = ScalarFunction::cosine();
    c.driver_inner = PlanarFunction{[](double x, double y) { return std::sin(x) + 0.5 * y; },
                                    [](double x, double) { return std::cos(x); },
                                    [](double, double) { return 0.5; },
                                    [](double x, double) { return -std::sin(x); },
                                    [](double, double) { return 0.0; },
                                    [](double, double) { return 0.0; }};
    c.growth_constant = 1.0;
    return sc;
}

// Law-free delayed instance with curvature in the utility, used for the
// backward expansion sweep:
//   b = 0.1 x + 0.05 x' + 0.2 v,  sigma = 0.2 x + 0.3 v + 0.2 x v,
//   f = -0.05 y + 0.5 v^2,  Phi = x + x^2 / 2.
Scenario smooth_instance(const std::string& name) {
    Scenario sc = base(name, 1.0);
    CoefficientSet& c = sc.coeffs;
    c.drift = [](const SdeArgs& a) {
        SdeJet j;
        j.value = 0.1 * a.x + 0.05 * a.xd + 0.2 * a.v;
        j.x = 0.1;
        j.xd = 0.05;
        return j;
    };
    c.diffusion = [](const SdeArgs& a) {
        SdeJet j;
        j.value = 0.2 * a.x + 0.3 * a.v + 0.2 * a.x * a.v;
        j.x = 0.2 + 0.2 * a.v;
        return j;
    };
    c.driver = [](const DriverArgs& a) {
        DriverJet j;
        j.value = -0.05 * a.y + 0.5 * a.v * a.v;
        j.y = -0.05;
        return j;
    };
    c.terminal = [](double x, double) { return TerminalJet{x + 0.5 * x * x, 1.0 + x, 0.0, 1.0}; };
    c.growth_constant = 1.0;
    return sc;
}

}  // namespace

std::vector<std::string> builtin_names() { return {"zero", "meanfield-exp", "gbm", "delay-ode", "gbm-spike", "smooth"}; }

Scenario builtin_scenario(const std::string& name) {
    if (name == "zero") return base(name, 1.0);
    if (name == "meanfield-exp") {
        // b = E[X], sigma = 0: every particle follows x' = x.
        Scenario sc = base(name, 1.0);
        sc.coeffs.drift = [](const SdeArgs& a) {
            SdeJet j;
            j.value = a.m;
            j.m = 1.0;
            return j;
        };
        sc.coeffs.drift_inner = ScalarFunction::identity();
        sc.coeffs.terminal = identity_terminal;
        return sc;
    }
    if (name == "gbm") {
        // b = 0.1 x, sigma = 0.2 x, f = -0.05 y, Phi = x.
        Scenario sc = base(name, 1.0);
        sc.coeffs.drift = [](const SdeArgs& a) {
            SdeJet j;
            j.value = 0.1 * a.x;
            j.x = 0.1;
            return j;
        };
        sc.coeffs.diffusion = [](const SdeArgs& a) {
            SdeJet j;
            j.value = 0.2 * a.x;
            j.x = 0.2;
            return j;
        };
        sc.coeffs.driver = [](const DriverArgs& a) {
            DriverJet j;
            j.value = -0.05 * a.y;
            j.y = -0.05;
            return j;
        };
        sc.coeffs.terminal = identity_terminal;
        return sc;
    }
    if (name == "delay-ode") {
        // x'(t) = -0.5 x(t) + 0.8 x(t - l), x(theta) = 1 + 0.5 theta on [-l, 0].
        Scenario sc = base(name, 1.0);
        sc.coeffs.drift = [](const SdeArgs& a) {
            SdeJet j;
            j.value = -0.5 * a.x + 0.8 * a.xd;
            j.x = -0.5;
            j.xd = 0.8;
            return j;
        };
        sc.coeffs.terminal = identity_terminal;
        sc.init = [](double th) { return 1.0 + 0.5 * th; };
        return sc;
    }
    if (name == "gbm-spike") return spike_instance(name);
    if (name == "smooth") return smooth_instance(name);
    throw ConfigError("unknown builtin model '" + name + "'");
}

}  // namespace mfsmp
