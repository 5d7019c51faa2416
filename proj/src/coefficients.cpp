#include "mfsmp/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfsmp/philox.hpp"

namespace mfsmp {

ControlSet ControlSet::interval(double lo, double hi, int points) {
    if (!(hi >= lo) || points < 1) throw std::invalid_argument("ControlSet::interval: bad bounds or count");
    ControlSet s;
    s.interval_ = true;
    s.lo_ = lo;
    s.hi_ = hi;
    s.points_.resize(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j)
        s.points_[static_cast<std::size_t>(j)] = points == 1 ? lo : lo + (hi - lo) * j / (points - 1);
    return s;
}

ControlSet ControlSet::finite(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("ControlSet::finite: empty set");
    ControlSet s;
    std::sort(values.begin(), values.end());
    s.lo_ = values.front();
    s.hi_ = values.back();
    s.points_ = std::move(values);
    return s;
}

namespace {

class Draws {
public:
    explicit Draws(std::uint64_t seed) : seed_(seed) {}
    double uniform(double lo, double hi) {
        const auto w = philox_words(seed_, 0x50524f42ull, counter_++);
        return lo + (hi - lo) * philox_uniform(w[0], w[1]);
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

class Checker {
public:
    void compare(const char* name, double analytic, double fd) {
        const double tol = std::max(1e-6, 1e-4 * std::abs(analytic));
        const double excess = std::abs(analytic - fd) / tol;
        if (!(excess <= report.worst_excess)) {
            report.worst_excess = std::isnan(excess) ? INFINITY : excess;
            report.worst_partial = name;
        }
        if (!(excess <= 1.0)) report.pass = false;
    }
    ProbeReport report;
};

double step_for(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

// Central difference of g along one coordinate of a copy of `args`.
template <class Args, class G>
double central(const Args& args, double Args::*field, G&& g) {
    const double h = step_for(args.*field);
    Args up = args, dn = args;
    up.*field += h;
    dn.*field -= h;
    return (g(up) - g(dn)) / (2.0 * h);
}

void probe_sde(const char* tag, const std::function<SdeJet(const SdeArgs&)>& fn, const SdeArgs& a, Checker& c) {
    if (!fn) return;
    const SdeJet j = fn(a);
    const std::string t(tag);
    auto val = [&](const SdeArgs& b) { return fn(b).value; };
    auto dx = [&](const SdeArgs& b) { return fn(b).x; };
    auto dxd = [&](const SdeArgs& b) { return fn(b).xd; };
    c.compare((t + "_x").c_str(), j.x, central(a, &SdeArgs::x, val));
    c.compare((t + "_xd").c_str(), j.xd, central(a, &SdeArgs::xd, val));
    c.compare((t + "_m").c_str(), j.m, central(a, &SdeArgs::m, val));
    c.compare((t + "_xx").c_str(), j.xx, central(a, &SdeArgs::x, dx));
    c.compare((t + "_xxd").c_str(), j.xxd, central(a, &SdeArgs::xd, dx));
    c.compare((t + "_xdxd").c_str(), j.xdxd, central(a, &SdeArgs::xd, dxd));
}

void probe_driver(const std::function<DriverJet(const DriverArgs&)>& fn, const DriverArgs& a, Checker& c) {
    if (!fn) return;
    const DriverJet j = fn(a);
    using A = DriverArgs;
    auto part = [&](double DriverJet::*p) { return [&fn, p](const A& b) { return fn(b).*p; }; };
    c.compare("f_x", j.x, central(a, &A::x, part(&DriverJet::value)));
    c.compare("f_xd", j.xd, central(a, &A::xd, part(&DriverJet::value)));
    c.compare("f_y", j.y, central(a, &A::y, part(&DriverJet::value)));
    c.compare("f_z", j.z, central(a, &A::z, part(&DriverJet::value)));
    c.compare("f_m", j.m, central(a, &A::m, part(&DriverJet::value)));
    c.compare("f_xx", j.xx, central(a, &A::x, part(&DriverJet::x)));
    c.compare("f_xy", j.xy, central(a, &A::y, part(&DriverJet::x)));
    c.compare("f_xz", j.xz, central(a, &A::z, part(&DriverJet::x)));
    c.compare("f_yy", j.yy, central(a, &A::y, part(&DriverJet::y)));
    c.compare("f_yz", j.yz, central(a, &A::z, part(&DriverJet::y)));
    c.compare("f_zz", j.zz, central(a, &A::z, part(&DriverJet::z)));
    c.compare("f_xdxd", j.xdxd, central(a, &A::xd, part(&DriverJet::xd)));
    c.compare("f_xxd", j.xxd, central(a, &A::xd, part(&DriverJet::x)));
    c.compare("f_yxd", j.yxd, central(a, &A::xd, part(&DriverJet::y)));
    c.compare("f_zxd", j.zxd, central(a, &A::xd, part(&DriverJet::z)));
    c.compare("f_mx", j.mx, central(a, &A::x, part(&DriverJet::m)));
    c.compare("f_mxd", j.mxd, central(a, &A::xd, part(&DriverJet::m)));
    c.compare("f_my", j.my, central(a, &A::y, part(&DriverJet::m)));
    c.compare("f_mz", j.mz, central(a, &A::z, part(&DriverJet::m)));
}

void probe_scalar(const char* tag, const ScalarFunction& h, double a, Checker& c) {
    if (h.is_zero()) return;
    const double s = step_for(a);
    const std::string t(tag);
    c.compare((t + "'").c_str(), h.d1(a), (h(a + s) - h(a - s)) / (2 * s));
    c.compare((t + "''").c_str(), h.d2(a), (h.d1(a + s) - h.d1(a - s)) / (2 * s));
}

void probe_planar(const PlanarFunction& h, double a, double b, Checker& c) {
    if (h.is_zero()) return;
    const double sa = step_for(a), sb = step_for(b);
    c.compare("h2_1", h.p1(a, b), (h(a + sa, b) - h(a - sa, b)) / (2 * sa));
    c.compare("h2_2", h.p2(a, b), (h(a, b + sb) - h(a, b - sb)) / (2 * sb));
    c.compare("h2_11", h.p11(a, b), (h.p1(a + sa, b) - h.p1(a - sa, b)) / (2 * sa));
    c.compare("h2_12", h.p12(a, b), (h.p1(a, b + sb) - h.p1(a, b - sb)) / (2 * sb));
    c.compare("h2_22", h.p22(a, b), (h.p2(a, b + sb) - h.p2(a, b - sb)) / (2 * sb));
}

}  // namespace

ProbeReport probe_derivatives(const CoefficientSet& coeffs, std::uint64_t seed, int probes) {
    Draws d(seed);
    Checker c;
    const auto& u = coeffs.controls.points();
    for (int p = 0; p < probes; ++p) {
        const double t = d.uniform(0.0, 2.0), x = d.uniform(-2, 2), xd = d.uniform(-2, 2);
        const double y = d.uniform(-2, 2), z = d.uniform(-2, 2), m = d.uniform(-2, 2);
        const double v = u.empty() ? 0.0 : u[static_cast<std::size_t>(d.uniform(0, 1) * u.size()) % u.size()];
        probe_sde("b", coeffs.drift, {t, x, xd, m, v}, c);
        probe_sde("sigma", coeffs.diffusion, {t, x, xd, m, v}, c);
        probe_driver(coeffs.driver, {t, x, xd, y, z, m, v}, c);
        if (coeffs.terminal) {
            const TerminalJet j = coeffs.terminal(x, m);
            const double sx = step_for(x), sm = step_for(m);
            c.compare("Phi_x", j.x, (coeffs.terminal(x + sx, m).value - coeffs.terminal(x - sx, m).value) / (2 * sx));
            c.compare("Phi_m", j.m, (coeffs.terminal(x, m + sm).value - coeffs.terminal(x, m - sm).value) / (2 * sm));
            c.compare("Phi_xx", j.xx, (coeffs.terminal(x + sx, m).x - coeffs.terminal(x - sx, m).x) / (2 * sx));
        }
        probe_scalar("h_b", coeffs.drift_inner, x, c);
        probe_scalar("h_sigma", coeffs.diffusion_inner, x, c);
        probe_scalar("h_Phi", coeffs.terminal_inner, x, c);
        probe_planar(coeffs.driver_inner, x, y, c);
    }
    return c.report;
}

ProbeReport probe_growth(const CoefficientSet& coeffs, std::uint64_t seed, int probes) {
    Draws d(seed);
    ProbeReport r;
    const auto& u = coeffs.controls.points();
    for (int p = 0; p < probes; ++p) {
        const double t = d.uniform(0.0, 2.0), x = d.uniform(-5, 5), xd = d.uniform(-5, 5);
        const double v = u.empty() ? 0.0 : u[static_cast<std::size_t>(d.uniform(0, 1) * u.size()) % u.size()];
        double mb = 0, ms = 0, m2 = 0;
        for (int s = 0; s < 5; ++s) {
            const double a = d.uniform(-5, 5);
            mb += coeffs.drift_inner(a) / 5;
            ms += coeffs.diffusion_inner(a) / 5;
            m2 += a * a / 5;
        }
        const double bound = coeffs.growth_constant * (1 + std::abs(x) + std::abs(xd) + std::sqrt(m2) + std::abs(v));
        for (auto [name, val] : {std::pair{"b", coeffs.drift ? coeffs.drift({t, x, xd, mb, v}).value : 0.0},
                                 std::pair{"sigma", coeffs.diffusion ? coeffs.diffusion({t, x, xd, ms, v}).value : 0.0}}) {
            const double excess = std::abs(val) / bound;
            if (excess > r.worst_excess) {
                r.worst_excess = excess;
                r.worst_partial = name;
            }
            if (!(excess <= 1.0)) r.pass = false;
        }
    }
    return r;
}

}  // namespace mfsmp
