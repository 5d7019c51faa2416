#include "mfsmp/adjoint.hpp"

#include <cmath>

#include "mfsmp/csv.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "step_data.hpp"

namespace mfsmp {

namespace {

// Star-convention averages: the measure partial is taken at particle j's
// state and multiplies a per-particle weight; the result is scaled at
// particle i by the inner-function derivative at i's state.
template <class Weight>
double star_mean(std::size_t n, Weight&& w) {
    std::vector<double> v(n);
    kernels::parallel_for(n, [&](std::size_t j) { v[j] = w(j); });
    return kernels::mean(v);
}

struct InnerAt {
    std::vector<double> hb1, hb2, hs1, hs2, h2_1, h2_2, h2_11, h2_22;

    void evaluate(const CoefficientSet& c, const ForwardSolution& fw, const BackwardSolution& bw, int j) {
        const std::size_t n = fw.x.particles();
        for (auto* v : {&hb1, &hb2, &hs1, &hs2, &h2_1, &h2_2, &h2_11, &h2_22}) v->resize(n);
        kernels::parallel_for(n, [&](std::size_t i) {
            const double x = fw.x.at(i, j), y = bw.y.at(i, j);
            hb1[i] = c.drift_inner.d1(x);
            hb2[i] = c.drift_inner.d2(x);
            hs1[i] = c.diffusion_inner.d1(x);
            hs2[i] = c.diffusion_inner.d2(x);
            h2_1[i] = c.driver_inner.p1(x, y);
            h2_2[i] = c.driver_inner.p2(x, y);
            h2_11[i] = c.driver_inner.p11(x, y);
            h2_22[i] = c.driver_inner.p22(x, y);
        });
    }
};

}  // namespace

AdjointFirst solve_first_adjoint(const CoefficientSet& coeffs, const Star& star, const TimeGrid& grid,
                                 const BrownianBundle& bundle, const RegressionBasis& basis) {
    const ForwardSolution& fw = star.fw();
    const BackwardSolution& bw = star.bw();
    const int n = grid.steps(), k = grid.delay_steps();
    const std::size_t N = fw.x.particles();
    const double dt = grid.dt();
    AdjointFirst a{PathEnsemble::zeros(grid, N), PathEnsemble::zeros(grid, N)};

    {
        // p(T) = Phi_x + E^[Phi*_nu]: outer partial at particle j, argument at particle i.
        const double m = fw.terminal_stat;
        const double phi_m = coeffs.terminal
                                 ? star_mean(N, [&](std::size_t j) { return coeffs.terminal(fw.x.at(j, n), m).m; })
                                 : 0.0;
        auto pn = a.p.slice(n);
        kernels::parallel_for(N, [&](std::size_t i) {
            const double x = fw.x.at(i, n);
            pn[i] = (coeffs.terminal ? coeffs.terminal(x, m).x : 0.0) + coeffs.terminal_inner.d1(x) * phi_m;
        });
    }

    SdeSlice sde, sde_l;
    DriverSlice drv, drv_l;
    InnerAt inner;
    std::vector<double> target(N), antic(N, 0.0);
    for (int j = n - 1; j >= 0; --j) {
        const LeastSquaresProjector proj(step_features(fw, j), basis);
        const auto next = a.p.slice(j + 1);
        const auto [cp, q] = conditional_step(proj, next, bundle.step(j), dt);
        std::copy(q.begin(), q.end(), a.q.slice(j).begin());

        sde.evaluate(coeffs, fw, grid, j, fw.control);
        drv.evaluate(coeffs, fw, bw, grid, j, fw.control);
        inner.evaluate(coeffs, fw, bw, j);

        std::fill(antic.begin(), antic.end(), 0.0);
        if (j + k <= n) {
            const int jl = j + k;
            sde_l.evaluate(coeffs, fw, grid, jl, fw.control);
            drv_l.evaluate(coeffs, fw, bw, grid, jl, fw.control);
            kernels::parallel_for(N, [&](std::size_t i) {
                const SdeJet& b = sde_l.b[i];
                const SdeJet& s = sde_l.s[i];
                const DriverJet& f = drv_l.f[i];
                target[i] = a.p.at(i, jl) * (f.z * s.xd + b.xd) + a.q.at(i, jl) * s.xd + f.xd;
            });
            proj.project(target, antic);
        }

        const double s1 = star_mean(N, [&](std::size_t l) { return cp[l] * drv.f[l].z * sde.s[l].m; });
        const double s2 = star_mean(N, [&](std::size_t l) { return cp[l] * sde.b[l].m; });
        const double s3 = star_mean(N, [&](std::size_t l) { return q[l] * sde.s[l].m; });
        const double s4 = star_mean(N, [&](std::size_t l) { return drv.f[l].m; });

        auto pj = a.p.slice(j);
        kernels::parallel_for(N, [&](std::size_t i) {
            const SdeJet& b = sde.b[i];
            const SdeJet& s = sde.s[i];
            const DriverJet& f = drv.f[i];
            const double F = cp[i] * (f.y + inner.h2_2[i] * s4 + f.z * s.x + b.x) + inner.hs1[i] * s1 +
                             inner.hb1[i] * s2 + antic[i] + q[i] * (f.z + s.x) + inner.hs1[i] * s3 + f.x +
                             inner.h2_1[i] * s4;
            pj[i] = cp[i] + F * dt;
        });
    }
    return a;
}

AdjointSecond solve_second_adjoint(const CoefficientSet& coeffs, const Star& star, const AdjointFirst& first,
                                   const TimeGrid& grid, const BrownianBundle& bundle,
                                   const RegressionBasis& basis) {
    const ForwardSolution& fw = star.fw();
    const BackwardSolution& bw = star.bw();
    const int n = grid.steps(), k = grid.delay_steps();
    const std::size_t N = fw.x.particles();
    const double dt = grid.dt();
    AdjointSecond a{PathEnsemble::zeros(grid, N), PathEnsemble::zeros(grid, N), PathEnsemble::zeros(grid, N),
                    PathEnsemble::zeros(grid, N)};

    {
        const double m = fw.terminal_stat;
        const double phi_m = coeffs.terminal
                                 ? star_mean(N, [&](std::size_t j) { return coeffs.terminal(fw.x.at(j, n), m).m; })
                                 : 0.0;
        auto Pn = a.P.slice(n);
        kernels::parallel_for(N, [&](std::size_t i) {
            const double x = fw.x.at(i, n);
            Pn[i] = (coeffs.terminal ? coeffs.terminal(x, m).xx : 0.0) + coeffs.terminal_inner.d2(x) * phi_m;
        });
    }

    SdeSlice sde, sde_back, sde_fwd;
    DriverSlice drv, drv_fwd;
    InnerAt inner;
    std::vector<double> ta(N), tb(N), anta(N, 0.0), antb(N, 0.0);
    for (int j = n - 1; j >= 0; --j) {
        const LeastSquaresProjector proj(step_features(fw, j), basis);
        const auto nP = a.P.slice(j + 1);
        const auto nP1 = a.P1.slice(j + 1);
        const auto dw = bundle.step(j);
        const auto [cP, Q] = conditional_step(proj, nP, dw, dt);
        const auto [cP1, Q1] = conditional_step(proj, nP1, dw, dt);
        std::copy(Q.begin(), Q.end(), a.Q.slice(j).begin());
        std::copy(Q1.begin(), Q1.end(), a.Q1.slice(j).begin());

        sde.evaluate(coeffs, fw, grid, j, fw.control);
        sde_back.evaluate(coeffs, fw, grid, j - k, fw.control);
        drv.evaluate(coeffs, fw, bw, grid, j, fw.control);
        inner.evaluate(coeffs, fw, bw, j);

        std::fill(anta.begin(), anta.end(), 0.0);
        std::fill(antb.begin(), antb.end(), 0.0);
        if (j + k <= n) {
            const int jl = j + k;
            sde_fwd.evaluate(coeffs, fw, grid, jl, fw.control);
            drv_fwd.evaluate(coeffs, fw, bw, grid, jl, fw.control);
            kernels::parallel_for(N, [&](std::size_t i) {
                const SdeJet& b = sde_fwd.b[i];
                const SdeJet& s = sde_fwd.s[i];
                const DriverJet& f = drv_fwd.f[i];
                const double P = a.P.at(i, jl), P1 = a.P1.at(i, jl), Q1l = a.Q1.at(i, jl);
                const double p = first.p.at(i, jl), q = first.q.at(i, jl);
                ta[i] = P * s.xd * s.xd + 2 * P1 * (s.xd + b.xd) + 2 * Q1l * s.xd + p * (b.xdxd + f.z * s.xdxd) +
                        q * s.xdxd + f.xdxd;
                tb[i] = 2 * P1 * s.xd;
            });
            proj.project(ta, anta);
            proj.project(tb, antb);
        }

        const auto p = first.p.slice(j);
        const auto q = first.q.slice(j);
        const double r1 = star_mean(N, [&](std::size_t l) { return p[l] * sde.b[l].m; });
        const double r2 = star_mean(N, [&](std::size_t l) { return p[l] * drv.f[l].z * sde.s[l].m; });
        const double r3 = star_mean(N, [&](std::size_t l) { return q[l] * sde.s[l].m; });
        const double s4 = star_mean(N, [&](std::size_t l) { return drv.f[l].m; });

        auto Pj = a.P.slice(j);
        auto P1j = a.P1.slice(j);
        kernels::parallel_for(N, [&](std::size_t i) {
            const SdeJet& b = sde.b[i];
            const SdeJet& s = sde.s[i];
            const SdeJet& bl = sde_back.b[i];
            const SdeJet& sl = sde_back.s[i];
            const DriverJet& f = drv.f[i];
            const double u2 = p[i], u3 = p[i] * s.x + q[i];
            const double udu = f.xx + 2 * u2 * f.xy + 2 * u3 * f.xz + u2 * u2 * f.yy + 2 * u2 * u3 * f.yz +
                               u3 * u3 * f.zz;
            const double mu2 = inner.h2_2[i] * s4;
            const double G = cP[i] * (f.y + mu2 + 2 * f.z * s.x + 2 * b.x + s.x * s.x) + anta[i] +
                             antb[i] * s.x + Q[i] * (f.z + 2 * s.x) + p[i] * (b.xx + f.z * s.xx) +
                             inner.hb2[i] * r1 + inner.hs2[i] * r2 + q[i] * s.xx + inner.hs2[i] * r3 + udu +
                             inner.h2_11[i] * s4 + p[i] * p[i] * inner.h2_22[i] * s4;
            const double G1 = cP1[i] * (b.x + bl.x + s.x * sl.x + f.y + f.z * (s.xd + sl.x) + mu2) +
                              Q1[i] * (s.x + sl.x + f.z) + cP[i] * (b.xd + s.x * s.xd + f.z * s.xd) +
                              Q[i] * s.xd + p[i] * (b.xxd + f.z * s.xxd + f.yxd + s.x * f.zxd) +
                              q[i] * (s.xxd + f.zxd) + f.xxd;
            Pj[i] = cP[i] + G * dt;
            P1j[i] = cP1[i] + G1 * dt;
        });
    }
    return a;
}

AuxiliaryBsde solve_auxiliary_bsde(const CoefficientSet& coeffs, const Star& star, const AdjointFirst& first,
                                   const AdjointSecond& second, const SpikeVariation& spike, const TimeGrid& grid,
                                   const BrownianBundle& bundle, const RegressionBasis& basis) {
    const ForwardSolution& fw = star.fw();
    const BackwardSolution& bw = star.bw();
    const int n = grid.steps();
    const std::size_t N = fw.x.particles();
    const double dt = grid.dt();
    const ControlTrace alt = spiked_trace(fw.control, spike, fw.x, grid);
    AuxiliaryBsde a{PathEnsemble::zeros(grid, N), PathEnsemble::zeros(grid, N), {}, {}, spike.first_step};
    a.a1.assign(static_cast<std::size_t>(spike.width_steps), {});
    a.delta_f.assign(static_cast<std::size_t>(spike.width_steps), {});

    SdeSlice sde, sde_alt;
    DriverSlice drv;
    std::vector<double> h2y(N), source(N);
    for (int j = n - 1; j >= 0; --j) {
        const LeastSquaresProjector proj(step_features(fw, j), basis);
        const auto next = a.y.slice(j + 1);
        const auto [c, z] = conditional_step(proj, next, bundle.step(j), dt);
        std::copy(z.begin(), z.end(), a.z.slice(j).begin());

        drv.evaluate(coeffs, fw, bw, grid, j, fw.control);
        std::fill(source.begin(), source.end(), 0.0);
        if (spike.active(j)) {
            const auto r = static_cast<std::size_t>(j - spike.first_step);
            sde.evaluate(coeffs, fw, grid, j, fw.control);
            sde_alt.evaluate(coeffs, fw, grid, j, alt);
            a.a1[r].resize(N);
            a.delta_f[r].resize(N);
            const double t = grid.time(j);
            kernels::parallel_for(N, [&](std::size_t i) {
                const double db = sde_alt.b[i].value - sde.b[i].value;
                const double ds = sde_alt.s[i].value - sde.s[i].value;
                const double p = first.p.at(i, j), q = first.q.at(i, j), P = second.P.at(i, j);
                const double A1 = p * db + q * ds + 0.5 * P * ds * ds;
                double df = 0.0;
                if (coeffs.driver) {
                    const double x = fw.x.at(i, j), xd = fw.x.delayed(i, j), y = bw.y.at(i, j), zs = bw.z.at(i, j);
                    df = coeffs.driver({t, x, xd, y, zs + p * ds, drv.stat, alt.at(i, j)}).value - drv.f[i].value;
                }
                a.a1[r][i] = A1;
                a.delta_f[r][i] = df;
                source[i] = A1 + df;
            });
        }
        // Hat convention: f_mu2 at particle i's state, argument and Y-breve at particle j.
        kernels::parallel_for(N, [&](std::size_t l) { h2y[l] = coeffs.driver_inner.p2(fw.x.at(l, j), bw.y.at(l, j)) * c[l]; });
        const double hat = kernels::mean(h2y);
        auto yj = a.y.slice(j);
        kernels::parallel_for(N, [&](std::size_t i) {
            const DriverJet& f = drv.f[i];
            yj[i] = c[i] + (f.y * c[i] + f.z * z[i] + f.m * hat + source[i]) * dt;
        });
    }
    return a;
}

GammaProcess simulate_gamma(const CoefficientSet& coeffs, const Star& star, const TimeGrid& grid,
                            const BrownianBundle& bundle, double blowup_guard) {
    const ForwardSolution& fw = star.fw();
    const BackwardSolution& bw = star.bw();
    const int n = grid.steps();
    const std::size_t N = fw.x.particles();
    const double dt = grid.dt();
    GammaProcess g{PathEnsemble::zeros(grid, N)};
    std::fill(g.gamma.slice(0).begin(), g.gamma.slice(0).end(), 1.0);
    DriverSlice drv;
    std::vector<double> w(N);
    for (int j = 0; j < n; ++j) {
        drv.evaluate(coeffs, fw, bw, grid, j, fw.control);
        const auto cur = g.gamma.slice(j);
        // Star convention: f_m at particle l's state, argument at particle i.
        kernels::parallel_for(N, [&](std::size_t l) { w[l] = drv.f[l].m * cur[l]; });
        const double s = kernels::mean(w);
        const auto dw = bundle.step(j);
        auto next = g.gamma.slice(j + 1);
        bool blown = false;
        kernels::parallel_for(N, [&](std::size_t i) {
            const DriverJet& f = drv.f[i];
            const double h2 = coeffs.driver_inner.p2(fw.x.at(i, j), bw.y.at(i, j));
            next[i] = cur[i] + (f.y * cur[i] + h2 * s) * dt + f.z * cur[i] * dw[i];
        });
        for (double v : next) blown = blown || !(std::abs(v) <= blowup_guard);
        if (blown) throw NumericalBlowup("|Gamma| exceeded the guard at t = " + format_double(grid.time(j + 1)));
    }
    return g;
}

void write_adjoints_csv(std::ostream& os, const TimeGrid& grid, const AdjointFirst& first,
                        const AdjointSecond& second, std::size_t stride) {
    write_ensembles_csv(os, grid,
                        {{"p", &first.p}, {"q", &first.q}, {"P", &second.P}, {"Q", &second.Q},
                         {"P1", &second.P1}, {"Q1", &second.Q1}},
                        0, grid.last_index(), stride);
}

}  // namespace mfsmp
