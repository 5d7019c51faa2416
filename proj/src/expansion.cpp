#include "mfsmp/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "mfsmp/csv.hpp"
#include "mfsmp/errors.hpp"
#include "mfsmp/kernels.hpp"
#include "step_data.hpp"

namespace mfsmp {

const std::vector<RateTarget>& all_rate_targets() {
    static const std::vector<RateTarget> all{RateTarget::StateGap,        RateTarget::FirstVariation,
                                             RateTarget::SecondVariation, RateTarget::FirstRemainder,
                                             RateTarget::SecondRemainder, RateTarget::MeanFieldFourth,
                                             RateTarget::DriverKernel,    RateTarget::DriverKernelAdjoint};
    return all;
}

std::string rate_target_id(RateTarget t) {
    switch (t) {
        case RateTarget::StateGap: return "state-gap";
        case RateTarget::FirstVariation: return "first-variation";
        case RateTarget::SecondVariation: return "second-variation";
        case RateTarget::FirstRemainder: return "first-remainder";
        case RateTarget::SecondRemainder: return "second-remainder";
        case RateTarget::MeanFieldFourth: return "mean-field-fourth";
        case RateTarget::DriverKernel: return "driver-kernel";
        case RateTarget::DriverKernelAdjoint: return "driver-kernel-adjoint";
    }
    return "unknown";
}

RateTarget parse_rate_target(const std::string& id) {
    for (RateTarget t : all_rate_targets())
        if (rate_target_id(t) == id) return t;
    throw ConfigError("unknown rate target '" + id + "'");
}

double expected_slope(RateTarget t) {
    switch (t) {
        case RateTarget::StateGap:
        case RateTarget::FirstVariation: return 1.0;
        case RateTarget::SecondVariation:
        case RateTarget::FirstRemainder: return 2.0;
        default: return 0.0;
    }
}

bool needs_adjoint(RateTarget t) { return t == RateTarget::DriverKernelAdjoint; }

double loglog_slope(const std::vector<double>& eps, const std::vector<double>& values) {
    if (eps.size() < 2 || values.size() != eps.size())
        throw InsufficientGrid("a slope needs at least two spike widths, got " + std::to_string(eps.size()));
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(eps.size());
    for (std::size_t a = 0; a < eps.size(); ++a) {
        if (!(values[a] > 0.0) || !(eps[a] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double x = std::log(eps[a]), y = std::log(values[a]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double den = m * sxx - sx * sx;
    if (den == 0.0) throw InsufficientGrid("spike widths are all equal");
    return (m * sxy - sx * sy) / den;
}

bool strictly_decreasing(const std::vector<double>& values) {
    for (std::size_t a = 1; a < values.size(); ++a)
        if (!(values[a] < values[a - 1])) return false;
    return true;
}

namespace {

// Sweeps widths in decreasing order so ratios read left to right.
std::vector<double> sorted_widths(const std::vector<double>& eps) {
    std::vector<double> out = eps;
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

void update_sup(std::vector<double>& sup, std::size_t i, double v) {
    if (v > sup[i]) sup[i] = v;
}

}  // namespace

ExpansionReport check_expansion_residual(const CoefficientSet& coeffs, const SpikeFamily& family, const Star& star,
                                         const AdjointFirst& first, const AdjointSecond& second,
                                         const TimeGrid& grid, const BrownianBundle& bundle,
                                         const RegressionBasis& basis, const InitialPath& init) {
    const ForwardSolution& fw = star.fw();
    const std::size_t N = fw.x.particles();
    const int n = grid.steps(), k = grid.delay_steps();
    ExpansionReport report;
    for (double eps : sorted_widths(family.eps)) {
        const SpikeVariation spike = make_spike(grid, family.alternate, family.tau, eps);
        report.eps.push_back(spike.eps());
        const ForwardSolution xe = simulate_spiked(coeffs, fw, spike, grid, bundle, init);
        const PathEnsemble x1 = simulate_first_variation(coeffs, spike, fw, grid, bundle);
        const PathEnsemble x2 = simulate_second_variation(coeffs, spike, fw, x1, grid, bundle);

        BackwardOptions opt;
        opt.features = &fw;
        opt.spread = &xe;
        const BackwardSolution ye = solve_backward_mfbsde(coeffs, xe, grid, bundle, basis, opt);
        const BackwardSolution ys = solve_backward_mfbsde(coeffs, fw, grid, bundle, basis, opt);
        const AuxiliaryBsde aux = solve_auxiliary_bsde(coeffs, star, first, second, spike, grid, bundle, basis);

        std::vector<double> sup2(N, 0.0), sup1(N, 0.0), supa(N, 0.0);
        for (int j = 0; j <= n; ++j) {
            kernels::parallel_for(N, [&](std::size_t i) {
                const double a = x1.at(i, j), ad = x1.at(i, j - k);
                const double d1 = ye.y.at(i, j) - ys.y.at(i, j) - first.p.at(i, j) * (a + x2.at(i, j)) -
                                  aux.y.at(i, j);
                const double d2 = d1 - 0.5 * second.P.at(i, j) * a * a - second.P1.at(i, j) * a * ad;
                update_sup(sup1, i, d1 * d1);
                update_sup(sup2, i, d2 * d2);
                update_sup(supa, i, aux.y.at(i, j) * aux.y.at(i, j));
            });
        }
        ExpansionRow row;
        row.eps = spike.eps();
        row.width_steps = spike.width_steps;
        const double m2 = kernels::mean(sup2);
        row.r = std::sqrt(m2);
        row.r_se = row.r > 0 ? kernels::standard_error(sup2) / (2.0 * row.r) : 0.0;
        row.ratio = row.r / row.eps;
        row.ratio_se = row.r_se / row.eps;
        row.r_first = std::sqrt(kernels::mean(sup1));
        row.ratio_first = row.r_first / row.eps;
        row.aux_sup = kernels::mean(supa);
        report.rows.push_back(row);
    }
    return report;
}

ExpansionReport run_rate_experiment(const std::vector<RateTarget>& targets, const CoefficientSet& coeffs,
                                    const SpikeFamily& family, const Star& star, const AdjointFirst* first,
                                    const TimeGrid& grid, const BrownianBundle& bundle, const InitialPath& init) {
    const std::vector<double> widths = sorted_widths(family.eps);
    if (widths.size() < 2)
        throw InsufficientGrid("a slope needs at least two spike widths, got " + std::to_string(widths.size()));
    bool kernels_needed = false;
    for (RateTarget t : targets) {
        if (needs_adjoint(t) && !first) throw std::invalid_argument(rate_target_id(t) + " needs the first adjoint");
        kernels_needed = kernels_needed || t == RateTarget::DriverKernel || t == RateTarget::DriverKernelAdjoint;
    }
    if (kernels_needed && !star.backward) throw std::invalid_argument("driver-kernel targets need the star BSDE");

    const ForwardSolution& fw = star.fw();
    const std::size_t N = fw.x.particles();
    const int n = grid.steps();
    const double dt = grid.dt();

    ExpansionReport report;
    report.rates.resize(targets.size());
    for (std::size_t a = 0; a < targets.size(); ++a) report.rates[a].target = targets[a];

    SdeSlice sde;
    DriverSlice drv;
    std::vector<double> w1(N), w2(N), w3(N), w4(N), w5(N), w6(N);
    for (double eps : widths) {
        const SpikeVariation spike = make_spike(grid, family.alternate, family.tau, eps);
        report.eps.push_back(spike.eps());
        const ForwardSolution xe = simulate_spiked(coeffs, fw, spike, grid, bundle, init);
        const PathEnsemble x1 = simulate_first_variation(coeffs, spike, fw, grid, bundle);
        const PathEnsemble x2 = simulate_second_variation(coeffs, spike, fw, x1, grid, bundle);

        std::vector<std::vector<double>> sups(5, std::vector<double>(N, 0.0));
        std::vector<double> mf(N, 0.0), kd(N, 0.0), kp(N, 0.0);
        for (int j = 0; j <= n; ++j) {
            kernels::parallel_for(N, [&](std::size_t i) {
                const double g = xe.x.at(i, j) - fw.x.at(i, j);
                const double a = x1.at(i, j), b = x2.at(i, j);
                update_sup(sups[0], i, g * g);
                update_sup(sups[1], i, a * a);
                update_sup(sups[2], i, b * b);
                update_sup(sups[3], i, (g - a) * (g - a));
                update_sup(sups[4], i, (g - a - b) * (g - a - b));
            });
            if (j == n) break;
            // Hat kernels: outer partial at particle i, inner derivative and X^1 at particle l.
            sde.evaluate(coeffs, fw, grid, j, fw.control);
            kernels::parallel_for(N, [&](std::size_t l) {
                const double x = fw.x.at(l, j), a = x1.at(l, j);
                w1[l] = coeffs.drift_inner.d1(x) * a;
                w2[l] = coeffs.diffusion_inner.d1(x) * a;
            });
            const double cb = kernels::mean(w1), cs = kernels::mean(w2);
            double c1 = 0, c2 = 0, c3 = 0, c4 = 0;
            if (kernels_needed) {
                drv.evaluate(coeffs, fw, star.bw(), grid, j, fw.control);
                kernels::parallel_for(N, [&](std::size_t l) {
                    const double x = fw.x.at(l, j), y = star.bw().y.at(l, j), a = x1.at(l, j);
                    const double pl = first ? first->p.at(l, j) : 0.0;
                    w3[l] = coeffs.driver_inner.p1(x, y) * a;
                    w4[l] = coeffs.driver_inner.p2(x, y) * a;
                    w5[l] = w3[l] * pl;
                    w6[l] = w4[l] * pl;
                });
                c1 = kernels::mean(w3);
                c2 = kernels::mean(w4);
                c3 = kernels::mean(w5);
                c4 = kernels::mean(w6);
            }
            kernels::parallel_for(N, [&](std::size_t i) {
                const double hb = sde.b[i].m * cb, hs = sde.s[i].m * cs;
                mf[i] += (hb * hb * hb * hb + hs * hs * hs * hs) * dt;
                if (kernels_needed) {
                    const DriverJet& f = drv.f[i];
                    const double m1 = f.m * f.m;
                    const double m2 = f.mx * f.mx + f.mxd * f.mxd + f.my * f.my + f.mz * f.mz;
                    const double n0 = c1 * c1 + c2 * c2, np = c3 * c3 + c4 * c4;
                    kd[i] += (m1 * m1 * n0 * n0 + m2 * m2 * n0 * n0) * dt;
                    kp[i] += (m1 * m1 * np * np + m2 * m2 * np * np) * dt;
                }
            });
        }
        for (RateSeries& s : report.rates) {
            double v = 0;
            switch (s.target) {
                case RateTarget::StateGap: v = kernels::mean(sups[0]); break;
                case RateTarget::FirstVariation: v = kernels::mean(sups[1]); break;
                case RateTarget::SecondVariation: v = kernels::mean(sups[2]); break;
                case RateTarget::FirstRemainder: v = kernels::mean(sups[3]); break;
                case RateTarget::SecondRemainder: v = kernels::mean(sups[4]); break;
                case RateTarget::MeanFieldFourth: v = kernels::mean(mf); break;
                case RateTarget::DriverKernel: v = kernels::mean(kd); break;
                case RateTarget::DriverKernelAdjoint: v = kernels::mean(kp); break;
            }
            s.values.push_back(v);
            s.normalized.push_back(v / (spike.eps() * spike.eps()));
        }
    }
    for (RateSeries& s : report.rates) {
        s.slope = loglog_slope(report.eps, s.values);
        const double e = expected_slope(s.target);
        s.pass = e > 0 ? std::abs(s.slope - e) <= 0.2 : strictly_decreasing(s.normalized);
    }
    return report;
}

void write_expansion_csv(std::ostream& os, const ExpansionReport& report) {
    os << "eps,r,ratio,r_se,ratio_first,aux_sup\n";
    for (const ExpansionRow& r : report.rows)
        os << format_double(r.eps) << ',' << format_double(r.r) << ',' << format_double(r.ratio) << ','
           << format_double(r.r_se) << ',' << format_double(r.ratio_first) << ',' << format_double(r.aux_sup)
           << '\n';
}

void write_rates_csv(std::ostream& os, const ExpansionReport& report) {
    os << "target,eps,value,normalized\n";
    for (const RateSeries& s : report.rates)
        for (std::size_t a = 0; a < s.values.size(); ++a)
            os << rate_target_id(s.target) << ',' << format_double(report.eps[a]) << ','
               << format_double(s.values[a]) << ',' << format_double(s.normalized[a]) << '\n';
}

}  // namespace mfsmp
