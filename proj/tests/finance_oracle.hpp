#pragma once

#include <cstddef>
#include <vector>

// Method-of-steps reference for the finance model with v = 0, where every
// process is deterministic:
//   X' = (alpha + gamma) X + beta X(t - l), X = x0 on [-l, 0]
//   -Y' = (kappa - delta) Y + zeta Y^2 / 2, Y(T) = X(T)
//   -p' = p (f_y + kappa + alpha) + gamma p + beta p(t + l), p(T) = 1
//   -P' = P (f_y + kappa + 2 alpha) + 2 beta P1(t + l) + zeta p^2, P(T) = 0
//   -P1' = P1 (2 alpha + f_y + kappa) + beta P, P1(T) = 0
// with f_y = zeta Y - delta and zero values beyond T. Heun steps on a grid
// `refine` times finer than dt, aligned with the delay.
struct FinanceOracle {
    std::vector<double> x, y, p, P, P1;  // on the coarse grid, j in [0, n]
};

struct FinanceOracleParams {
    double alpha = 0.03, beta = 0.01, gamma = 0.05, delta = 0.1, kappa = 0.05, zeta = 0.0;
    double x0 = 1.0, T = 1.5, l = 1.0, dt = 1e-3;
    int refine = 8;
};

inline FinanceOracle finance_oracle(const FinanceOracleParams& c) {
    const int n = static_cast<int>(c.T / c.dt + 0.5) * c.refine;
    const int k = static_cast<int>(c.l / c.dt + 0.5) * c.refine;
    const double h = c.dt / c.refine;
    auto at = [](const std::vector<double>& v, int i) { return i < 0 || i >= static_cast<int>(v.size()) ? 0.0 : v[i]; };

    std::vector<double> x(static_cast<std::size_t>(n + 1));
    auto xlag = [&](int i) { return i - k < 0 ? c.x0 : x[static_cast<std::size_t>(i - k)]; };
    x[0] = c.x0;
    for (int i = 0; i < n; ++i) {
        const double a = c.alpha + c.gamma;
        const double f0 = a * x[i] + c.beta * xlag(i);
        const double pred = x[i] + h * f0;
        const double f1 = a * pred + c.beta * xlag(i + 1);
        x[i + 1] = x[i] + 0.5 * h * (f0 + f1);
    }

    std::vector<double> y(n + 1), p(n + 1), P(n + 1), P1(n + 1);
    y[n] = x[n];
    p[n] = 1.0;
    P[n] = 0.0;
    P1[n] = 0.0;
    struct State {
        double y, p, P, P1;
    };
    // Right-hand sides of -d/dt, so that state(t - h) = state(t) + h * rhs.
    auto rhs = [&](const State& s, int i) {
        const double fy = c.zeta * s.y - c.delta;
        return State{(c.kappa - c.delta) * s.y + 0.5 * c.zeta * s.y * s.y,
                     s.p * (fy + c.kappa + c.alpha) + c.gamma * s.p + c.beta * at(p, i + k),
                     s.P * (fy + c.kappa + 2 * c.alpha) + 2 * c.beta * at(P1, i + k) + c.zeta * s.p * s.p,
                     s.P1 * (2 * c.alpha + fy + c.kappa) + c.beta * s.P};
    };
    for (int i = n; i > 0; --i) {
        const State s{y[i], p[i], P[i], P1[i]};
        const State f0 = rhs(s, i);
        const State pred{s.y + h * f0.y, s.p + h * f0.p, s.P + h * f0.P, s.P1 + h * f0.P1};
        const State f1 = rhs(pred, i - 1);
        y[i - 1] = s.y + 0.5 * h * (f0.y + f1.y);
        p[i - 1] = s.p + 0.5 * h * (f0.p + f1.p);
        P[i - 1] = s.P + 0.5 * h * (f0.P + f1.P);
        P1[i - 1] = s.P1 + 0.5 * h * (f0.P1 + f1.P1);
    }

    FinanceOracle o;
    for (int j = 0; j <= n; j += c.refine) {
        o.x.push_back(x[j]);
        o.y.push_back(y[j]);
        o.p.push_back(p[j]);
        o.P.push_back(P[j]);
        o.P1.push_back(P1[j]);
    }
    return o;
}
