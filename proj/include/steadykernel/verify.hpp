#pragma once

// Numeric cross-checking of the exact answers: bind all symbols to rationals,
// integrate x' = F x + s with a fixed-step classical Runge-Kutta scheme, and
// compare against the closed forms.  The integrator never adapts: the step
// comes from the fastest diagonal rate, the horizon from the slowest, so runs
// are reproducible to the bit.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "laplacian.hpp"
#include "symexpr.hpp"

namespace steadykernel {

// Comparison tolerances shared by tests and the command-line checks.
inline constexpr double integration_rel_tol = 1e-6;   // integrated vs exact state
inline constexpr double balance_tol = 1e-8;           // inflow/outflow residual
inline constexpr double mass_conservation_tol = 1e-12;  // closed-system drift
inline constexpr double default_divergence_bound = 1e12;

struct NumericSystem {
    std::vector<std::vector<double>> f;
    std::vector<double> s;
    std::vector<double> d;  // degradation rates, for balance bookkeeping
    std::size_t n() const { return s.size(); }
};

inline NumericSystem make_numeric(const SdSystem& sys,
                                  const std::map<std::string, Rational>& bindings) {
    NumericSystem num;
    std::size_t n = sys.n();
    num.f.assign(n, std::vector<double>(n, 0.0));
    num.s.assign(n, 0.0);
    num.d.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (!sys.f.at(i, j).is_zero()) num.f[i][j] = to_double(sys.f.at(i, j).eval(bindings));
        if (!sys.s[i].is_zero()) num.s[i] = to_double(sys.s[i].eval(bindings));
        if (!sys.d[i].is_zero()) num.d[i] = to_double(sys.d[i].eval(bindings));
    }
    return num;
}

inline std::vector<double> derivative(const NumericSystem& sys, const std::vector<double>& x) {
    std::vector<double> dx(sys.n());
    for (std::size_t i = 0; i < sys.n(); ++i) {
        double acc = sys.s[i];
        for (std::size_t j = 0; j < sys.n(); ++j) acc += sys.f[i][j] * x[j];
        dx[i] = acc;
    }
    return dx;
}

// max |F x + s|: how far x is from being a steady state
inline double residual_norm(const NumericSystem& sys, const std::vector<double>& x) {
    double worst = 0.0;
    for (double v : derivative(sys, x)) worst = std::max(worst, std::abs(v));
    return worst;
}

// 1% of the fastest diagonal time constant (1.0 when every rate vanishes)
inline double default_dt(const NumericSystem& sys) {
    double fastest = 0.0;
    for (std::size_t i = 0; i < sys.n(); ++i) fastest = std::max(fastest, std::abs(sys.f[i][i]));
    return fastest > 0.0 ? 0.01 / fastest : 1.0;
}

// 50 slowest diagonal time constants (1.0 when every rate vanishes)
inline double default_t_end(const NumericSystem& sys) {
    double slowest = 0.0;
    bool seen = false;
    for (std::size_t i = 0; i < sys.n(); ++i) {
        double r = std::abs(sys.f[i][i]);
        if (r > 0.0 && (!seen || r < slowest)) slowest = r, seen = true;
    }
    return seen ? 50.0 / slowest : 1.0;
}

struct IntegrationResult {
    std::vector<double> x;
    double t = 0.0;
    std::size_t steps = 0;
    bool diverged = false;
};

using Observer = std::function<void(double, const std::vector<double>&)>;

// Classical fourth-order Runge-Kutta with a fixed step (the last step is
// shortened to land on t_end exactly).  The observer sees the initial state
// and every accepted step.  Integration stops early when any component
// leaves [-bound, bound] or stops being finite.
inline IntegrationResult integrate(const NumericSystem& sys, std::vector<double> x0, double dt,
                                   double t_end, const Observer& observe = {},
                                   double bound = default_divergence_bound) {
    if (x0.size() != sys.n()) throw error("initial state size mismatch");
    if (!(dt > 0.0)) throw error("step size must be positive");
    IntegrationResult res;
    res.x = std::move(x0);
    if (observe) observe(0.0, res.x);

    std::size_t n = sys.n();
    std::vector<double> k1, k2, k3, k4, probe(n);
    while (res.t < t_end && !res.diverged) {
        double h = std::min(dt, t_end - res.t);
        k1 = derivative(sys, res.x);
        for (std::size_t i = 0; i < n; ++i) probe[i] = res.x[i] + 0.5 * h * k1[i];
        k2 = derivative(sys, probe);
        for (std::size_t i = 0; i < n; ++i) probe[i] = res.x[i] + 0.5 * h * k2[i];
        k3 = derivative(sys, probe);
        for (std::size_t i = 0; i < n; ++i) probe[i] = res.x[i] + h * k3[i];
        k4 = derivative(sys, probe);
        for (std::size_t i = 0; i < n; ++i)
            res.x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        res.t += h;
        ++res.steps;
        for (double v : res.x)
            if (!std::isfinite(v) || std::abs(v) > bound) res.diverged = true;
        if (observe) observe(res.t, res.x);
    }
    return res;
}

// max-norm gap between a run at dt and a run at dt/2; shrinks roughly
// sixteen-fold per halving for a fourth-order scheme
inline double step_halving_error(const NumericSystem& sys, const std::vector<double>& x0,
                                 double dt, double t_end) {
    IntegrationResult coarse = integrate(sys, x0, dt, t_end);
    IntegrationResult fine = integrate(sys, x0, dt / 2.0, t_end);
    double worst = 0.0;
    for (std::size_t i = 0; i < sys.n(); ++i)
        worst = std::max(worst, std::abs(coarse.x[i] - fine.x[i]));
    return worst;
}

}  // namespace steadykernel
