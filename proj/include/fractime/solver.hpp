#pragma once

#include <string>
#include <vector>

#include "fractime/levy_kernel.hpp"
#include "fractime/markov.hpp"

namespace fractime {

struct TimeGrid {
    double t_end = 1.0;
    int n_steps = 1;

    void validate() const;
    double dt() const { return t_end / n_steps; }
    double node(int j) const { return j * dt(); }
};

// Memory weights of the piecewise-constant kernel discretization. They
// depend on the lag only: weight(m) multiplies u(t_{n-m-1}) - f at step n.
struct CaputoWeights {
    double dt = 0.0;
    std::vector<double> by_lag;  // by_lag[m] = G((m+1) dt) - G(m dt)

    double at(int n, int j) const { return by_lag[n - j]; }
};

CaputoWeights build_weights(const LevySpec& spec, const TimeGrid& grid);

struct SolveResult {
    TimeGrid grid;
    std::vector<Vector> states;  // states[j] = u(t_j, .), j = 0..n_steps
    LevySpec spec;
    double weight_sum = 0.0;  // G(t_end), a cheap scheme fingerprint
};

// One implicit step: given u(t_0..t_{n-1}) in history, returns u(t_n).
Vector step(const GeneratorModel& model, const LevySpec& spec,
            const CaputoWeights& weights, const std::vector<Vector>& history,
            const Vector& f0, int n);

SolveResult solve(const GeneratorModel& model, const LevySpec& spec,
                  const TimeGrid& grid, const Vector& f0);

// Max-norm mismatch of the integrated identity over the grid, with the
// time integral of Lu recomputed by an independent trapezoid rule.
double residual_check(const SolveResult& result, const LevySpec& spec,
                      const GeneratorModel& model, const Vector& f0);

// CSV export: header `t,state_0,...,state_{d-1}`, 17 significant digits.
std::string to_csv(const SolveResult& result);

}  // namespace fractime
