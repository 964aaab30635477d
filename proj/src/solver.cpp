#include "fractime/solver.hpp"

#include <cmath>
#include <cstdio>

namespace fractime {

void TimeGrid::validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw std::invalid_argument("TimeGrid: t_end must be positive");
    if (n_steps < 1)
        throw std::invalid_argument("TimeGrid: n_steps must be >= 1");
}

CaputoWeights build_weights(const LevySpec& spec, const TimeGrid& grid) {
    grid.validate();
    const double dt = grid.dt();
    CaputoWeights w;
    w.dt = dt;
    w.by_lag.resize(grid.n_steps);
    for (int m = 0; m < grid.n_steps; ++m)
        w.by_lag[m] =
            integrated_tail_G(spec, (m + 1) * dt) - integrated_tail_G(spec, m * dt);
    double sum = 0.0;
    for (double g : w.by_lag) sum += g;
    const double total = integrated_tail_G(spec, grid.t_end);
    if (std::fabs(sum - total) > 1e-12 * std::max(total, 1.0))
        throw std::runtime_error("build_weights: telescoping identity violated");
    return w;
}

namespace {

// Right-hand side of the implicit step at index n, excluding the u_n terms:
// (kappa + g_0) f0 - sum_{j<n} g_{n-j} (u_j - f0) + dt * (L sum_{j<n} u_j).
Vector step_rhs(const LevySpec& spec, const CaputoWeights& weights,
                const std::vector<Vector>& history, const Vector& f0, int n,
                double dt, const Vector& l_history_sum) {
    const int dim = static_cast<int>(f0.size());
    Vector rhs(dim);
    const double g0 = weights.by_lag[0];
    for (int i = 0; i < dim; ++i)
        rhs[i] = (spec.kappa + g0) * f0[i] + dt * l_history_sum[i];
    for (int j = 1; j < n; ++j) {
        const double g = weights.by_lag[n - j];
        for (int i = 0; i < dim; ++i) rhs[i] -= g * (history[j][i] - f0[i]);
    }
    return rhs;
}

}  // namespace

Vector step(const GeneratorModel& model, const LevySpec& spec,
            const CaputoWeights& weights, const std::vector<Vector>& history,
            const Vector& f0, int n) {
    if (n < 1 || n > static_cast<int>(weights.by_lag.size()))
        throw std::invalid_argument("step: index out of range");
    if (static_cast<int>(history.size()) < n)
        throw std::invalid_argument("step: history too short");
    const double dt = weights.dt;
    const double g0 = weights.by_lag[0];
    if (!(spec.kappa + g0 > 0.0))
        throw std::runtime_error("step: degenerate implicit system");
    Vector l_history_sum(model.dim, 0.0);
    for (int j = 1; j < n; ++j) {
        const Vector lu_j = fractime::apply(model.L, history[j]);
        for (int i = 0; i < model.dim; ++i) l_history_sum[i] += lu_j[i];
    }
    Vector rhs = step_rhs(spec, weights, history, f0, n, dt, l_history_sum);
    Matrix system = (-dt) * model.L;
    for (int i = 0; i < model.dim; ++i) system(i, i) += spec.kappa + g0;
    return lu_solve(system, rhs);
}

SolveResult solve(const GeneratorModel& model, const LevySpec& spec,
                  const TimeGrid& grid, const Vector& f0) {
    grid.validate();
    spec.validate();
    model.validate();
    if (static_cast<int>(f0.size()) != model.dim)
        throw std::invalid_argument("solve: initial vector size mismatch");
    const double dt = grid.dt();
    const CaputoWeights weights = build_weights(spec, grid);
    const double g0 = weights.by_lag[0];
    if (!(spec.kappa + g0 > 0.0))
        throw std::runtime_error("solve: degenerate implicit system");

    Matrix system = (-dt) * model.L;
    for (int i = 0; i < model.dim; ++i) system(i, i) += spec.kappa + g0;
    const LuFactor lu(system);

    SolveResult result;
    result.grid = grid;
    result.spec = spec;
    result.weight_sum = integrated_tail_G(spec, grid.t_end);
    result.states.reserve(grid.n_steps + 1);
    result.states.push_back(f0);

    Vector l_history_sum(model.dim, 0.0);  // L * sum_{j=1}^{n-1} u_j
    for (int n = 1; n <= grid.n_steps; ++n) {
        Vector rhs =
            step_rhs(spec, weights, result.states, f0, n, dt, l_history_sum);
        Vector u = lu.solve(std::move(rhs));
        for (double v : u)
            if (!std::isfinite(v))
                throw std::runtime_error("solve: non-finite state encountered");
        if (n < grid.n_steps) {
            const Vector lu_n = fractime::apply(model.L, u);
            for (int i = 0; i < model.dim; ++i) l_history_sum[i] += lu_n[i];
        }
        result.states.push_back(std::move(u));
    }
    return result;
}

double residual_check(const SolveResult& result, const LevySpec& spec,
                      const GeneratorModel& model, const Vector& f0) {
    const TimeGrid& grid = result.grid;
    const double dt = grid.dt();
    const CaputoWeights weights = build_weights(spec, grid);
    std::vector<Vector> l_states(result.states.size());
    for (std::size_t j = 0; j < result.states.size(); ++j)
        l_states[j] = fractime::apply(model.L, result.states[j]);

    double worst = 0.0;
    Vector trap(model.dim, 0.0);  // trapezoid of int_0^{t_n} L u ds
    for (int n = 1; n <= grid.n_steps; ++n) {
        for (int i = 0; i < model.dim; ++i)
            trap[i] += 0.5 * dt * (l_states[n - 1][i] + l_states[n][i]);
        Vector mismatch(model.dim);
        for (int i = 0; i < model.dim; ++i)
            mismatch[i] =
                spec.kappa * (result.states[n][i] - f0[i]) - trap[i];
        for (int j = 1; j <= n; ++j) {
            const double g = weights.by_lag[n - j];
            for (int i = 0; i < model.dim; ++i)
                mismatch[i] += g * (result.states[j][i] - f0[i]);
        }
        worst = std::max(worst, max_abs(mismatch));
    }
    return worst;
}

std::string to_csv(const SolveResult& result) {
    const int dim =
        result.states.empty() ? 0 : static_cast<int>(result.states[0].size());
    std::string out = "t";
    for (int i = 0; i < dim; ++i) out += ",state_" + std::to_string(i);
    out += "\n";
    char buf[64];
    for (std::size_t j = 0; j < result.states.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", result.grid.node(static_cast<int>(j)));
        out += buf;
        for (double v : result.states[j]) {
            std::snprintf(buf, sizeof buf, ",%.17g", v);
            out += buf;
        }
        out += "\n";
    }
    return out;
}

}  // namespace fractime
