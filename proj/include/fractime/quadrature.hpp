#pragma once

#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace fractime {

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;   // estimated absolute error
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
inline constexpr double kGK15Nodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898,  0.0,
     0.207784955007898,  0.405845151377397,  0.586087235467691,
     0.741531185599394,  0.864864423359769,  0.949107912342759,
     0.991455371120813};

inline constexpr double kK15Weights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};

inline constexpr double kG7Weights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

template <typename F>
QuadratureResult gk15(const F& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double k = 0.0, g = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double fx = f(mid + half * kGK15Nodes[i]);
        k += kK15Weights[i] * fx;
        if (i % 2 == 1) g += kG7Weights[i / 2] * fx;
    }
    QuadratureResult r;
    r.value = k * half;
    // |K15 - G7| is a conservative estimate for the K15 error.
    r.error = std::fabs(k - g) * std::fabs(half);
    return r;
}

struct Panel {
    double a, b, value, error;

    bool operator<(const Panel& other) const { return error < other.error; }
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration over a finite interval: the
// panel with the largest error estimate is bisected until the total meets
// the tolerance. The nodes are interior, so integrable endpoint
// singularities (x^-beta) are handled; each bisection toward the endpoint
// shrinks the singular panel's error geometrically.
template <typename F>
QuadratureResult integrate(const F& f, double a, double b,
                           double abs_tol = 1e-12, double rel_tol = 1e-10,
                           int max_panels = 8192) {
    QuadratureResult total;
    if (a == b) return total;
    std::priority_queue<detail::Panel> panels;
    {
        const auto r = detail::gk15(f, a, b);
        panels.push({a, b, r.value, r.error});
        total.value = r.value;
        total.error = r.error;
    }
    for (int n = 1; n < max_panels; ++n) {
        if (total.error <= std::max(abs_tol, rel_tol * std::fabs(total.value)))
            break;
        const detail::Panel worst = panels.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b)
            throw QuadratureError(
                "adaptive quadrature: panel width at machine precision");
        panels.pop();
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        total.value += left.value + right.value - worst.value;
        total.error += left.error + right.error - worst.error;
        panels.push({worst.a, mid, left.value, left.error});
        panels.push({mid, worst.b, right.value, right.error});
    }
    if (total.error > 100.0 * std::max(abs_tol, rel_tol * std::fabs(total.value)))
        throw QuadratureError("adaptive quadrature: panel budget exhausted");
    return total;
}

// Integrates f over [a, infinity) for integrands with (at least) exponential
// decay: the upper limit is doubled until the last panel contributes less
// than tail_frac of the running total.
template <typename F>
QuadratureResult integrate_to_infinity(const F& f, double a,
                                       double abs_tol = 1e-12,
                                       double rel_tol = 1e-10,
                                       double tail_frac = 1e-14) {
    double lo = a;
    double width = std::max(1.0, std::fabs(a));
    QuadratureResult total;
    for (int iter = 0; iter < 64; ++iter) {
        QuadratureResult panel =
            integrate(f, lo, lo + width, abs_tol, rel_tol);
        total.value += panel.value;
        total.error += panel.error;
        const double scale = std::max(std::fabs(total.value), abs_tol);
        if (iter > 0 && std::fabs(panel.value) < tail_frac * scale)
            return total;
        lo += width;
        width *= 2.0;
    }
    throw QuadratureError("integrate_to_infinity: tail did not converge");
}

}  // namespace fractime
