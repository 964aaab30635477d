#include "fractime/special.hpp"

#include <cmath>
#include <limits>

namespace fractime {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;

// Series for P(a, x), good for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < kMaxIter; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gamma_p_series: no convergence");
}

// Lentz continued fraction for Q(a, x), good for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("gamma_q_cf: no convergence");
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("regularized_gamma_p: a must be positive");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be nonnegative");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double upper_incomplete_gamma(double a, double x) {
    if (x <= 0.0) throw std::invalid_argument("upper_incomplete_gamma: x must be positive");
    if (a > 0.0) {
        if (x < a + 1.0)
            return std::tgamma(a) * (1.0 - gamma_p_series(a, x));
        return std::tgamma(a) * gamma_q_cf(a, x);
    }
    if (a == 0.0 || a <= -1.0)
        throw std::invalid_argument("upper_incomplete_gamma: a must be in (-1,0) or positive");
    // Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a, with a in (-1, 0).
    const double g1 = upper_incomplete_gamma(a + 1.0, x);
    return (g1 - std::pow(x, a) * std::exp(-x)) / a;
}

}  // namespace fractime
