#include "fractime/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fractime/quadrature.hpp"

namespace fractime {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

// Spectral density K with E_beta(-t^beta) = int_0^inf e^{-rt} K(r) dr.
double ml_spectral_density(double beta, double r) {
    const double rb = std::pow(r, beta);
    return std::sin(beta * kPi) / kPi * std::pow(r, beta - 1.0) /
           (rb * rb + 2.0 * rb * std::cos(beta * kPi) + 1.0);
}

// Kahan-compensated power series; fails (returns false) when intermediate
// terms are large enough to eat the available precision.
bool ml_series(double beta, double z, double& out) {
    double sum = 1.0, comp = 0.0, term = 1.0, max_term = 1.0;
    for (int k = 1; k < 400; ++k) {
        term = std::pow(z, k) / std::tgamma(1.0 + beta * k);
        max_term = std::max(max_term, std::fabs(term));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::fabs(term) < 1e-17 * std::fabs(sum)) {
            if (max_term > 1e7 * std::max(std::fabs(sum), 1e-30)) return false;
            out = sum;
            return true;
        }
    }
    return false;
}

double ml_integral(double beta, double x) {
    const auto f = [&](double r) {
        return ml_spectral_density(beta, r) * std::exp(-r * x);
    };
    const double R = std::max(4.0, 60.0 / x);
    double v = integrate(f, 0.0, 1.0, 1e-14, 1e-11).value;
    v += integrate(f, 1.0, R, 1e-14, 1e-11).value;
    return v;
}

cplx phi_complex(const LevySpec& spec, cplx lambda) {
    return spec.kappa * lambda + laplace_exponent_complex(spec, lambda);
}

cplx eigenmode_transform_complex(const LevySpec& spec, double theta,
                                 cplx lambda) {
    // For the compact-support (truncated) family phi grows like
    // e^{-Re(lambda) delta} far left of the imaginary axis; U(lambda)
    // degenerates to 1/lambda there long before doubles overflow.
    if (const auto* tr = std::get_if<TruncatedStableMeasure>(&spec.measure)) {
        if (lambda.real() * tr->delta < -200.0) return 1.0 / lambda;
    }
    const cplx phi = phi_complex(spec, lambda);
    return phi / (lambda * (phi + theta));
}

// Fixed-Talbot contour inversion (M-point midpoint rule on the Talbot path).
// Roundoff on the contour is amplified by e^{rt} = e^{2M/5}, so node counts
// much past 30 destroy accuracy in doubles; the effective count is capped.
double invert_talbot(const LevySpec& spec, double theta, double t, int M) {
    M = std::min(M, 30);
    const double r = 2.0 * M / (5.0 * t);
    double sum =
        0.5 * std::exp(r * t) * eigenmode_transform_complex(spec, theta, r).real();
    for (int k = 1; k < M; ++k) {
        const double th = k * kPi / M;
        const double cot = std::cos(th) / std::sin(th);
        const cplx s(r * th * cot, r * th);
        const double sigma = th + (th * cot - 1.0) * cot;
        const cplx val = std::exp(s * t) *
                         eigenmode_transform_complex(spec, theta, s) *
                         cplx(1.0, sigma);
        sum += val.real();
    }
    return sum * r / M;
}

// Abate-Whitt Euler series: Bromwich trapezoid with binomial (Euler)
// acceleration of the alternating tail.
double invert_euler(const LevySpec& spec, double theta, double t, int M) {
    const double A = 18.4;
    const int ntr = std::max(20, M);
    const int m_euler = 12;
    const double x = A / (2.0 * t);
    const double h = kPi / t;
    std::vector<double> partial;
    double sum = 0.5 * eigenmode_transform_complex(spec, theta, x).real();
    for (int k = 1; k <= ntr + m_euler; ++k) {
        const cplx val =
            eigenmode_transform_complex(spec, theta, cplx(x, k * h));
        sum += ((k % 2 == 0) ? 1.0 : -1.0) * val.real();
        if (k >= ntr) partial.push_back(sum);
    }
    double acc = 0.0;
    double binom = 1.0;  // C(m_euler, j)
    for (int j = 0; j <= m_euler; ++j) {
        acc += binom * partial[j];
        binom = binom * (m_euler - j) / (j + 1.0);
    }
    return std::exp(A / 2.0) / t * acc / std::pow(2.0, m_euler);
}

}  // namespace

double mittag_leffler(double beta, double z) {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("mittag_leffler: beta must be in (0,1]");
    if (z > 0.0)
        throw std::invalid_argument("mittag_leffler: only z <= 0 is supported");
    if (z == 0.0) return 1.0;
    if (beta == 1.0) return std::exp(z);
    if (z >= -5.0) {
        double v;
        if (ml_series(beta, z, v)) return v;
    }
    // The spectral density below is for t -> E_beta(-t^beta); substitute
    // t = (-z)^(1/beta) to evaluate at a plain argument.
    return ml_integral(beta, std::pow(-z, 1.0 / beta));
}

std::complex<double> laplace_exponent_complex(const LevySpec& spec,
                                              std::complex<double> lambda) {
    return std::visit(
        [&](const auto& m) -> cplx {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return std::pow(lambda, m.beta);
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                return std::pow(lambda + m.m, m.beta) - std::pow(m.m, m.beta);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                // phi0(lambda) = lambda * int_0^delta e^{-lambda x} w(x) dx,
                // both sides entire in lambda (compact support).
                const LevySpec driftless{0.0, m};
                const auto re = [&](double x) {
                    return (std::exp(-lambda * x) * tail_w(driftless, x)).real();
                };
                const auto im = [&](double x) {
                    return (std::exp(-lambda * x) * tail_w(driftless, x)).imag();
                };
                const cplx integral(
                    integrate(re, 0.0, m.delta, 1e-13, 1e-11).value,
                    integrate(im, 0.0, m.delta, 1e-13, 1e-11).value);
                return lambda * integral;
            } else {
                cplx s = 0.0;
                for (const auto& c : m.components)
                    s += c.weight * std::pow(lambda, c.beta);
                return s;
            }
        },
        spec.measure);
}

double eigenmode_transform(const LevySpec& spec, double theta, double lambda) {
    if (!(theta > 0.0))
        throw std::invalid_argument("eigenmode_transform: theta must be positive");
    if (!(lambda > 0.0))
        throw std::invalid_argument("eigenmode_transform: lambda must be positive");
    const double phi = laplace_exponent(spec, lambda);
    return phi / (lambda * (phi + theta));
}

EigenmodeValue eigenmode_solution(const LevySpec& spec, double theta, double t,
                                  const InversionConfig& cfg) {
    if (!(theta > 0.0))
        throw std::invalid_argument("eigenmode_solution: theta must be positive");
    if (!(t > 0.0))
        throw std::invalid_argument("eigenmode_solution: t must be positive");
    if (cfg.node_count < 8)
        throw std::invalid_argument("eigenmode_solution: node_count must be >= 8");
    const double talbot = invert_talbot(spec, theta, t, cfg.node_count);
    const double euler = invert_euler(spec, theta, t, cfg.node_count);
    EigenmodeValue out;
    out.error_estimate = std::fabs(talbot - euler);
    out.value =
        cfg.method == InversionMethod::TalbotContour ? talbot : euler;
    if (out.error_estimate >
        10.0 * cfg.target_rel_tol * std::max(std::fabs(out.value), 1e-3))
        throw InversionError(
            "eigenmode_solution: inversion methods disagree beyond tolerance");
    // The solution is completely monotone with u(0)=1, so it lives in [0,1].
    if (out.value < 0.0 || out.value > 1.0) {
        if (out.value < -1e-8 || out.value > 1.0 + 1e-8)
            throw InversionError(
                "eigenmode_solution: value escaped [0,1] beyond tolerance");
        out.value = std::clamp(out.value, 0.0, 1.0);
        out.clamped = true;
    }
    return out;
}

double subordinated_kernel(const LevySpec& spec, std::vector<KernelMode> modes,
                           double t, const InversionConfig& cfg) {
    std::sort(modes.begin(), modes.end(),
              [](const KernelMode& a, const KernelMode& b) {
                  return a.theta < b.theta;
              });
    // Suffix sums of |coeff| bound the remaining terms: u is nonincreasing
    // in theta.
    std::vector<double> tail_mass(modes.size() + 1, 0.0);
    for (std::size_t i = modes.size(); i-- > 0;)
        tail_mass[i] = tail_mass[i + 1] + std::fabs(modes[i].coeff);
    double sum = 0.0;
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double u = eigenmode_solution(spec, modes[i].theta, t, cfg).value;
        sum += modes[i].coeff * u;
        if (u * tail_mass[i + 1] < 1e-12 * std::fabs(sum)) break;
    }
    return sum;
}

}  // namespace fractime
