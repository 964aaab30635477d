#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "fractime/levy_kernel.hpp"

namespace fractime {

struct InversionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A scalar eigenmode of the generator: L f = -theta f.
struct EigenMode {
    double theta;  // > 0
    double initial_amplitude = 1.0;
};

enum class InversionMethod { TalbotContour, AbateWhittSeries };

struct InversionConfig {
    InversionMethod method = InversionMethod::TalbotContour;
    int node_count = 48;          // >= 8
    double target_rel_tol = 1e-8;
};

// E_beta(z) for 0 < beta <= 1 and z <= 0 (the completely monotone branch).
// Power series while it is numerically safe, otherwise the spectral
// integral representation.
double mittag_leffler(double beta, double z);

// Laplace exponent continued to complex lambda off the negative real axis
// (closed forms; quadrature for the truncated family).
std::complex<double> laplace_exponent_complex(const LevySpec& spec,
                                              std::complex<double> lambda);

// Laplace transform in t of the eigenmode solution u with u(0) = 1:
// U(lambda) = phi(lambda) / (lambda (phi(lambda) + theta)).
double eigenmode_transform(const LevySpec& spec, double theta, double lambda);

struct EigenmodeValue {
    double value;
    double error_estimate;  // |talbot - abate-whitt|
    bool clamped = false;   // value nudged back into [0,1]
};

// Inverts the eigenmode transform at t with two structurally different
// methods (Talbot contour and the Abate-Whitt Euler series); their
// disagreement is the error certificate. Throws InversionError when the
// methods disagree beyond 10x the target tolerance.
EigenmodeValue eigenmode_solution(const LevySpec& spec, double theta, double t,
                                  const InversionConfig& cfg = {});

// One term of a symmetric eigen-expansion of the base kernel:
// coeff = phi_k(x) * phi_k(y).
struct KernelMode {
    double theta;
    double coeff;
};

// q(t,x,y) = sum_k u_theta_k(t) phi_k(x) phi_k(y), truncated when the
// remaining-term bound drops below 1e-12 of the partial sum.
double subordinated_kernel(const LevySpec& spec, std::vector<KernelMode> modes,
                           double t, const InversionConfig& cfg = {});

}  // namespace fractime
