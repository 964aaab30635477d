#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace fractime {

// Parametric Levy measures of a subordinator. All four families have a
// density that is nonintegrable at 0 (infinite total mass) and satisfy
// int (1 ^ x) mu(dx) < infinity.
struct StableMeasure {
    double beta;  // in (0,1)
};

struct TruncatedStableMeasure {
    double beta;         // in (0,1)
    double delta;        // truncation level, > 0
    double scale = 1.0;  // overall mass multiplier, > 0
};

struct TemperedStableMeasure {
    double beta;  // in (0,1)
    double m;     // tempering rate, > 0
};

struct MixtureComponent {
    double weight;  // > 0
    double beta;    // in (0,1)
};

struct MixtureMeasure {
    std::vector<MixtureComponent> components;
};

using LevyMeasure = std::variant<StableMeasure, TruncatedStableMeasure,
                                 TemperedStableMeasure, MixtureMeasure>;

struct LevySpec {
    double kappa = 0.0;  // drift, >= 0
    LevyMeasure measure;

    // Throws std::invalid_argument on any parameter outside its range.
    void validate() const;
};

// Extended nonnegative real: the subordinator's mean rate phi'(0) = E[S_1]
// may be +infinity (stable case). Tagged so callers can refuse explicitly.
struct MeanRate {
    bool finite = true;
    double value = 0.0;  // meaningful only when finite

    static MeanRate infinite() { return {false, 0.0}; }
};

// Tail function w(x) = mu(x, infinity), x > 0.
double tail_w(const LevySpec& spec, double x);

// Integrated tail G(x) = int_0^x w, x >= 0. Closed form for all families
// (incomplete gamma functions for the tempered one).
double integrated_tail_G(const LevySpec& spec, double x);

// Second antiderivative H(x) = int_0^x G = int_0^x (x-u) w(u) du.
double integrated_tail_H(const LevySpec& spec, double x);

// Levy density of mu at x > 0 (all four families are absolutely continuous).
double levy_density(const LevySpec& spec, double x);

// Driftless Laplace exponent phi_0(lambda) = int (1 - e^{-lambda x}) mu(dx).
double laplace_exponent_phi0(const LevySpec& spec, double lambda);

// Full Laplace exponent phi(lambda) = kappa*lambda + phi_0(lambda).
double laplace_exponent(const LevySpec& spec, double lambda);

// phi'(0) = kappa + int_0^inf x mu(dx), possibly infinite.
MeanRate mean_rate(const LevySpec& spec);

// Relative error of the kernel Laplace identity
// int_0^inf e^{-lambda x} w(x) dx = phi_0(lambda) / lambda,
// with the left side by independent adaptive quadrature.
double check_laplace_identity(const LevySpec& spec, double lambda);

// True iff G(a) agrees with an independent quadrature of
// int (xi ^ a) mu(dxi) to the given relative tolerance.
bool check_G_bound(const LevySpec& spec, double a, double rel_tol = 1e-8);

// Serialization: {"kappa": 0.0, "measure": {"type": "stable", "beta": 0.5}}.
// Parsing is strict: unknown keys are rejected.
void to_json(nlohmann::json& j, const LevySpec& spec);
void from_json(const nlohmann::json& j, LevySpec& spec);

}  // namespace fractime
