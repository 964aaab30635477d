#pragma once

#include <stdexcept>
#include <vector>

#include "fractime/levy_kernel.hpp"
#include "fractime/random_stream.hpp"

namespace fractime {

struct PathBudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Small-jump truncation for a spec: jumps below eps are folded into extra
// drift equal to their mean intensity. Precomputed once and reused across
// samples (the compensation integral can be expensive).
struct Cutoff {
    double eps;           // truncation level
    double rate;          // mu(eps, infinity), jump intensity above eps
    double compensation;  // int_0^eps x mu(dx), added to the drift
};

// Cutoff at a caller-chosen eps.
Cutoff cutoff_at(const LevySpec& spec, double eps);

// Picks eps so the compensation bias is at most comp_frac * G(1), subject
// to the jump intensity staying below max_rate.
Cutoff default_cutoff(const LevySpec& spec, double comp_frac = 1e-3,
                      double max_rate = 1e6);

// A sampled subordinator trajectory on [0, horizon] (internal time s):
// drift segment plus jumps above the truncation level.
struct SubPath {
    double horizon;
    double drift;  // kappa + small-jump compensation
    std::vector<double> jump_times;  // strictly increasing in [0, horizon]
    std::vector<double> jump_sizes;  // one per jump time, >= cutoff_eps
    double cutoff_eps;

    // S_s = drift * s + sum of jumps at times <= s; nondecreasing and
    // right continuous.
    double evaluate(double s) const;
};

// Exact draw of S_t for the driftless beta-stable subordinator
// (E e^{-lambda S_t} = e^{-t lambda^beta}), by Kanter's two-uniform
// construction scaled by t^{1/beta}.
double sample_stable_increment(double beta, double t, RandomStream& rng);

// One jump size from the normalized restriction of mu to (eps, infinity).
// Closed-form tail inversion for stable/truncated/mixture; exponential
// thinning of the stable proposal for tempered.
double sample_jump_size(const LevySpec& spec, double eps, RandomStream& rng);

// Jump-decomposition path sampler: jumps above eps arrive as a Poisson
// process with rate mu(eps, infinity); smaller jumps become drift.
SubPath sample_path(const LevySpec& spec, double horizon, const Cutoff& cutoff,
                    RandomStream& rng);
SubPath sample_path(const LevySpec& spec, double horizon, double eps,
                    RandomStream& rng);

// Lazy segment-by-segment walk along a fresh trajectory. Each segment is a
// linear drift stretch ending in a jump.
class PathWalker {
public:
    struct Segment {
        double s_begin, s_end;  // internal time span
        double value_begin;     // S at s_begin
        double jump;            // jump size applied at s_end
    };

    PathWalker(const LevySpec& spec, const Cutoff& cutoff, RandomStream& rng);

    Segment next();

    double drift() const { return drift_; }

private:
    const LevySpec& spec_;
    double eps_;
    double rate_;
    double drift_;
    RandomStream& rng_;
    double s_ = 0.0;
    double value_ = 0.0;
};

// Generic inverse-subordinator draw E_t = inf{s > 0 : S_s > t} by lazy
// first passage over a fresh path.
double inverse_at(const LevySpec& spec, double t, const Cutoff& cutoff,
                  RandomStream& rng);
double inverse_at(const LevySpec& spec, double t, double eps,
                  RandomStream& rng);

// Exact inverse-stable draw: E_t has the law of (t / S_1)^beta.
double inverse_stable_exact(double beta, double t, RandomStream& rng);

// Realizes S_tau on a fresh path for an externally supplied tau (e.g. a
// Markov exit time); equivalently a fresh increment over a window of
// length tau.
double first_passage_value(const LevySpec& spec, double tau,
                           const Cutoff& cutoff, RandomStream& rng);
double first_passage_value(const LevySpec& spec, double tau, double eps,
                           RandomStream& rng);

}  // namespace fractime
