#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "fractime/levy_kernel.hpp"
#include "fractime/markov.hpp"
#include "fractime/solver.hpp"
#include "fractime/subordinator.hpp"

namespace fractime {

// Raised when an estimator needs E[S_1] and the spec's mean rate diverges.
struct InfiniteMeanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;  // NaN when n_samples == 1
    long n_samples = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream_begin = 0;  // sample i used stream_begin + i
    std::uint64_t stream_end = 0;    // one past the last stream id
};

// u(t, x) = E[(e^{E_t L} f0)(x)] by Monte Carlo over the inverse
// subordinator E_t. Exact inverse draws for driftless stable specs, lazy
// first-passage sampling otherwise. Constant f0 under a conservative L is
// returned exactly (the semigroup preserves constants).
MCEstimate estimate_u(const GeneratorModel& model, const LevySpec& spec,
                      const Vector& f0, double t, int x_idx, long n_samples,
                      std::uint64_t seed, std::uint64_t stream_begin = 0);

// Two independent estimators of one first-passage probability, for a
// driftless spec: P(S_s >= t) directly, and the equivalent time integral
// int_0^s E[w(t - S_r); S_r <= t] dr. The integral is evaluated either by
// a fixed quadrature over common paths (plain form) or exactly per path
// through the antiderivative G (chosen by a pilot variance comparison).
struct PassageIdentityReport {
    MCEstimate lhs;  // P(S_s >= t)
    MCEstimate rhs;  // the time integral
    double pooled_se = 0.0;
    bool g_form_used = false;
    bool pass = false;
};

PassageIdentityReport verify_passage_identity(const LevySpec& spec, double s,
                                              double t, long n_samples,
                                              std::uint64_t seed);

// Exact integral identities of the kernel along a driftless path:
//   (i)  int_0^inf E[w(t - S_r); S_r <= t] dr = 1,
//   (ii) int_0^inf E[G(t - S_r); S_r <= t] dr = t,
//   (iii) with unit drift added, the G-integral is <= t.
// Each integral is computed exactly per path up to the first passage over
// t (the indicator vanishes permanently there).
struct KernelIntegralReport {
    double t = 0.0;
    MCEstimate w_integral;          // (i), reference 1
    MCEstimate g_integral;          // (ii), reference t
    MCEstimate drifted_g_integral;  // (iii), bounded by t
    bool pass = false;
};

KernelIntegralReport verify_kernel_integrals(const LevySpec& spec, double t,
                                             long n_samples,
                                             std::uint64_t seed);

// Occupation and exit-time comparison for the time-changed chain: expected
// time-changed sojourn per state versus phi'(0) times the base chain's
// expected sojourn, and E[S_{tau}] versus phi'(0) E[tau]. Refuses specs
// with infinite mean rate.
struct OccupationReport {
    std::vector<MCEstimate> occupation;  // per state
    Vector reference_occupation;         // phi'(0) * linear-solve values
    MCEstimate exit_time;
    double reference_exit_time = 0.0;
    bool pass = false;
};

OccupationReport occupation_relation(const GeneratorModel& model,
                                     const LevySpec& spec, int start,
                                     long n_samples, std::uint64_t seed);

// Time-changed kernel entry q(t,x,y) = E[p(E_t,x,y)] through the model's
// eigen-expansion; x and y enter symmetrically, so swapping them with the
// same seed reproduces the identical estimate.
MCEstimate kernel_estimate(const GeneratorModel& model, const LevySpec& spec,
                           double t, int x_idx, int y_idx, long n_samples,
                           std::uint64_t seed);

// One line of a verifier report.
nlohmann::json report_line(const std::string& quantity,
                           const MCEstimate& estimate, double reference,
                           const std::string& reference_provenance, bool pass);

nlohmann::json to_report(const PassageIdentityReport& r);
nlohmann::json to_report(const KernelIntegralReport& r);
nlohmann::json to_report(const OccupationReport& r);

}  // namespace fractime
