#include "fractime/mc.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace fractime {

namespace {

constexpr std::uint64_t kStreamBlock = 1ull << 32;
constexpr long kSegmentBudget = 50'000'000L;

struct Accumulator {
    double sum = 0.0;
    double sumsq = 0.0;
    long n = 0;

    void add(double x) {
        sum += x;
        sumsq += x * x;
        ++n;
    }

    MCEstimate finalize(std::uint64_t seed, std::uint64_t stream_begin) const {
        MCEstimate e;
        e.n_samples = n;
        e.seed = seed;
        e.stream_begin = stream_begin;
        e.stream_end = stream_begin + static_cast<std::uint64_t>(n);
        e.value = sum / n;
        if (n > 1) {
            const double var =
                std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
            e.std_error = std::sqrt(var / n);
        } else {
            e.std_error = std::numeric_limits<double>::quiet_NaN();
        }
        return e;
    }

    double variance() const {
        if (n < 2) return 0.0;
        return std::max(0.0, (sumsq - sum * sum / n) / (n - 1));
    }
};

// Draws E_t: exact transformation for driftless stable specs, lazy
// first-passage walk otherwise.
class InverseDraw {
public:
    explicit InverseDraw(const LevySpec& spec) : spec_(spec) {
        if (spec.kappa == 0.0) {
            if (const auto* st = std::get_if<StableMeasure>(&spec.measure)) {
                beta_ = st->beta;
                return;
            }
        }
        cutoff_ = default_cutoff(spec);
    }

    double operator()(double t, RandomStream& rng) const {
        if (cutoff_) return inverse_at(spec_, t, *cutoff_, rng);
        return inverse_stable_exact(beta_, t, rng);
    }

private:
    const LevySpec& spec_;
    double beta_ = 0.0;
    std::optional<Cutoff> cutoff_;
};

// (e^{sL} f)(x) as a function of s, with the eigen-expansion precomputed
// when the model carries one.
class PointEvaluator {
public:
    PointEvaluator(const GeneratorModel& model, const Vector& f, int x_idx)
        : model_(model), f_(f), x_(x_idx) {
        if (model.eigen) {
            const Matrix& v = model.eigen->vectors;
            coef_.assign(model.dim, 0.0);
            row_.assign(model.dim, 0.0);
            for (int k = 0; k < model.dim; ++k) {
                for (int j = 0; j < model.dim; ++j) coef_[k] += v(j, k) * f[j];
                row_[k] = v(x_idx, k);
            }
        }
    }

    double at(double s) const {
        if (!coef_.empty()) {
            double out = 0.0;
            for (int k = 0; k < model_.dim; ++k)
                out += row_[k] * std::exp(s * model_.eigen->values[k]) * coef_[k];
            return out;
        }
        return semigroup_apply(model_, s, f_)[x_];
    }

private:
    const GeneratorModel& model_;
    Vector f_;
    int x_;
    Vector coef_, row_;
};

struct PathIntegrals {
    double w_integral = 0.0;  // int w(t - S_r) dr up to first passage
    double g_integral = 0.0;  // same with G in place of w
};

// Exact per-path evaluation of the kernel time integrals: on each linear
// stretch the r-integral of w(t - S_r) is a G-difference (and of G an
// H-difference), and the indicator 1{S_r <= t} dies permanently at the
// first passage over t, so the walk ends there. An optional horizon clips
// the integration window.
PathIntegrals path_kernel_integrals(const LevySpec& spec, const Cutoff& cutoff,
                                    double t, double horizon, bool want_g,
                                    RandomStream& rng) {
    PathWalker walker(spec, cutoff, rng);
    const double d = walker.drift();
    PathIntegrals out;
    for (long i = 0; i < kSegmentBudget; ++i) {
        const auto seg = walker.next();
        const double s_end = std::min(seg.s_end, horizon);
        const double v0 = seg.value_begin;
        if (v0 >= t) break;
        const double v1 = v0 + d * (s_end - seg.s_begin);
        const double v_top = std::min(v1, t);
        out.w_integral +=
            (integrated_tail_G(spec, t - v0) - integrated_tail_G(spec, t - v_top)) / d;
        if (want_g)
            out.g_integral +=
                (integrated_tail_H(spec, t - v0) - integrated_tail_H(spec, t - v_top)) / d;
        if (v1 >= t) break;                 // crossed inside the stretch
        if (seg.s_end > horizon) break;     // window exhausted first
        if (v1 + seg.jump >= t) break;      // crossed at the jump
    }
    return out;
}

double three_se_band(const MCEstimate& e) {
    return std::isnan(e.std_error) ? 0.0 : 3.0 * e.std_error;
}

}  // namespace

MCEstimate estimate_u(const GeneratorModel& model, const LevySpec& spec,
                      const Vector& f0, double t, int x_idx, long n_samples,
                      std::uint64_t seed, std::uint64_t stream_begin) {
    spec.validate();
    model.validate();
    if (static_cast<int>(f0.size()) != model.dim)
        throw std::invalid_argument("estimate_u: initial vector size mismatch");
    if (x_idx < 0 || x_idx >= model.dim)
        throw std::invalid_argument("estimate_u: state index out of range");
    if (!(t > 0.0)) throw std::invalid_argument("estimate_u: t must be positive");
    if (n_samples < 1)
        throw std::invalid_argument("estimate_u: need at least one sample");

    // The semigroup preserves constants when nothing is killed, so a
    // constant start is reproduced exactly, with zero variance.
    bool constant_conservative = true;
    for (int i = 0; i < model.dim && constant_conservative; ++i)
        constant_conservative = model.killing_rate(i) == 0.0 && f0[i] == f0[0];
    if (constant_conservative) {
        MCEstimate e;
        e.value = f0[0];
        e.std_error = n_samples > 1 ? 0.0 : std::numeric_limits<double>::quiet_NaN();
        e.n_samples = n_samples;
        e.seed = seed;
        e.stream_begin = stream_begin;
        e.stream_end = stream_begin + static_cast<std::uint64_t>(n_samples);
        return e;
    }

    const InverseDraw draw(spec);
    const PointEvaluator eval(model, f0, x_idx);
    Accumulator acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, stream_begin + static_cast<std::uint64_t>(i));
        acc.add(eval.at(draw(t, rng)));
    }
    return acc.finalize(seed, stream_begin);
}

PassageIdentityReport verify_passage_identity(const LevySpec& spec, double s,
                                              double t, long n_samples,
                                              std::uint64_t seed) {
    spec.validate();
    if (spec.kappa != 0.0)
        throw std::invalid_argument(
            "verify_passage_identity: the identity concerns driftless paths");
    if (!(s > 0.0) || !(t > 0.0))
        throw std::invalid_argument("verify_passage_identity: s, t must be positive");
    if (n_samples < 2)
        throw std::invalid_argument("verify_passage_identity: need n_samples >= 2");
    const Cutoff cutoff = default_cutoff(spec);

    // Direct side: indicator of S_s >= t.
    Accumulator lhs_acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        lhs_acc.add(first_passage_value(spec, s, cutoff, rng) >= t ? 1.0 : 0.0);
    }

    // Pilot the plain quadrature estimator against the direct one; the
    // integrand blows up where S_r approaches t, so its variance can be
    // far larger and the exact per-path G form takes over.
    const long n_pilot = std::min<long>(1000, n_samples);
    constexpr int kNodes = 64;
    Accumulator pilot_acc;
    for (long i = 0; i < n_pilot; ++i) {
        RandomStream rng(seed, 3 * kStreamBlock + static_cast<std::uint64_t>(i));
        const SubPath path = sample_path(spec, s, cutoff, rng);
        double integral = 0.0;
        std::size_t jump = 0;
        double value = 0.0;
        for (int k = 0; k < kNodes; ++k) {
            const double r = (k + 0.5) * s / kNodes;
            while (jump < path.jump_times.size() && path.jump_times[jump] <= r)
                value += path.jump_sizes[jump++];
            const double v = value + path.drift * r;
            if (v < t) integral += tail_w(spec, t - v) * s / kNodes;
        }
        pilot_acc.add(integral);
    }
    const bool g_form =
        pilot_acc.variance() > 10.0 * std::max(lhs_acc.variance(), 1e-12);

    Accumulator rhs_acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, kStreamBlock + static_cast<std::uint64_t>(i));
        if (g_form) {
            rhs_acc.add(
                path_kernel_integrals(spec, cutoff, t, s, false, rng).w_integral);
        } else {
            const SubPath path = sample_path(spec, s, cutoff, rng);
            double integral = 0.0;
            std::size_t jump = 0;
            double value = 0.0;
            for (int k = 0; k < kNodes; ++k) {
                const double r = (k + 0.5) * s / kNodes;
                while (jump < path.jump_times.size() && path.jump_times[jump] <= r)
                    value += path.jump_sizes[jump++];
                const double v = value + path.drift * r;
                if (v < t) integral += tail_w(spec, t - v) * s / kNodes;
            }
            rhs_acc.add(integral);
        }
    }

    PassageIdentityReport report;
    report.lhs = lhs_acc.finalize(seed, 0);
    report.rhs = rhs_acc.finalize(seed, kStreamBlock);
    report.pooled_se = std::sqrt(report.lhs.std_error * report.lhs.std_error +
                                 report.rhs.std_error * report.rhs.std_error);
    report.g_form_used = g_form;
    report.pass =
        std::fabs(report.lhs.value - report.rhs.value) <= 3.0 * report.pooled_se;
    return report;
}

KernelIntegralReport verify_kernel_integrals(const LevySpec& spec, double t,
                                             long n_samples,
                                             std::uint64_t seed) {
    spec.validate();
    if (spec.kappa != 0.0)
        throw std::invalid_argument(
            "verify_kernel_integrals: the identities concern driftless paths");
    if (!(t > 0.0))
        throw std::invalid_argument("verify_kernel_integrals: t must be positive");
    if (n_samples < 2)
        throw std::invalid_argument("verify_kernel_integrals: need n_samples >= 2");
    const Cutoff cutoff = default_cutoff(spec);
    const double inf = std::numeric_limits<double>::infinity();

    Accumulator w_acc, g_acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        const auto ints = path_kernel_integrals(spec, cutoff, t, inf, true, rng);
        w_acc.add(ints.w_integral);
        g_acc.add(ints.g_integral);
    }

    LevySpec drifted = spec;
    drifted.kappa = 1.0;
    const Cutoff drifted_cutoff = default_cutoff(drifted);
    Accumulator d_acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, kStreamBlock + static_cast<std::uint64_t>(i));
        d_acc.add(path_kernel_integrals(drifted, drifted_cutoff, t, inf, true, rng)
                      .g_integral);
    }

    KernelIntegralReport report;
    report.t = t;
    report.w_integral = w_acc.finalize(seed, 0);
    report.g_integral = g_acc.finalize(seed, 0);
    report.drifted_g_integral = d_acc.finalize(seed, kStreamBlock);
    report.pass =
        std::fabs(report.w_integral.value - 1.0) <= three_se_band(report.w_integral) &&
        std::fabs(report.g_integral.value - t) <= three_se_band(report.g_integral) &&
        report.drifted_g_integral.value <= t + three_se_band(report.drifted_g_integral);
    return report;
}

OccupationReport occupation_relation(const GeneratorModel& model,
                                     const LevySpec& spec, int start,
                                     long n_samples, std::uint64_t seed) {
    spec.validate();
    model.validate();
    if (start < 0 || start >= model.dim)
        throw std::invalid_argument("occupation_relation: start out of range");
    if (n_samples < 2)
        throw std::invalid_argument("occupation_relation: need n_samples >= 2");
    const MeanRate rate = mean_rate(spec);
    if (!rate.finite)
        throw InfiniteMeanError(
            "occupation_relation: infinite mean rate, the time-changed "
            "occupation measure diverges; use a spec with a finite mean");
    const Cutoff cutoff = default_cutoff(spec);

    std::vector<Accumulator> per_state(model.dim);
    Accumulator exit_acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        const ExitSample base = simulate_ctmc(model, start, rng);
        double total = 0.0;
        for (int j = 0; j < model.dim; ++j) {
            double changed = 0.0;
            if (base.sojourn[j] > 0.0)
                changed = first_passage_value(spec, base.sojourn[j], cutoff, rng);
            per_state[j].add(changed);
            total += changed;
        }
        exit_acc.add(total);
    }

    OccupationReport report;
    report.occupation.reserve(model.dim);
    for (int j = 0; j < model.dim; ++j)
        report.occupation.push_back(per_state[j].finalize(seed, 0));
    report.exit_time = exit_acc.finalize(seed, 0);

    const Vector nu = occupation_vector(model, start);
    report.reference_occupation.resize(model.dim);
    for (int j = 0; j < model.dim; ++j)
        report.reference_occupation[j] = rate.value * nu[j];
    report.reference_exit_time = rate.value * mean_exit_solve(model)[start];

    report.pass = std::fabs(report.exit_time.value - report.reference_exit_time) <=
                  three_se_band(report.exit_time);
    for (int j = 0; j < model.dim && report.pass; ++j)
        report.pass = std::fabs(report.occupation[j].value -
                                report.reference_occupation[j]) <=
                      three_se_band(report.occupation[j]);
    return report;
}

MCEstimate kernel_estimate(const GeneratorModel& model, const LevySpec& spec,
                           double t, int x_idx, int y_idx, long n_samples,
                           std::uint64_t seed) {
    spec.validate();
    model.validate();
    if (!model.eigen)
        throw std::invalid_argument("kernel_estimate: eigen-expansion required");
    if (x_idx < 0 || x_idx >= model.dim || y_idx < 0 || y_idx >= model.dim)
        throw std::invalid_argument("kernel_estimate: state index out of range");
    if (!(t > 0.0)) throw std::invalid_argument("kernel_estimate: t must be positive");
    if (n_samples < 1)
        throw std::invalid_argument("kernel_estimate: need at least one sample");
    const InverseDraw draw(spec);
    const Matrix& v = model.eigen->vectors;
    Accumulator acc;
    for (long i = 0; i < n_samples; ++i) {
        RandomStream rng(seed, static_cast<std::uint64_t>(i));
        const double s = draw(t, rng);
        double p = 0.0;
        // The eigenvector product is grouped first so swapping x and y
        // reproduces the identical floating-point value.
        for (int k = 0; k < model.dim; ++k)
            p += std::exp(s * model.eigen->values[k]) *
                 (v(x_idx, k) * v(y_idx, k));
        acc.add(p);
    }
    return acc.finalize(seed, 0);
}

nlohmann::json report_line(const std::string& quantity,
                           const MCEstimate& estimate, double reference,
                           const std::string& reference_provenance, bool pass) {
    return {{"quantity", quantity},
            {"estimate", estimate.value},
            {"std_error", estimate.std_error},
            {"n_samples", estimate.n_samples},
            {"reference", reference},
            {"reference_provenance", reference_provenance},
            {"pass", pass}};
}

nlohmann::json to_report(const PassageIdentityReport& r) {
    return {{"pass", r.pass},
            {"pooled_std_error", r.pooled_se},
            {"g_form_used", r.g_form_used},
            {"lines",
             {report_line("first_passage_probability", r.lhs, r.rhs.value,
                          "independent path-integral estimator", r.pass),
              report_line("kernel_time_integral", r.rhs, r.lhs.value,
                          "direct first-passage estimator", r.pass)}}};
}

nlohmann::json to_report(const KernelIntegralReport& r) {
    const bool pass_w = std::fabs(r.w_integral.value - 1.0) <= three_se_band(r.w_integral);
    const bool pass_g = std::fabs(r.g_integral.value - r.t) <= three_se_band(r.g_integral);
    const bool pass_d =
        r.drifted_g_integral.value <= r.t + three_se_band(r.drifted_g_integral);
    return {{"pass", r.pass},
            {"t", r.t},
            {"lines",
             {report_line("w_integral", r.w_integral, 1.0, "exact identity", pass_w),
              report_line("g_integral", r.g_integral, r.t, "exact identity", pass_g),
              report_line("drifted_g_integral", r.drifted_g_integral, r.t,
                          "exact upper bound", pass_d)}}};
}

nlohmann::json to_report(const OccupationReport& r) {
    nlohmann::json lines = nlohmann::json::array();
    for (std::size_t j = 0; j < r.occupation.size(); ++j) {
        const bool pass = std::fabs(r.occupation[j].value -
                                    r.reference_occupation[j]) <=
                          three_se_band(r.occupation[j]);
        lines.push_back(report_line("occupation_state_" + std::to_string(j),
                                    r.occupation[j], r.reference_occupation[j],
                                    "mean rate times linear solve", pass));
    }
    lines.push_back(report_line(
        "exit_time", r.exit_time, r.reference_exit_time,
        "mean rate times linear solve",
        std::fabs(r.exit_time.value - r.reference_exit_time) <=
            three_se_band(r.exit_time)));
    return {{"pass", r.pass}, {"lines", lines}};
}

}  // namespace fractime
