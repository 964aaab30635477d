#include "fractime/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fractime {

namespace {

constexpr long kMaxSegments = 200'000'000L;

double compensation_at(const LevySpec& spec, double eps) {
    // int_0^eps x mu(dx) = G(eps) - eps * w(eps)  (integration by parts)
    return integrated_tail_G(spec, eps) - eps * tail_w(spec, eps);
}

}  // namespace

Cutoff cutoff_at(const LevySpec& spec, double eps) {
    if (!(eps > 0.0))
        throw std::invalid_argument("cutoff_at: eps must be positive");
    const double rate = tail_w(spec, eps);
    if (!std::isfinite(rate) || rate <= 0.0)
        throw std::invalid_argument("cutoff_at: mu(eps, infinity) not usable");
    return {eps, rate, compensation_at(spec, eps)};
}

Cutoff default_cutoff(const LevySpec& spec, double comp_frac, double max_rate) {
    const double bound = comp_frac * integrated_tail_G(spec, 1.0);
    double eps = 1.0;
    if (const auto* tr = std::get_if<TruncatedStableMeasure>(&spec.measure))
        eps = std::min(eps, 0.5 * tr->delta);
    for (int i = 0; i < 200 && compensation_at(spec, eps) > bound; ++i)
        eps *= 0.5;
    const double rate = tail_w(spec, eps);
    if (rate > max_rate)
        throw std::invalid_argument(
            "default_cutoff: jump intensity cap and compensation bound are "
            "incompatible for this spec");
    return {eps, rate, compensation_at(spec, eps)};
}

double SubPath::evaluate(double s) const {
    double v = drift * s;
    for (std::size_t i = 0; i < jump_times.size() && jump_times[i] <= s; ++i)
        v += jump_sizes[i];
    return v;
}

double sample_stable_increment(double beta, double t, RandomStream& rng) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("sample_stable_increment: beta must be in (0,1)");
    if (!(t > 0.0))
        throw std::invalid_argument("sample_stable_increment: t must be positive");
    // Kanter's method: S = (a(U)/W)^{(1-beta)/beta} has Laplace transform
    // e^{-lambda^beta}.
    const double u = std::numbers::pi * rng.uniform();
    const double w = rng.exponential();
    const double a = std::sin((1.0 - beta) * u) *
                     std::pow(std::sin(beta * u), beta / (1.0 - beta)) /
                     std::pow(std::sin(u), 1.0 / (1.0 - beta));
    return std::pow(t, 1.0 / beta) * std::pow(a / w, (1.0 - beta) / beta);
}

double sample_jump_size(const LevySpec& spec, double eps, RandomStream& rng) {
    if (!(eps > 0.0))
        throw std::invalid_argument("sample_jump_size: eps must be positive");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return eps * std::pow(rng.uniform(), -1.0 / m.beta);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                if (eps >= m.delta)
                    throw std::invalid_argument(
                        "sample_jump_size: eps beyond the truncation level");
                const double lo = std::pow(m.delta, -m.beta);
                const double hi = std::pow(eps, -m.beta);
                return std::pow(lo + rng.uniform() * (hi - lo), -1.0 / m.beta);
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                // Thin the stable proposal by the tempering factor.
                for (int i = 0; i < 100000; ++i) {
                    const double y = eps * std::pow(rng.uniform(), -1.0 / m.beta);
                    if (rng.uniform() <= std::exp(-m.m * (y - eps))) return y;
                }
                throw PathBudgetError("sample_jump_size: tempering rejection budget exceeded");
            } else {
                // Pick a component proportional to its tail mass above eps,
                // then invert that component's tail.
                double total = 0.0;
                for (const auto& c : m.components)
                    total += c.weight * std::pow(eps, -c.beta) /
                             std::tgamma(1.0 - c.beta);
                double pick = rng.uniform() * total;
                for (const auto& c : m.components) {
                    const double mass = c.weight * std::pow(eps, -c.beta) /
                                        std::tgamma(1.0 - c.beta);
                    if (pick <= mass || &c == &m.components.back())
                        return eps * std::pow(rng.uniform(), -1.0 / c.beta);
                    pick -= mass;
                }
                return eps;  // unreachable
            }
        },
        spec.measure);
}

SubPath sample_path(const LevySpec& spec, double horizon, const Cutoff& cutoff,
                    RandomStream& rng) {
    if (!(horizon > 0.0))
        throw std::invalid_argument("sample_path: horizon must be positive");
    SubPath path;
    path.horizon = horizon;
    path.cutoff_eps = cutoff.eps;
    path.drift = spec.kappa + cutoff.compensation;
    double s = 0.0;
    while (true) {
        s += rng.exponential(cutoff.rate);
        if (s > horizon) break;
        path.jump_times.push_back(s);
        path.jump_sizes.push_back(sample_jump_size(spec, cutoff.eps, rng));
    }
    return path;
}

SubPath sample_path(const LevySpec& spec, double horizon, double eps,
                    RandomStream& rng) {
    return sample_path(spec, horizon, cutoff_at(spec, eps), rng);
}

PathWalker::PathWalker(const LevySpec& spec, const Cutoff& cutoff,
                       RandomStream& rng)
    : spec_(spec), eps_(cutoff.eps), rate_(cutoff.rate),
      drift_(spec.kappa + cutoff.compensation), rng_(rng) {}

PathWalker::Segment PathWalker::next() {
    Segment seg;
    seg.s_begin = s_;
    seg.value_begin = value_;
    s_ += rng_.exponential(rate_);
    seg.s_end = s_;
    seg.jump = sample_jump_size(spec_, eps_, rng_);
    value_ += drift_ * (seg.s_end - seg.s_begin) + seg.jump;
    return seg;
}

double inverse_at(const LevySpec& spec, double t, const Cutoff& cutoff,
                  RandomStream& rng) {
    if (!(t > 0.0))
        throw std::invalid_argument("inverse_at: t must be positive");
    PathWalker walker(spec, cutoff, rng);
    const double drift = walker.drift();
    for (long i = 0; i < kMaxSegments; ++i) {
        const auto seg = walker.next();
        // Crossing inside the drift stretch is solved exactly (linear).
        if (drift > 0.0) {
            const double s_cross = seg.s_begin + (t - seg.value_begin) / drift;
            if (s_cross <= seg.s_end) return s_cross;
        }
        const double before_jump =
            seg.value_begin + drift * (seg.s_end - seg.s_begin);
        if (before_jump + seg.jump > t) return seg.s_end;
    }
    throw PathBudgetError("inverse_at: path-extension budget exceeded");
}

double inverse_at(const LevySpec& spec, double t, double eps,
                  RandomStream& rng) {
    return inverse_at(spec, t, cutoff_at(spec, eps), rng);
}

double inverse_stable_exact(double beta, double t, RandomStream& rng) {
    if (!(t > 0.0))
        throw std::invalid_argument("inverse_stable_exact: t must be positive");
    // P(E_t <= s) = P(S_s >= t) = P(s^{1/beta} S_1 >= t)
    return std::pow(t / sample_stable_increment(beta, 1.0, rng), beta);
}

double first_passage_value(const LevySpec& spec, double tau,
                           const Cutoff& cutoff, RandomStream& rng) {
    if (!(tau > 0.0))
        throw std::invalid_argument("first_passage_value: tau must be positive");
    double value = (spec.kappa + cutoff.compensation) * tau;
    double s = 0.0;
    for (long i = 0; i < kMaxSegments; ++i) {
        s += rng.exponential(cutoff.rate);
        if (s > tau) return value;
        value += sample_jump_size(spec, cutoff.eps, rng);
    }
    throw PathBudgetError("first_passage_value: path-extension budget exceeded");
}

double first_passage_value(const LevySpec& spec, double tau, double eps,
                           RandomStream& rng) {
    return first_passage_value(spec, tau, cutoff_at(spec, eps), rng);
}

}  // namespace fractime
