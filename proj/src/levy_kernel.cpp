#include "fractime/levy_kernel.hpp"

#include <algorithm>
#include <cmath>

#include "fractime/quadrature.hpp"
#include "fractime/special.hpp"

namespace fractime {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0))
        throw std::invalid_argument("LevySpec: beta must lie in (0,1)");
}

void check_positive_arg(double x, const char* what) {
    if (!std::isfinite(x) || x <= 0.0)
        throw std::invalid_argument(std::string("LevySpec: ") + what +
                                    " must be positive and finite");
}

// w(x) = x^{-beta} / Gamma(1-beta) for the unit stable family.
double stable_tail(double beta, double x) {
    return std::pow(x, -beta) / std::tgamma(1.0 - beta);
}

double stable_G(double beta, double x) {
    return std::pow(x, 1.0 - beta) / std::tgamma(2.0 - beta);
}

}  // namespace

void LevySpec::validate() const {
    if (!std::isfinite(kappa) || kappa < 0.0)
        throw std::invalid_argument("LevySpec: kappa must be nonnegative and finite");
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                check_beta(m.beta);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                check_beta(m.beta);
                check_positive_arg(m.delta, "delta");
                check_positive_arg(m.scale, "scale");
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                check_beta(m.beta);
                check_positive_arg(m.m, "m");
            } else {
                if (m.components.empty())
                    throw std::invalid_argument("LevySpec: mixture needs at least one component");
                for (const auto& c : m.components) {
                    check_beta(c.beta);
                    check_positive_arg(c.weight, "mixture weight");
                }
            }
        },
        measure);
}

double tail_w(const LevySpec& spec, double x) {
    check_positive_arg(x, "x");
    return std::visit(
        [x](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return stable_tail(m.beta, x);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                if (x >= m.delta) return 0.0;
                return m.scale *
                       (std::pow(x, -m.beta) - std::pow(m.delta, -m.beta)) /
                       std::tgamma(1.0 - m.beta);
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                // int_x^inf (beta/Gamma(1-beta)) e^{-m y} y^{-1-beta} dy
                //   = (beta/Gamma(1-beta)) m^beta Gamma(-beta, m x)
                return m.beta / std::tgamma(1.0 - m.beta) *
                       std::pow(m.m, m.beta) *
                       upper_incomplete_gamma(-m.beta, m.m * x);
            } else {
                double s = 0.0;
                for (const auto& c : m.components)
                    s += c.weight * stable_tail(c.beta, x);
                return s;
            }
        },
        spec.measure);
}

double integrated_tail_G(const LevySpec& spec, double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("integrated_tail_G: x must be nonnegative");
    if (x == 0.0) return 0.0;
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return stable_G(m.beta, x);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                const double y = std::min(x, m.delta);
                return m.scale * (stable_G(m.beta, y) -
                                  std::pow(m.delta, -m.beta) * y /
                                      std::tgamma(1.0 - m.beta));
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                // Integration by parts: G(x) = x w(x) + int_0^x u mu(du)
                //   = x w(x) + beta m^{beta-1} P(1-beta, m x).
                return x * tail_w(spec, x) +
                       m.beta * std::pow(m.m, m.beta - 1.0) *
                           regularized_gamma_p(1.0 - m.beta, m.m * x);
            } else {
                double s = 0.0;
                for (const auto& c : m.components)
                    s += c.weight * stable_G(c.beta, x);
                return s;
            }
        },
        spec.measure);
}

double integrated_tail_H(const LevySpec& spec, double x) {
    if (!std::isfinite(x) || x < 0.0)
        throw std::invalid_argument("integrated_tail_H: x must be nonnegative");
    if (x == 0.0) return 0.0;
    const auto stable_H = [](double beta, double y) {
        return std::pow(y, 2.0 - beta) / std::tgamma(3.0 - beta);
    };
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return stable_H(m.beta, x);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                const double y = std::min(x, m.delta);
                double h = m.scale * (stable_H(m.beta, y) -
                                      std::pow(m.delta, -m.beta) * y * y /
                                          (2.0 * std::tgamma(1.0 - m.beta)));
                if (x > m.delta)
                    h += integrated_tail_G(spec, m.delta) * (x - m.delta);
                return h;
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                // H(x) = x G(x) - int_0^x u w(u) du, with the second term
                // again integrated by parts against the density.
                return x * integrated_tail_G(spec, x) -
                       (0.5 * x * x * tail_w(spec, x) +
                        0.5 * m.beta * (1.0 - m.beta) *
                            std::pow(m.m, m.beta - 2.0) *
                            regularized_gamma_p(2.0 - m.beta, m.m * x));
            } else {
                double s = 0.0;
                for (const auto& c : m.components)
                    s += c.weight * stable_H(c.beta, x);
                return s;
            }
        },
        spec.measure);
}

double levy_density(const LevySpec& spec, double x) {
    check_positive_arg(x, "x");
    return std::visit(
        [x](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return m.beta / std::tgamma(1.0 - m.beta) *
                       std::pow(x, -1.0 - m.beta);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                if (x > m.delta) return 0.0;
                return m.scale * m.beta / std::tgamma(1.0 - m.beta) *
                       std::pow(x, -1.0 - m.beta);
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                return m.beta / std::tgamma(1.0 - m.beta) *
                       std::exp(-m.m * x) * std::pow(x, -1.0 - m.beta);
            } else {
                double s = 0.0;
                for (const auto& c : m.components)
                    s += c.weight * c.beta / std::tgamma(1.0 - c.beta) *
                         std::pow(x, -1.0 - c.beta);
                return s;
            }
        },
        spec.measure);
}

double laplace_exponent_phi0(const LevySpec& spec, double lambda) {
    check_positive_arg(lambda, "lambda");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return std::pow(lambda, m.beta);
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                // No closed form: quadrature of int_0^delta (1-e^{-lx}) mu(dx).
                // Integrand ~ l * x^{-beta} near 0, integrable.
                return integrate(
                           [&](double x) {
                               return -std::expm1(-lambda * x) *
                                      levy_density(spec, x);
                           },
                           0.0, m.delta, 1e-14, 1e-10)
                    .value;
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                return std::pow(lambda + m.m, m.beta) - std::pow(m.m, m.beta);
            } else {
                double s = 0.0;
                for (const auto& c : m.components)
                    s += c.weight * std::pow(lambda, c.beta);
                return s;
            }
        },
        spec.measure);
}

double laplace_exponent(const LevySpec& spec, double lambda) {
    return spec.kappa * lambda + laplace_exponent_phi0(spec, lambda);
}

MeanRate mean_rate(const LevySpec& spec) {
    return std::visit(
        [&](const auto& m) -> MeanRate {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                return MeanRate::infinite();
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                return {true, spec.kappa +
                                  m.scale * m.beta *
                                      std::pow(m.delta, 1.0 - m.beta) /
                                      std::tgamma(2.0 - m.beta)};
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                return {true,
                        spec.kappa + m.beta * std::pow(m.m, m.beta - 1.0)};
            } else {
                return MeanRate::infinite();
            }
        },
        spec.measure);
}

double check_laplace_identity(const LevySpec& spec, double lambda) {
    check_positive_arg(lambda, "lambda");
    const auto integrand = [&](double x) {
        return std::exp(-lambda * x) * tail_w(spec, x);
    };
    // Split at 1: the kernel singularity sits at 0, the exponential tail
    // beyond.
    double lhs = integrate(integrand, 0.0, 1.0, 1e-13, 1e-11).value;
    lhs += integrate_to_infinity(integrand, 1.0, 1e-13, 1e-11).value;
    const double rhs = laplace_exponent_phi0(spec, lambda) / lambda;
    return std::fabs(lhs - rhs) / rhs;
}

bool check_G_bound(const LevySpec& spec, double a, double rel_tol) {
    check_positive_arg(a, "a");
    // int (xi ^ a) mu(dxi) = int_0^a xi mu(dxi) + a * w(a)
    const double head = integrate([&](double x) { return x * levy_density(spec, x); },
                                  0.0, a, 1e-14, 1e-10)
                            .value;
    const double rhs = head + a * tail_w(spec, a);
    const double lhs = integrated_tail_G(spec, a);
    return std::fabs(lhs - rhs) <= rel_tol * std::fabs(rhs);
}

namespace {

void require_keys(const nlohmann::json& j,
                  const std::vector<std::string>& required,
                  const std::vector<std::string>& optional = {}) {
    for (const auto& k : required)
        if (!j.contains(k))
            throw std::invalid_argument("LevySpec: missing key '" + k + "'");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (std::find(required.begin(), required.end(), k) == required.end() &&
            std::find(optional.begin(), optional.end(), k) == optional.end())
            throw std::invalid_argument("LevySpec: unknown key '" + k + "'");
    }
}

}  // namespace

void to_json(nlohmann::json& j, const LevySpec& spec) {
    nlohmann::json m;
    std::visit(
        [&m](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, StableMeasure>) {
                m = {{"type", "stable"}, {"beta", v.beta}};
            } else if constexpr (std::is_same_v<T, TruncatedStableMeasure>) {
                m = {{"type", "truncated_stable"},
                     {"beta", v.beta},
                     {"delta", v.delta}};
                if (v.scale != 1.0) m["scale"] = v.scale;
            } else if constexpr (std::is_same_v<T, TemperedStableMeasure>) {
                m = {{"type", "tempered_stable"}, {"beta", v.beta}, {"m", v.m}};
            } else {
                nlohmann::json comps = nlohmann::json::array();
                for (const auto& c : v.components)
                    comps.push_back({{"weight", c.weight}, {"beta", c.beta}});
                m = {{"type", "mixture"}, {"components", comps}};
            }
        },
        spec.measure);
    j = {{"kappa", spec.kappa}, {"measure", m}};
}

void from_json(const nlohmann::json& j, LevySpec& spec) {
    require_keys(j, {"kappa", "measure"});
    spec.kappa = j.at("kappa").get<double>();
    const auto& m = j.at("measure");
    const std::string type = m.at("type").get<std::string>();
    if (type == "stable") {
        require_keys(m, {"type", "beta"});
        spec.measure = StableMeasure{m.at("beta").get<double>()};
    } else if (type == "truncated_stable") {
        require_keys(m, {"type", "beta", "delta"}, {"scale"});
        TruncatedStableMeasure t{m.at("beta").get<double>(),
                                 m.at("delta").get<double>()};
        if (m.contains("scale")) t.scale = m.at("scale").get<double>();
        spec.measure = t;
    } else if (type == "tempered_stable") {
        require_keys(m, {"type", "beta", "m"});
        spec.measure = TemperedStableMeasure{m.at("beta").get<double>(),
                                             m.at("m").get<double>()};
    } else if (type == "mixture") {
        require_keys(m, {"type", "components"});
        MixtureMeasure mix;
        for (const auto& c : m.at("components")) {
            require_keys(c, {"weight", "beta"});
            mix.components.push_back(
                {c.at("weight").get<double>(), c.at("beta").get<double>()});
        }
        spec.measure = mix;
    } else {
        throw std::invalid_argument("LevySpec: unknown measure type '" + type + "'");
    }
    spec.validate();
}

}  // namespace fractime
