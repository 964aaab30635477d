#include <doctest.h>

#include <cmath>
#include <vector>

#include "fractime/oracles.hpp"

using namespace fractime;

namespace {

LevySpec stable_spec(double beta, double kappa = 0.0) {
    LevySpec spec;
    spec.kappa = kappa;
    spec.measure = StableMeasure{beta};
    return spec;
}

}  // namespace

TEST_CASE("Mittag-Leffler special values") {
    // E_1(z) = e^z.
    CHECK(mittag_leffler(1.0, -1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(mittag_leffler(1.0, -3.7) == doctest::Approx(std::exp(-3.7)).epsilon(1e-12));
    // E_beta(0) = 1 for every order.
    for (double beta : {0.1, 0.3, 0.5, 0.8, 1.0})
        CHECK(mittag_leffler(beta, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // E_{1/2}(-x) = e^{x^2} erfc(x); at x = 1 this is e * erfc(1).
    const double half_ref = 0.42758357615580703;
    CHECK(std::exp(1.0) * std::erfc(1.0) == doctest::Approx(half_ref).epsilon(1e-13));
    CHECK(mittag_leffler(0.5, -1.0) == doctest::Approx(half_ref).epsilon(1e-10));
    CHECK(mittag_leffler(0.5, -4.0) ==
          doctest::Approx(std::exp(16.0) * std::erfc(4.0)).epsilon(1e-9));
}

TEST_CASE("Mittag-Leffler is completely monotone on the negative axis") {
    for (double beta : {0.3, 0.5, 0.8}) {
        double prev = 1.0 + 1e-15;
        for (int k = 0; k <= 60; ++k) {
            const double v = mittag_leffler(beta, -0.25 * k);
            CHECK(v > 0.0);
            CHECK(v <= prev);
            prev = v;
        }
    }
}

TEST_CASE("eigenmode transform has the resolvent form") {
    const LevySpec spec{0.5, TemperedStableMeasure{0.6, 1.0}};
    const double theta = 2.0, lambda = 1.7;
    const double phi = laplace_exponent(spec, lambda);
    CHECK(eigenmode_transform(spec, theta, lambda) ==
          doctest::Approx(phi / (lambda * (phi + theta))).epsilon(1e-12));
}

TEST_CASE("inversion reproduces Mittag-Leffler for stable specs") {
    // For the driftless beta-stable exponent the eigenmode solution is
    // E_beta(-theta t^beta).
    const double theta = 1.0, t = 1.0;
    for (double beta : {0.3, 0.5, 0.8}) {
        const EigenmodeValue v = eigenmode_solution(stable_spec(beta), theta, t);
        const double exact = mittag_leffler(beta, -theta * std::pow(t, beta));
        CHECK(std::fabs(v.value - exact) <= 1e-7 * std::max(exact, 1e-3));
    }
    // A few off-unit arguments.
    for (double t2 : {0.25, 2.0}) {
        const EigenmodeValue v =
            eigenmode_solution(stable_spec(0.5), 3.0, t2);
        const double exact = mittag_leffler(0.5, -3.0 * std::sqrt(t2));
        CHECK(std::fabs(v.value - exact) <= 1e-7);
    }
}

TEST_CASE("the two inversion methods certify each other") {
    InversionConfig talbot, euler;
    talbot.method = InversionMethod::TalbotContour;
    euler.method = InversionMethod::AbateWhittSeries;
    const LevySpec spec{0.0, TemperedStableMeasure{0.5, 1.0}};
    for (double t : {0.25, 1.0, 4.0}) {
        const double a = eigenmode_solution(spec, 1.5, t, talbot).value;
        const double b = eigenmode_solution(spec, 1.5, t, euler).value;
        CHECK(std::fabs(a - b) < 1e-7);
        CHECK(a >= -1e-12);
        CHECK(a <= 1.0 + 1e-12);
    }
}

TEST_CASE("pure drift reduces to the classical semigroup") {
    // kappa dt u = -theta u with a vanishingly small jump part.
    LevySpec spec;
    spec.kappa = 1.0;
    spec.measure = MixtureMeasure{{{1e-12, 0.5}}};
    const double theta = 1.3, t = 0.8;
    const EigenmodeValue v = eigenmode_solution(spec, theta, t);
    CHECK(v.value == doctest::Approx(std::exp(-theta * t)).epsilon(1e-6));
}

TEST_CASE("eigenmode solutions decay in t") {
    const LevySpec spec{0.0, MixtureMeasure{{{0.5, 0.4}, {0.5, 0.9}}}};
    double prev = 1.0 + 1e-12;
    for (double t : {0.1, 0.3, 1.0, 3.0, 10.0}) {
        const double v = eigenmode_solution(spec, 2.0, t).value;
        CHECK(v < prev);
        CHECK(v > 0.0);
        prev = v;
    }
}

TEST_CASE("subordinated kernel matches the direct mode sum") {
    const LevySpec spec = stable_spec(0.5);
    std::vector<KernelMode> modes = {
        {1.0, 0.6}, {4.0, -0.3}, {9.0, 0.1}};
    const double t = 0.7;
    double direct = 0.0;
    for (const auto& m : modes)
        direct += m.coeff *
                  mittag_leffler(0.5, -m.theta * std::sqrt(t));
    CHECK(subordinated_kernel(spec, modes, t) ==
          doctest::Approx(direct).epsilon(1e-7));
}

TEST_CASE("complex exponent matches the driftless real one on the axis") {
    for (const auto& spec :
         {stable_spec(0.4, 0.2), LevySpec{0.0, TemperedStableMeasure{0.7, 2.0}},
          LevySpec{0.0, TruncatedStableMeasure{0.5, 1.5, 1.0}}}) {
        for (double lam : {0.5, 1.0, 4.0}) {
            const auto z = laplace_exponent_complex(spec, {lam, 0.0});
            CHECK(z.real() ==
                  doctest::Approx(laplace_exponent_phi0(spec, lam)).epsilon(1e-8));
            CHECK(std::fabs(z.imag()) < 1e-8 * std::max(1.0, z.real()));
        }
    }
}
