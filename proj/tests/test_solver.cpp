#include <doctest.h>

#include <cmath>

#include "fractime/oracles.hpp"
#include "fractime/solver.hpp"

using namespace fractime;

namespace {

LevySpec stable_spec(double beta, double kappa = 0.0) {
    LevySpec spec;
    spec.kappa = kappa;
    spec.measure = StableMeasure{beta};
    return spec;
}

GeneratorModel scalar_model(double theta) {
    GeneratorModel m;
    m.dim = 1;
    m.L = Matrix(1);
    m.L(0, 0) = -theta;
    EigenDecomposition eig;
    eig.values = {-theta};
    eig.vectors = Matrix(1);
    eig.vectors(0, 0) = 1.0;
    m.eigen = eig;
    return m;
}

}  // namespace

TEST_CASE("convolution weights are positive and telescope") {
    const TimeGrid grid{1.0, 64};
    for (const auto& spec :
         {stable_spec(0.5), LevySpec{0.0, TemperedStableMeasure{0.7, 1.0}},
          LevySpec{0.3, TruncatedStableMeasure{0.4, 2.0, 1.0}}}) {
        const CaputoWeights w = build_weights(spec, grid);
        REQUIRE(static_cast<int>(w.by_lag.size()) == grid.n_steps);
        double sum = 0.0, prev = 1e300;
        for (double g : w.by_lag) {
            CHECK(g > 0.0);
            CHECK(g <= prev + 1e-15);  // w decreases, so lags decrease
            prev = g;
            sum += g;
        }
        CHECK(sum ==
              doctest::Approx(integrated_tail_G(spec, grid.t_end)).epsilon(1e-12));
    }
}

TEST_CASE("weights are additive over mixture components") {
    const TimeGrid grid{0.5, 32};
    const LevySpec mix{0.0, MixtureMeasure{{{0.6, 0.3}, {0.4, 0.8}}}};
    const CaputoWeights wm = build_weights(mix, grid);
    LevySpec a{0.0, MixtureMeasure{{{0.6, 0.3}}}};
    LevySpec b{0.0, MixtureMeasure{{{0.4, 0.8}}}};
    const CaputoWeights wa = build_weights(a, grid);
    const CaputoWeights wb = build_weights(b, grid);
    for (int m = 0; m < grid.n_steps; ++m)
        CHECK(wm.by_lag[m] ==
              doctest::Approx(wa.by_lag[m] + wb.by_lag[m]).epsilon(1e-13));
}

TEST_CASE("scalar solve converges to Mittag-Leffler") {
    const double beta = 0.5, theta = 1.0, t = 1.0;
    const LevySpec spec = stable_spec(beta);
    const GeneratorModel model = scalar_model(theta);
    const double exact = mittag_leffler(beta, -theta);
    double prev_err = 1e300;
    for (int n : {256, 512, 1024, 2048}) {
        const SolveResult r = solve(model, spec, {t, n}, {1.0});
        const double err = std::fabs(r.states.back()[0] - exact);
        CHECK(err < prev_err);
        prev_err = err;
        if (n == 2048) CHECK(err < 5e-3);
    }
}

TEST_CASE("degenerate data propagates exactly") {
    const LevySpec spec = stable_spec(0.6);
    const GeneratorModel model = scalar_model(2.0);
    // Zero initial state stays zero.
    const SolveResult z = solve(model, spec, {1.0, 16}, {0.0});
    for (const auto& u : z.states) CHECK(u[0] == 0.0);
    // Zero generator keeps the initial state.
    GeneratorModel frozen;
    frozen.dim = 1;
    frozen.L = Matrix(1);
    const SolveResult c = solve(frozen, spec, {1.0, 16}, {0.7});
    for (const auto& u : c.states)
        CHECK(u[0] == doctest::Approx(0.7).epsilon(1e-13));
}

TEST_CASE("conservative generators conserve mass") {
    // Symmetric conservative generator: zero column sums, so the total
    // mass is invariant under the dynamics.
    GeneratorModel m;
    m.dim = 2;
    m.L = Matrix(2);
    m.L(0, 0) = -1.0; m.L(0, 1) = 1.0;
    m.L(1, 0) = 1.0;  m.L(1, 1) = -1.0;
    const SolveResult r =
        solve(m, stable_spec(0.5), {2.0, 128}, {1.0, 0.0});
    for (const auto& u : r.states) {
        CHECK(u[0] + u[1] == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(u[0] >= -1e-10);
        CHECK(u[1] >= -1e-10);
    }
}

TEST_CASE("drift-dominated dynamics match the classical semigroup") {
    LevySpec spec;
    spec.kappa = 1.0;
    spec.measure = MixtureMeasure{{{1e-10, 0.5}}};
    const GeneratorModel model = dirichlet_laplacian_1d(6, 0.2);
    Vector f0 = {0.2, 0.5, 0.9, 0.9, 0.5, 0.2};
    const double t = 0.02;
    const SolveResult r = solve(model, spec, {t, 512}, f0);
    const Vector ref = semigroup_apply(model, t, f0);
    for (int i = 0; i < 6; ++i)
        CHECK(std::fabs(r.states.back()[i] - ref[i]) < 1e-3);
}

TEST_CASE("solutions respect the maximum principle") {
    const GeneratorModel model = dirichlet_laplacian_1d(8, 1.0 / 9.0);
    const SolveResult r =
        solve(model, stable_spec(0.5), {1.0, 256}, Vector(8, 1.0));
    for (const auto& u : r.states)
        for (double v : u) {
            CHECK(v >= -1e-10);
            CHECK(v <= 1.0 + 1e-10);
        }
}

TEST_CASE("residual of the integrated form shrinks under refinement") {
    const LevySpec spec = stable_spec(0.5);
    const GeneratorModel model = scalar_model(1.0);
    const SolveResult coarse = solve(model, spec, {1.0, 1024}, {1.0});
    const SolveResult fine = solve(model, spec, {1.0, 2048}, {1.0});
    const double rc = residual_check(coarse, spec, model, {1.0});
    const double rf = residual_check(fine, spec, model, {1.0});
    CHECK(rf < 1e-3);
    CHECK(rc / rf > 1.3);
}

TEST_CASE("a single step is legal and matches the full solve") {
    const LevySpec spec = stable_spec(0.4);
    const GeneratorModel model = scalar_model(1.5);
    const TimeGrid grid{0.5, 8};
    const CaputoWeights w = build_weights(spec, grid);
    const SolveResult r = solve(model, spec, grid, {1.0});
    std::vector<Vector> history = {r.states[0]};
    for (int n = 1; n <= grid.n_steps; ++n) {
        const Vector u = step(model, spec, w, history, {1.0}, n);
        CHECK(u[0] == doctest::Approx(r.states[n][0]).epsilon(1e-12));
        history.push_back(u);
    }

    const SolveResult one = solve(model, spec, {0.5, 1}, {1.0});
    CHECK(one.states.size() == 2);
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(solve(scalar_model(1.0), stable_spec(0.5), {0.0, 4}, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(solve(scalar_model(1.0), stable_spec(0.5), {1.0, 0}, {1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        solve(scalar_model(1.0), stable_spec(0.5), {1.0, 4}, {1.0, 2.0}),
        std::invalid_argument);
}

TEST_CASE("csv output shape") {
    const SolveResult r =
        solve(scalar_model(1.0), stable_spec(0.5), {1.0, 4}, {1.0});
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("t,state_0\n", 0) == 0);
    int lines = 0;
    for (char ch : csv)
        if (ch == '\n') ++lines;
    CHECK(lines == 6);  // header + 5 states
}
