#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fractime/linalg.hpp"
#include "fractime/random_stream.hpp"

namespace fractime {

// State index used for the cemetery (killed) state in exit samples.
inline constexpr int kCemetery = -1;

struct EigenDecomposition {
    Vector values;   // eigenvalues of L (nonpositive for sub-Markov L)
    Matrix vectors;  // orthonormal columns, L = V diag(values) V^T
};

// Finite-state Markov generator: off-diagonal entries >= 0, row sums <= 0.
// Strictly negative row sums are killing mass (Dirichlet boundary).
struct GeneratorModel {
    int dim = 0;
    Matrix L;
    std::vector<int> domain_mask;  // empty means all states
    std::optional<EigenDecomposition> eigen;

    // Sign pattern and, when present, eigen reconstruction (<= 1e-10 rel).
    void validate() const;

    // Killing rate out of state i: -(row sum).
    double killing_rate(int i) const;

    // Dirichlet restriction to domain_mask (rows/columns in the mask).
    GeneratorModel restricted() const;
};

struct ExitSample {
    double exit_time = 0.0;            // tau_D
    std::vector<double> sojourn;       // per-state time spent before exit
    int exit_state = kCemetery;        // kCemetery when killed
};

// Discrete Dirichlet Laplacian on n interior points with mesh width h,
// with its analytic eigendecomposition attached.
GeneratorModel dirichlet_laplacian_1d(int n, double h);

// e^{sL} f, by eigendecomposition when available, else Pade expm.
Vector semigroup_apply(const GeneratorModel& model, double s, const Vector& f);

// Jump-chain simulation until killing (exit through the boundary).
ExitSample simulate_ctmc(const GeneratorModel& model, int start,
                         RandomStream& rng);

// E_x[tau_D] for all states: solves L v = -1.
Vector mean_exit_solve(const GeneratorModel& model);

// Occupation functional: solves L g = -f, i.e. g = G_D f.
Vector occupation_solve(const GeneratorModel& model, const Vector& f);

// Expected sojourn per state started from `start` before exit:
// nu(j) = (-L^{-1})(start, j), obtained from one transposed solve.
Vector occupation_vector(const GeneratorModel& model, int start);

// Serialization: dense row-major entries plus the domain mask.
void to_json(nlohmann::json& j, const GeneratorModel& model);
void from_json(const nlohmann::json& j, GeneratorModel& model);

// One eigenvalue per line, full precision; empty string when no eigen data.
std::string eigenvalues_csv(const GeneratorModel& model);

}  // namespace fractime
