#include "fractime/markov.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fractime {

namespace {

constexpr double kSignTol = 1e-12;

}  // namespace

void GeneratorModel::validate() const {
    if (dim < 1) throw std::invalid_argument("GeneratorModel: dim must be >= 1");
    if (L.dim() != dim)
        throw std::invalid_argument("GeneratorModel: matrix size mismatch");
    for (int i = 0; i < dim; ++i) {
        double row = 0.0;
        for (int j = 0; j < dim; ++j) {
            if (i != j && L(i, j) < -kSignTol)
                throw std::invalid_argument(
                    "GeneratorModel: off-diagonal entries must be nonnegative");
            row += L(i, j);
        }
        if (row > kSignTol)
            throw std::invalid_argument("GeneratorModel: row sums must be <= 0");
    }
    for (int s : domain_mask)
        if (s < 0 || s >= dim)
            throw std::invalid_argument("GeneratorModel: domain mask out of range");
    if (eigen) {
        const Matrix& v = eigen->vectors;
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                double rec = 0.0;
                for (int k = 0; k < dim; ++k)
                    rec += v(i, k) * eigen->values[k] * v(j, k);
                err = std::max(err, std::fabs(rec - L(i, j)));
                scale = std::max(scale, std::fabs(L(i, j)));
            }
        if (err > 1e-10 * std::max(scale, 1.0))
            throw std::invalid_argument(
                "GeneratorModel: eigendecomposition does not reconstruct L");
    }
}

double GeneratorModel::killing_rate(int i) const {
    double row = 0.0;
    for (int j = 0; j < dim; ++j) row += L(i, j);
    return std::max(0.0, -row);
}

GeneratorModel GeneratorModel::restricted() const {
    if (domain_mask.empty()) return *this;
    GeneratorModel sub;
    sub.dim = static_cast<int>(domain_mask.size());
    sub.L = Matrix(sub.dim);
    for (int i = 0; i < sub.dim; ++i)
        for (int j = 0; j < sub.dim; ++j)
            sub.L(i, j) = L(domain_mask[i], domain_mask[j]);
    sub.validate();
    return sub;
}

GeneratorModel dirichlet_laplacian_1d(int n, double h) {
    if (n < 2) throw std::invalid_argument("dirichlet_laplacian_1d: n must be >= 2");
    if (!(h > 0.0)) throw std::invalid_argument("dirichlet_laplacian_1d: h must be positive");
    GeneratorModel model;
    model.dim = n;
    model.L = Matrix(n);
    const double inv_h2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        model.L(i, i) = -2.0 * inv_h2;
        if (i > 0) model.L(i, i - 1) = inv_h2;
        if (i + 1 < n) model.L(i, i + 1) = inv_h2;
    }
    EigenDecomposition eig;
    eig.values.resize(n);
    eig.vectors = Matrix(n);
    const double norm = std::sqrt(2.0 / (n + 1));
    for (int k = 1; k <= n; ++k) {
        eig.values[k - 1] =
            -2.0 * inv_h2 * (1.0 - std::cos(k * std::numbers::pi / (n + 1)));
        for (int j = 1; j <= n; ++j)
            eig.vectors(j - 1, k - 1) =
                norm * std::sin(j * k * std::numbers::pi / (n + 1));
    }
    model.eigen = std::move(eig);
    return model;
}

Vector semigroup_apply(const GeneratorModel& model, double s, const Vector& f) {
    if (s < 0.0) throw std::invalid_argument("semigroup_apply: s must be nonnegative");
    if (static_cast<int>(f.size()) != model.dim)
        throw std::invalid_argument("semigroup_apply: vector size mismatch");
    for (double v : f)
        if (!std::isfinite(v))
            throw std::invalid_argument("semigroup_apply: non-finite entry");
    if (s == 0.0) return f;
    if (model.eigen) {
        const Matrix& v = model.eigen->vectors;
        const int n = model.dim;
        Vector coef(n, 0.0);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) coef[k] += v(j, k) * f[j];
        Vector out(n, 0.0);
        for (int k = 0; k < n; ++k) {
            const double decay = std::exp(s * model.eigen->values[k]) * coef[k];
            for (int j = 0; j < n; ++j) out[j] += v(j, k) * decay;
        }
        return out;
    }
    return fractime::apply(expm(s * model.L), f);
}

ExitSample simulate_ctmc(const GeneratorModel& model, int start,
                         RandomStream& rng) {
    if (start < 0 || start >= model.dim)
        throw std::invalid_argument("simulate_ctmc: start state out of range");
    ExitSample sample;
    sample.sojourn.assign(model.dim, 0.0);
    int state = start;
    for (long steps = 0; steps < 100'000'000L; ++steps) {
        const double rate = -model.L(state, state);
        if (rate <= 0.0)
            throw std::runtime_error(
                "simulate_ctmc: absorbing interior state, exit impossible");
        const double hold = rng.exponential(rate);
        sample.exit_time += hold;
        sample.sojourn[state] += hold;
        // Choose the next state proportional to off-diagonal mass; leftover
        // is killing.
        double pick = rng.uniform() * rate;
        int next = kCemetery;
        for (int j = 0; j < model.dim; ++j) {
            if (j == state) continue;
            pick -= model.L(state, j);
            if (pick <= 0.0) {
                next = j;
                break;
            }
        }
        if (next == kCemetery) {
            sample.exit_state = kCemetery;
            return sample;
        }
        state = next;
    }
    throw std::runtime_error("simulate_ctmc: step budget exceeded");
}

Vector mean_exit_solve(const GeneratorModel& model) {
    return occupation_solve(model, Vector(model.dim, 1.0));
}

Vector occupation_solve(const GeneratorModel& model, const Vector& f) {
    Vector rhs(f);
    for (double& v : rhs) v = -v;
    Vector g = lu_solve(model.L, rhs);
    // Residual check against the requested accuracy.
    Vector res = fractime::apply(model.L, g);
    for (int i = 0; i < model.dim; ++i) res[i] += f[i];
    if (max_abs(res) > 1e-10 * std::max(1.0, max_abs(f)))
        throw std::runtime_error("occupation_solve: residual too large");
    return g;
}

Vector occupation_vector(const GeneratorModel& model, int start) {
    if (start < 0 || start >= model.dim)
        throw std::invalid_argument("occupation_vector: start out of range");
    Vector rhs(model.dim, 0.0);
    rhs[start] = -1.0;
    return lu_solve(model.L.transpose(), rhs);
}

void to_json(nlohmann::json& j, const GeneratorModel& model) {
    j = {{"dim", model.dim},
         {"L", model.L.data()},
         {"domain_mask", model.domain_mask}};
}

void from_json(const nlohmann::json& j, GeneratorModel& model) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (it.key() != "dim" && it.key() != "L" && it.key() != "domain_mask")
            throw std::invalid_argument("GeneratorModel: unknown key '" + it.key() + "'");
    model.dim = j.at("dim").get<int>();
    const auto entries = j.at("L").get<std::vector<double>>();
    if (entries.size() != static_cast<std::size_t>(model.dim) * model.dim)
        throw std::invalid_argument("GeneratorModel: entry count mismatch");
    model.L = Matrix(model.dim);
    model.L.data() = entries;
    if (j.contains("domain_mask"))
        model.domain_mask = j.at("domain_mask").get<std::vector<int>>();
    model.eigen.reset();
    model.validate();
}

std::string eigenvalues_csv(const GeneratorModel& model) {
    if (!model.eigen) return {};
    std::ostringstream os;
    os.precision(17);
    os << "eigenvalue\n";
    for (double v : model.eigen->values) os << v << "\n";
    return os.str();
}

}  // namespace fractime
