#include "fractime/linalg.hpp"

#include <cmath>

namespace fractime {

Matrix Matrix::identity(int n) {
    Matrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transpose() const {
    Matrix m(n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    const int n = a.dim();
    Matrix c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] += b.data()[i];
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix c = a;
    for (std::size_t i = 0; i < c.data().size(); ++i) c.data()[i] -= b.data()[i];
    return c;
}

Matrix operator*(double c, const Matrix& a) {
    Matrix m = a;
    for (double& v : m.data()) v *= c;
    return m;
}

Vector apply(const Matrix& a, const Vector& x) {
    const int n = a.dim();
    if (static_cast<int>(x.size()) != n)
        throw std::invalid_argument("apply: size mismatch");
    Vector y(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double max_abs(const Vector& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    return m;
}

LuFactor::LuFactor(Matrix a) : lu_(std::move(a)), perm_(lu_.dim()) {
    const int n = lu_.dim();
    for (int i = 0; i < n; ++i) perm_[i] = i;
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int i = col + 1; i < n; ++i)
            if (std::fabs(lu_(i, col)) > std::fabs(lu_(pivot, col))) pivot = i;
        if (lu_(pivot, col) == 0.0)
            throw std::runtime_error("LuFactor: singular matrix");
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(lu_(pivot, j), lu_(col, j));
            std::swap(perm_[pivot], perm_[col]);
        }
        const double inv = 1.0 / lu_(col, col);
        for (int i = col + 1; i < n; ++i) {
            const double factor = lu_(i, col) * inv;
            lu_(i, col) = factor;
            for (int j = col + 1; j < n; ++j) lu_(i, j) -= factor * lu_(col, j);
        }
    }
}

Vector LuFactor::solve(Vector b) const {
    const int n = lu_.dim();
    if (static_cast<int>(b.size()) != n)
        throw std::invalid_argument("LuFactor::solve: size mismatch");
    Vector y(n);
    for (int i = 0; i < n; ++i) y[i] = b[perm_[i]];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) y[i] -= lu_(i, j) * y[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) y[i] -= lu_(i, j) * y[j];
        y[i] /= lu_(i, i);
    }
    return y;
}

Vector lu_solve(const Matrix& a, const Vector& b) {
    return LuFactor(a).solve(b);
}

Matrix expm(const Matrix& a) {
    // Scaling and squaring with the (13,13) Pade approximant.
    static const double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};
    const int n = a.dim();
    double norm = 0.0;  // infinity norm
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::fabs(a(i, j));
        norm = std::max(norm, row);
    }
    int squarings = 0;
    const double theta13 = 5.371920351148152;
    if (norm > theta13)
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    const Matrix as = (1.0 / std::pow(2.0, squarings)) * a;

    const Matrix a2 = as * as;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a2 * a4;
    const Matrix id = Matrix::identity(n);

    const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                           b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id;
    const Matrix u = as * u_inner;
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 +
                     b[4] * a4 + b[2] * a2 + b[0] * id;

    // Solve (v - u) r = (v + u) column by column.
    const Matrix lhs = v - u;
    const Matrix rhs = v + u;
    LuFactor lu(lhs);
    Matrix r(n);
    for (int j = 0; j < n; ++j) {
        Vector col(n);
        for (int i = 0; i < n; ++i) col[i] = rhs(i, j);
        Vector x = lu.solve(col);
        for (int i = 0; i < n; ++i) r(i, j) = x[i];
    }
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

}  // namespace fractime
