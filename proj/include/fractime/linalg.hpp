#pragma once

#include <stdexcept>
#include <vector>

namespace fractime {

using Vector = std::vector<double>;

// Dense row-major square matrix, sized for desk-scale models (dim <= 2048).
class Matrix {
public:
    Matrix() = default;
    explicit Matrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n, 0.0) {}

    int dim() const { return n_; }
    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    static Matrix identity(int n);

    Matrix transpose() const;

private:
    int n_ = 0;
    std::vector<double> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double c, const Matrix& a);

Vector apply(const Matrix& a, const Vector& x);

double max_abs(const Vector& x);

// LU factorization with partial pivoting; reusable across right-hand sides.
class LuFactor {
public:
    explicit LuFactor(Matrix a);

    Vector solve(Vector b) const;

private:
    Matrix lu_;
    std::vector<int> perm_;
};

// Convenience single solve of a x = b.
Vector lu_solve(const Matrix& a, const Vector& b);

// Matrix exponential by scaling and squaring with a Pade approximant.
Matrix expm(const Matrix& a);

}  // namespace fractime
