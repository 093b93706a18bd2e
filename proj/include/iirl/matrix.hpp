#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "iirl/errors.hpp"

namespace iirl {

using Vec = std::vector<double>;

/// Dense row-major matrix of doubles. Deliberately minimal: the project
/// only needs storage, element access and a partial-pivot LU solve.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    double* row(int i) { return data_.data() + static_cast<size_t>(i) * cols_; }
    const double* row(int i) const { return data_.data() + static_cast<size_t>(i) * cols_; }

    std::span<double> row_span(int i) { return {row(i), static_cast<size_t>(cols_)}; }
    std::span<const double> row_span(int i) const { return {row(i), static_cast<size_t>(cols_)}; }

    Vec& data() { return data_; }
    const Vec& data() const { return data_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    Vec data_;
};

inline Vec mat_vec(const Matrix& m, const Vec& x) {
    if (static_cast<int>(x.size()) != m.cols()) throw ShapeError("mat_vec: size mismatch");
    Vec y(m.rows(), 0.0);
    for (int i = 0; i < m.rows(); ++i) {
        const double* r = m.row(i);
        double acc = 0.0;
        for (int j = 0; j < m.cols(); ++j) acc += r[j] * x[j];
        y[i] = acc;
    }
    return y;
}

inline double dot(const Vec& a, const Vec& b) {
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double l1_norm(const Vec& v) {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

inline double l2_norm(const Vec& v) { return std::sqrt(dot(v, v)); }

/// Solves A x = b by LU factorization with partial pivoting.
/// Throws SolverError when a pivot falls below `singular_tol`. The
/// permissive default admits the near-absorbing systems the fixture
/// environments produce; callers needing early detection pass a tolerance
/// and callers of record (joint_value) verify residuals instead.
inline Vec lu_solve(Matrix a, Vec b, double singular_tol = 1e-30) {
    const int n = a.rows();
    if (a.cols() != n || static_cast<int>(b.size()) != n)
        throw ShapeError("lu_solve: system must be square");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int k = 0; k < n; ++k) {
        int pivot = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(a(i, k));
            if (v > best) {
                best = v;
                pivot = i;
            }
        }
        if (best < singular_tol) throw SolverError("lu_solve: numerically singular matrix");
        if (pivot != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(pivot, j));
            std::swap(b[k], b[pivot]);
        }
        const double inv = 1.0 / a(k, k);
        for (int i = k + 1; i < n; ++i) {
            const double f = a(i, k) * inv;
            if (f == 0.0) continue;
            a(i, k) = 0.0;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    Vec x(n, 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

/// Gauss-Jordan inverse with partial pivoting.
inline Matrix invert(Matrix a, double singular_tol = 1e-13) {
    const int n = a.rows();
    if (a.cols() != n) throw ShapeError("invert: matrix must be square");
    Matrix inv(n, n, 0.0);
    for (int i = 0; i < n; ++i) inv(i, i) = 1.0;
    for (int k = 0; k < n; ++k) {
        int pivot = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                pivot = i;
            }
        }
        if (best < singular_tol) throw SolverError("invert: numerically singular matrix");
        if (pivot != k) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(k, j), a(pivot, j));
                std::swap(inv(k, j), inv(pivot, j));
            }
        }
        const double d = 1.0 / a(k, k);
        for (int j = 0; j < n; ++j) {
            a(k, j) *= d;
            inv(k, j) *= d;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(i, j) -= f * a(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

/// C = A * B.
inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("mat_mul: size mismatch");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double f = a(i, k);
            if (f == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += f * b(k, j);
        }
    }
    return c;
}

}  // namespace iirl
