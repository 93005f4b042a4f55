#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <type_traits>
#include <vector>

#include "errors.hpp"

namespace twaust {

using Complex = std::complex<double>;

/// Magnitude used for pivot selection. Overloaded for jet types elsewhere.
template <class R, std::enable_if_t<std::is_floating_point_v<R>, int> = 0>
double pivot_magnitude(R x) { return static_cast<double>(std::abs(x)); }
template <class R>
double pivot_magnitude(const std::complex<R>& z) { return static_cast<double>(std::abs(z)); }

template <class R, std::enable_if_t<std::is_floating_point_v<R>, int> = 0>
bool is_finite_scalar(R x) { return std::isfinite(x); }
template <class R>
bool is_finite_scalar(const std::complex<R>& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

/// Small dense row-major matrix. Sized for the k <= 8 problems this library
/// deals with; no expression templates, no aliasing tricks.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw InputError("Matrix: ragged initializer");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    template <class U>
    explicit Matrix(const Matrix<U>& other) : rows_(other.rows()), cols_(other.cols()) {
        data_.reserve(rows_ * cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) data_.push_back(T(other(i, j)));
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n, T(0));
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    static Matrix diagonal(const std::vector<T>& d) {
        Matrix m(d.size(), d.size(), T(0));
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const noexcept { return data_; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    std::vector<T> column(std::size_t j) const {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    void set_column(std::size_t j, const std::vector<T>& c) {
        for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = c[i];
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(const T& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }
    friend Matrix operator-(Matrix a) {
        for (auto& x : a.data_) x = -x;
        return a;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw InputError("Matrix product: inner dimension mismatch");
        Matrix c(a.rows_, b.cols_, T(0));
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t l = 0; l < a.cols_; ++l) {
                const T ail = a(i, l);
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += ail * b(l, j);
            }
        return c;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](const T& x) { return is_finite_scalar(x); });
    }

private:
    void check_same(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw InputError("Matrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

template <class R>
Matrix<std::complex<R>> to_complex(const Matrix<R>& m) { return Matrix<std::complex<R>>(m); }

/// C = I + i B for a real square B.
template <class R>
Matrix<std::complex<R>> identity_plus_i(const Matrix<R>& b) {
    Matrix<std::complex<R>> c(b.rows(), b.cols());
    for (std::size_t i = 0; i < b.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j)
            c(i, j) = std::complex<R>(i == j ? R(1) : R(0), b(i, j));
    return c;
}

template <class T>
T trace(const Matrix<T>& a) {
    T t(0);
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
    return t;
}

/// Frobenius norm.
template <class T>
double frobenius_norm(const Matrix<T>& a) {
    double s = 0.0;
    for (const auto& x : a.data()) {
        const double m = pivot_magnitude(x);
        s += m * m;
    }
    return std::sqrt(s);
}

template <class T>
double max_abs(const Matrix<T>& a) {
    double m = 0.0;
    for (const auto& x : a.data()) m = std::max(m, pivot_magnitude(x));
    return m;
}

template <class R>
double asymmetry(const Matrix<R>& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, pivot_magnitude(a(i, j) - a(j, i)));
    return m;
}

template <class R>
Matrix<R> symmetric_part(const Matrix<R>& a) {
    Matrix<R> s = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = (a(i, j) + a(j, i)) / R(2);
    return s;
}

/// LU factorization with partial pivoting, PA = LU, over any field-like scalar
/// for which pivot_magnitude is defined (double, complex, jets).
template <class T>
class LU {
public:
    explicit LU(Matrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
        if (!lu_.square()) throw InputError("LU: matrix is not square");
        const std::size_t n = lu_.rows();
        for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
        for (std::size_t col = 0; col < n; ++col) {
            std::size_t piv = col;
            double best = pivot_magnitude(lu_(col, col));
            for (std::size_t r = col + 1; r < n; ++r) {
                const double m = pivot_magnitude(lu_(r, col));
                if (m > best) {
                    best = m;
                    piv = r;
                }
            }
            if (piv != col) {
                for (std::size_t j = 0; j < n; ++j) std::swap(lu_(col, j), lu_(piv, j));
                std::swap(perm_[col], perm_[piv]);
                sign_ = -sign_;
            }
            if (best == 0.0) {
                singular_ = true;
                continue;
            }
            for (std::size_t r = col + 1; r < n; ++r) {
                const T f = lu_(r, col) / lu_(col, col);
                lu_(r, col) = f;
                for (std::size_t j = col + 1; j < n; ++j) lu_(r, j) -= f * lu_(col, j);
            }
        }
    }

    bool singular() const noexcept { return singular_; }

    T determinant() const {
        T d(sign_);
        for (std::size_t i = 0; i < lu_.rows(); ++i) d *= lu_(i, i);
        return d;
    }

    std::vector<T> solve(const std::vector<T>& b) const {
        if (singular_) throw InputError("LU::solve: singular matrix");
        const std::size_t n = lu_.rows();
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            T s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * x[j];
            x[i] = s;
        }
        for (std::size_t ii = n; ii-- > 0;) {
            T s = x[ii];
            for (std::size_t j = ii + 1; j < n; ++j) s -= lu_(ii, j) * x[j];
            x[ii] = s / lu_(ii, ii);
        }
        return x;
    }

    Matrix<T> solve(const Matrix<T>& b) const {
        Matrix<T> x(b.rows(), b.cols());
        for (std::size_t j = 0; j < b.cols(); ++j) x.set_column(j, solve(b.column(j)));
        return x;
    }

    Matrix<T> inverse() const { return solve(Matrix<T>::identity(lu_.rows())); }

private:
    Matrix<T> lu_;
    std::vector<std::size_t> perm_;
    int sign_ = 1;
    bool singular_ = false;
};

template <class T>
T determinant(const Matrix<T>& a) {
    if (!a.square()) throw InputError("determinant: matrix is not square");
    if (a.rows() == 0) return T(1);
    return LU<T>(a).determinant();
}

template <class T>
Matrix<T> inverse(const Matrix<T>& a) {
    LU<T> lu(a);
    if (lu.singular()) throw InputError("inverse: singular matrix");
    return lu.inverse();
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Matrix<T>& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j);
        os << ']';
    }
    return os << ']';
}

} // namespace twaust
