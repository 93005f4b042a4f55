#pragma once

// Elementary symmetric polynomials of matrices, adjugates, the polarized
// sigma_2 form, and a randomized two-sided check of the identities that tie
// them together.

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "report.hpp"

namespace twaust {

/// sigma_0..sigma_k of a square matrix, with det(I + tA) = sum_j t^j sigma_j.
template <class T>
using SigmaVector = std::vector<T>;

namespace detail {

template <class T>
void require_square_finite(const Matrix<T>& a, const char* who) {
    if (!a.square() || a.rows() == 0) throw InputError(std::string(who) + ": matrix must be square and non-empty");
    if (!a.all_finite()) throw InputError(std::string(who) + ": non-finite entry");
}

} // namespace detail

/// Reduction to upper Hessenberg form by stabilized elementary similarity
/// transforms (row/column swap to the largest subdiagonal pivot, then
/// elimination). Needs only field operations, so it runs over real and
/// complex scalars alike.
template <class T>
Matrix<T> hessenberg(Matrix<T> h) {
    const std::size_t k = h.rows();
    for (std::size_t j = 0; j + 2 < k; ++j) {
        std::size_t piv = j + 1;
        double best = pivot_magnitude(h(j + 1, j));
        for (std::size_t r = j + 2; r < k; ++r) {
            const double m = pivot_magnitude(h(r, j));
            if (m > best) {
                best = m;
                piv = r;
            }
        }
        if (best == 0.0) continue;
        if (piv != j + 1) {
            for (std::size_t c = 0; c < k; ++c) std::swap(h(piv, c), h(j + 1, c));
            for (std::size_t r = 0; r < k; ++r) std::swap(h(r, piv), h(r, j + 1));
        }
        for (std::size_t i = j + 2; i < k; ++i) {
            const T f = h(i, j) / h(j + 1, j);
            if (f == T(0)) continue;
            for (std::size_t c = 0; c < k; ++c) h(i, c) -= f * h(j + 1, c);
            for (std::size_t r = 0; r < k; ++r) h(r, j + 1) += f * h(r, i);
        }
    }
    return h;
}

/// sigma_0..sigma_k with det(I + tA) = sum_j t^j sigma_j(A).
///
/// Characteristic coefficients come from the Hessenberg form through the
/// leading-minor recurrence
///   p_i(x) = (x - h_ii) p_{i-1}(x) - sum_m h_{i-m,i} (h_{i,i-1}...h_{i-m+1,i-m}) p_{i-m-1}(x),
/// and sigma_j = (-1)^j [x^{k-j}] p_k.
template <class T>
SigmaVector<T> sigma_all(const Matrix<T>& a) {
    detail::require_square_finite(a, "sigma_all");
    const std::size_t k = a.rows();
    const Matrix<T> h = hessenberg(a);
    // p[i] holds coefficients of p_i, lowest degree first
    std::vector<std::vector<T>> p(k + 1);
    p[0] = {T(1)};
    for (std::size_t i = 1; i <= k; ++i) {
        std::vector<T> next(i + 1, T(0));
        const auto& prev = p[i - 1];
        for (std::size_t d = 0; d < prev.size(); ++d) {
            next[d + 1] += prev[d];
            next[d] -= h(i - 1, i - 1) * prev[d];
        }
        T sub(1);
        for (std::size_t m = 1; m < i; ++m) {
            sub *= h(i - m, i - m - 1);
            const T coef = h(i - m - 1, i - 1) * sub;
            const auto& q = p[i - m - 1];
            for (std::size_t d = 0; d < q.size(); ++d) next[d] -= coef * q[d];
        }
        p[i] = std::move(next);
    }
    SigmaVector<T> sigma(k + 1);
    for (std::size_t j = 0; j <= k; ++j) sigma[j] = (j % 2 == 0) ? p[k][k - j] : -p[k][k - j];
    return sigma;
}

template <class T>
T sigma(const Matrix<T>& a, std::size_t j) {
    if (j > a.rows()) throw InputError("sigma: index exceeds dimension");
    return sigma_all(a)[j];
}

/// Transposed cofactor matrix; adj(A) A = A adj(A) = det(A) I, adj of a 1x1 is [1].
template <class T>
Matrix<T> adjugate(const Matrix<T>& a) {
    detail::require_square_finite(a, "adjugate");
    const std::size_t k = a.rows();
    if (k == 1) return Matrix<T>(1, 1, T(1));
    Matrix<T> adj(k, k);
    Matrix<T> minor(k - 1, k - 1);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            // minor with row j and column i removed gives adj(i, j)
            for (std::size_t r = 0, rr = 0; r < k; ++r) {
                if (r == j) continue;
                for (std::size_t c = 0, cc = 0; c < k; ++c) {
                    if (c == i) continue;
                    minor(rr, cc++) = a(r, c);
                }
                ++rr;
            }
            const T d = determinant(minor);
            adj(i, j) = ((i + j) % 2 == 0) ? d : -d;
        }
    }
    return adj;
}

/// The symmetric bilinear form polarizing sigma_2: {A,B} = (tr A tr B - tr AB)/2.
template <class T>
T sigma2_form(const Matrix<T>& a, const Matrix<T>& b) {
    if (!a.square() || a.rows() != b.rows() || a.cols() != b.cols())
        throw InputError("sigma2_form: dimension mismatch");
    return (trace(a) * trace(b) - trace(a * b)) / T(2.0);
}

struct Signature {
    int positive = 0;
    int negative = 0;
    int zero = 0;
    std::vector<double> eigenvalues;
};

/// Orthonormal (Frobenius) basis of the k x k real symmetric matrices:
/// E_ii, then (E_ij + E_ji)/sqrt(2) for i < j.
inline std::vector<RealMatrix> symmetric_basis(std::size_t k) {
    std::vector<RealMatrix> basis;
    for (std::size_t i = 0; i < k; ++i) {
        RealMatrix e(k, k, 0.0);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    const double s = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
            RealMatrix e(k, k, 0.0);
            e(i, j) = e(j, i) = s;
            basis.push_back(e);
        }
    return basis;
}

/// Signature of {,} restricted to symmetric k x k matrices. Eigenvalues with
/// |lambda| <= 1e-10 * |Gram| count as zero.
inline Signature sigma2_signature(std::size_t k) {
    const auto basis = symmetric_basis(k);
    const auto d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd gram(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) gram(a, b) = sigma2_form(basis[a], basis[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double threshold = 1e-10 * gram.norm();
    Signature sig;
    for (Eigen::Index i = 0; i < d; ++i) {
        const double ev = eig.eigenvalues()(i);
        sig.eigenvalues.push_back(ev);
        if (ev > threshold) ++sig.positive;
        else if (ev < -threshold) ++sig.negative;
        else ++sig.zero;
    }
    return sig;
}

// ---------------------------------------------------------------------------
// Randomized identity suite

inline RealMatrix random_matrix(Rng& rng, std::size_t k, double lo = -2.0, double hi = 2.0) {
    RealMatrix m(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) m(i, j) = rng.uniform(lo, hi);
    return m;
}

inline RealMatrix random_symmetric(Rng& rng, std::size_t k, double lo = -2.0, double hi = 2.0) {
    return symmetric_part(random_matrix(rng, k, lo, hi));
}

/// Uniform entries in [-2,2], resampled until |det| >= 1e-6.
inline RealMatrix random_invertible(Rng& rng, std::size_t k) {
    for (;;) {
        RealMatrix m = random_matrix(rng, k);
        if (std::abs(determinant(m)) >= 1e-6) return m;
    }
}

inline double relative_residual(const Complex& lhs, const Complex& rhs) {
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

inline Complex ipow(Complex base, int e) {
    Complex r(1.0, 0.0);
    const bool inv = e < 0;
    for (int i = 0; i < std::abs(e); ++i) r *= base;
    return inv ? Complex(1.0) / r : r;
}

/// Two-sided evaluation of the sigma/adjugate identities over `trials` seeded
/// random matrices. Each identity becomes one condition whose max is the
/// largest relative residual seen; all must stay below 1e-9.
inline CheckReport identity_suite(int k, int trials, std::uint64_t seed) {
    if (k < 2 || k > 5) throw InputError("identity_suite: k must be in {2,3,4,5}");
    if (trials < 1) throw InputError("identity_suite: trials must be positive");
    constexpr double tol = 1e-9;
    const auto kk = static_cast<std::size_t>(k);
    CheckReport report("identities k=" + std::to_string(k));
    report.set_seed(seed);
    Rng rng(seed);
    const Complex i1(0.0, 1.0);

    for (int trial = 0; trial < trials; ++trial) {
        const RealMatrix a = random_invertible(rng, kk);
        const RealMatrix b = random_symmetric(rng, kk);
        const ComplexMatrix ac = to_complex(a);
        const ComplexMatrix c = identity_plus_i(b);
        const Complex det_c = determinant(c);
        const double det_a = determinant(a);
        const auto sa = sigma_all(a);
        const RealMatrix adj_a = adjugate(a);

        // det(I + tA) as a polynomial in t
        {
            double worst = 0.0;
            for (std::size_t s = 0; s <= kk; ++s) {
                const double t = -1.0 + 2.0 * static_cast<double>(s) / static_cast<double>(kk);
                RealMatrix m = RealMatrix::identity(kk) + a * t;
                double poly = 0.0;
                for (std::size_t j = 0; j <= kk; ++j) poly += std::pow(t, static_cast<double>(j)) * sa[j];
                worst = std::max(worst, relative_residual(determinant(m), poly));
            }
            report.record("char_polynomial", worst, tol);
        }
        // sigma_j(A^-1) = sigma_{k-j}(A) / det A
        {
            const auto sinv = sigma_all(inverse(a));
            double worst = 0.0;
            for (std::size_t j = 0; j <= kk; ++j) worst = std::max(worst, relative_residual(sinv[j], sa[kk - j] / det_a));
            report.record("sigma_inverse", worst, tol);
        }
        // sigma_j(adj A) = det(A)^{j-1} sigma_{k-j}(A)
        {
            const auto sadj = sigma_all(adj_a);
            double worst = 0.0;
            for (std::size_t j = 0; j <= kk; ++j) {
                const double rhs = std::pow(det_a, static_cast<double>(j) - 1.0) * sa[kk - j];
                worst = std::max(worst, relative_residual(sadj[j], rhs));
            }
            report.record("sigma_adjugate", worst, tol);
        }
        // sigma_j(A C^-1) = det(A)^{j+1-k} det(C)^-1 sigma_{k-j}(C adj A)
        {
            const ComplexMatrix c_inv = inverse(c);
            const auto lhs = sigma_all(ac * c_inv);
            const auto s_cadj = sigma_all(c * to_complex(adj_a));
            double worst = 0.0;
            for (std::size_t j = 0; j <= kk; ++j) {
                const Complex rhs = ipow(Complex(det_a), static_cast<int>(j) + 1 - k) / det_c * s_cadj[kk - j];
                worst = std::max(worst, relative_residual(lhs[j], rhs));
            }
            report.record("sigma_quotient", worst, tol);
        }
        // sigma_{k-1}(A C^-1) det C = sigma_{k-1}(A) + i sigma_1(B adj A)
        {
            const Complex lhs = sigma(ac * inverse(c), kk - 1) * det_c;
            const Complex rhs = Complex(sa[kk - 1]) + i1 * trace(b * adj_a);
            report.record("sigma_km1_complex", relative_residual(lhs, rhs), tol);
        }
        // sigma_2(A) = sigma_1(A)^2 / 2 - sigma_1(A^2) / 2
        {
            const double rhs = 0.5 * sa[1] * sa[1] - 0.5 * trace(a * a);
            report.record("newton_sigma2", relative_residual(sa[2], rhs), tol);
        }
        if (k == 3) {
            // adj(I + zB) = I + z(sigma_1(B) I - B) + z^2 adj B
            {
                const Complex z(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
                const ComplexMatrix lhs = adjugate(ComplexMatrix::identity(3) + to_complex(b) * z);
                const ComplexMatrix sb = to_complex(RealMatrix::identity(3) * trace(b) - b);
                const ComplexMatrix rhs = ComplexMatrix::identity(3) + sb * z + to_complex(adjugate(b)) * (z * z);
                double worst = 0.0;
                for (std::size_t r = 0; r < 3; ++r)
                    for (std::size_t s = 0; s < 3; ++s) worst = std::max(worst, relative_residual(lhs(r, s), rhs(r, s)));
                report.record("adjugate_affine", worst, tol);
            }
            // sigma_1(A C^-1) det C = sigma_1(A(I - adj B)) + 2i {A,B}
            {
                const Complex lhs = trace(ac * inverse(c)) * det_c;
                const Complex rhs = Complex(trace(a * (RealMatrix::identity(3) - adjugate(b)))) + 2.0 * i1 * sigma2_form(a, b);
                report.record("sigma1_complex", relative_residual(lhs, rhs), tol);
            }
        }
    }
    report.set_measured("k", k);
    report.set_measured("trials", trials);
    return report;
}

} // namespace twaust
