#pragma once

// Extrinsic geometry of a parametrized k-submanifold x: U ⊂ R^k -> R^n at a
// point: induced metric, Christoffel symbols, orthonormal tangent and normal
// frames, second fundamental form matrices A^ν in the orthonormal tangent
// frame, and the covariant derivative B = ∇μ of a 1-form.

#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "jets.hpp"
#include "matrix.hpp"

namespace twaust {

inline constexpr double kPivotThreshold = 1e-10;

/// Axis-aligned box in parameter space.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    std::size_t dim() const noexcept { return lo.size(); }

    bool contains(std::span<const double> u) const {
        if (u.size() != lo.size()) return false;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (u[i] < lo[i] || u[i] > hi[i]) return false;
        return true;
    }

    bool contains(const Box& inner) const {
        if (inner.dim() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
        return true;
    }

    void validate(const char* who) const {
        if (lo.size() != hi.size()) throw InputError(std::string(who) + ": box bounds differ in length");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
                throw InputError(std::string(who) + ": malformed box");
    }
};

/// How the fiber coordinates t of the conormal bundle are attached to normals.
/// `orthonormal` uses the seeded orthonormal normal frame; `hypersurface_cross`
/// (n = k+1 only) uses the unnormalized normal ν_i = det[x_1, ..., x_k, e_i].
enum class FiberBasis { orthonormal, hypersurface_cross };

struct Chart {
    std::size_t dim_k = 0;
    std::size_t dim_n = 0;
    std::vector<Expr> map;
    Box domain;
    std::vector<std::size_t> normal_reference;
    FiberBasis fiber_basis = FiberBasis::orthonormal;
    std::shared_ptr<const Program> program;

    static Chart make(std::size_t k, std::size_t n, std::vector<Expr> map, Box domain,
                      std::vector<std::size_t> normal_reference = {},
                      FiberBasis fiber = FiberBasis::orthonormal) {
        if (k == 0 || k >= n) throw InputError("Chart: need 1 <= k < n");
        if (map.size() != n) throw InputError("Chart: map must have n components");
        if (domain.dim() != k) throw InputError("Chart: domain dimension must be k");
        domain.validate("Chart");
        if (normal_reference.empty()) {
            normal_reference.resize(n);
            std::iota(normal_reference.begin(), normal_reference.end(), std::size_t{0});
        }
        for (auto i : normal_reference)
            if (i >= n) throw InputError("Chart: normal_reference index out of range");
        if (fiber == FiberBasis::hypersurface_cross && n != k + 1)
            throw InputError("Chart: cross-product fiber basis needs n = k + 1");
        Chart c;
        c.dim_k = k;
        c.dim_n = n;
        c.map = std::move(map);
        c.domain = std::move(domain);
        c.normal_reference = std::move(normal_reference);
        c.fiber_basis = fiber;
        c.program = std::make_shared<Program>(c.map, k);
        return c;
    }

    std::vector<Jet2> jets(std::span<const double> u) const { return program->jet2(u); }
};

/// μ = μ_a du^a on the chart's parameter domain.
struct OneFormField {
    std::vector<Expr> components;
    std::shared_ptr<const Program> program;

    static OneFormField make(std::vector<Expr> components) {
        OneFormField f;
        const std::size_t k = components.size();
        f.components = std::move(components);
        f.program = std::make_shared<Program>(f.components, k);
        return f;
    }

    static OneFormField zero(std::size_t k) { return make(std::vector<Expr>(k, Expr(0.0))); }

    /// μ = df.
    static OneFormField exact(const Expr& f, std::size_t k) { return make(gradient(f, k)); }

    std::size_t dim() const noexcept { return components.size(); }
    std::vector<Jet2> jets(std::span<const double> u) const { return program->jet2(u); }
};

struct FrameData {
    std::size_t k = 0;
    std::size_t n = 0;
    std::vector<double> point;
    std::vector<double> position;      // x(u)
    std::vector<Jet2> chart_jets;      // x_i with first and second derivatives
    RealMatrix jacobian;               // n x k, columns x_a
    RealMatrix g;                      // k x k
    RealMatrix g_inv;
    std::vector<double> christoffel;   // Γ^c_ab at [c*k*k + a*k + b]
    RealMatrix tangent_frame;          // n x k orthonormal, J = E R
    RealMatrix tangent_change;         // T = R^{-1}, e_i = x_a T_ai
    RealMatrix normal_frame;           // n x (n-k) orthonormal
    std::vector<RealMatrix> A;         // A^ν in the orthonormal tangent frame
    RealMatrix B;                      // symmetric part of ∇μ, orthonormal frame
    RealMatrix B_raw;                  // ∇μ before symmetrization
    double dmu_resid = 0.0;

    double gamma(std::size_t c, std::size_t a, std::size_t b) const { return christoffel[(c * k + a) * k + b]; }
};

// ---------------------------------------------------------------------------
// Gram-Schmidt, shared between plain doubles and 1-jets

template <class S>
S dot(const std::vector<S>& a, const std::vector<S>& b) {
    S s(0.0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <class S>
struct OrthoFrames {
    std::vector<std::vector<S>> tangent;  // k orthonormal vectors
    std::vector<std::vector<S>> normal;   // n-k orthonormal vectors
    Matrix<S> r;                          // k x k upper triangular, x_a = Σ_i e_i R_ia
};

namespace detail {

template <class S>
void remove_component(std::vector<S>& v, const std::vector<S>& e) {
    const S c = dot(v, e);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * e[i];
}

} // namespace detail

/// Orthonormal tangent frame from the Jacobian columns and orthonormal normal
/// frame seeded from ambient basis vectors in the given order. Projections are
/// applied twice for stability.
template <class S>
OrthoFrames<S> orthonormal_frames(const Matrix<S>& jac, const std::vector<std::size_t>& reference) {
    using std::sqrt;
    const std::size_t n = jac.rows();
    const std::size_t k = jac.cols();
    OrthoFrames<S> f;
    f.r = Matrix<S>(k, k, S(0.0));
    for (std::size_t a = 0; a < k; ++a) {
        std::vector<S> v = jac.column(a);
        const double scale = std::sqrt(pivot_magnitude(dot(v, v)));
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t i = 0; i < a; ++i) {
                const S c = dot(v, f.tangent[i]);
                f.r(i, a) += c;
                for (std::size_t m = 0; m < n; ++m) v[m] -= c * f.tangent[i][m];
            }
        const S norm = sqrt(dot(v, v));
        if (!(pivot_magnitude(norm) > kPivotThreshold * std::max(1.0, scale)))
            throw ImmersionError("Jacobian is rank deficient at this point");
        f.r(a, a) = norm;
        for (auto& x : v) x /= norm;
        f.tangent.push_back(std::move(v));
    }
    for (std::size_t idx : reference) {
        if (f.normal.size() == n - k) break;
        std::vector<S> v(n, S(0.0));
        v[idx] = S(1.0);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& e : f.tangent) detail::remove_component(v, e);
            for (const auto& e : f.normal) detail::remove_component(v, e);
        }
        const S norm = sqrt(dot(v, v));
        if (!(pivot_magnitude(norm) >= kPivotThreshold)) continue;
        for (auto& x : v) x /= norm;
        f.normal.push_back(std::move(v));
    }
    if (f.normal.size() != n - k)
        throw DegenerateReferenceError("normal_reference does not span the normal space at this point");
    return f;
}

/// Cofactor normal ν_i = det[x_1, ..., x_k, e_i] of a hypersurface.
template <class S>
std::vector<S> cross_normal(const Matrix<S>& jac) {
    const std::size_t n = jac.rows();
    const std::size_t k = jac.cols();
    if (n != k + 1) throw InputError("cross_normal: needs n = k + 1");
    std::vector<S> nu(n);
    for (std::size_t i = 0; i < n; ++i) {
        // expand det[x_1..x_k, e_i] along the last column
        Matrix<S> minor(k, k);
        for (std::size_t r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (std::size_t c = 0; c < k; ++c) minor(rr, c) = jac(r, c);
            ++rr;
        }
        const S d = k == 0 ? S(1.0) : determinant(minor);
        nu[i] = ((i + k) % 2 == 0) ? d : -d;
    }
    return nu;
}

// ---------------------------------------------------------------------------
// Frame computation

/// Metric, Christoffel symbols and orthonormal frames at u. Christoffel symbols
/// come from the chart 2-jet as Γ^c_ab = g^{cd} <x_ab, x_d>, which equals the
/// metric-derivative formula exactly.
inline FrameData frame_at(const Chart& chart, std::span<const double> u) {
    const std::size_t k = chart.dim_k;
    const std::size_t n = chart.dim_n;
    FrameData f;
    f.k = k;
    f.n = n;
    f.point.assign(u.begin(), u.end());
    f.chart_jets = chart.jets(u);
    f.jacobian = RealMatrix(n, k);
    f.position.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        f.position[i] = f.chart_jets[i].value;
        for (std::size_t a = 0; a < k; ++a) f.jacobian(i, a) = f.chart_jets[i].grad[a];
    }
    f.g = f.jacobian.transpose() * f.jacobian;
    const auto frames = orthonormal_frames(f.jacobian, chart.normal_reference);
    LU<double> lu(f.g);
    if (lu.singular()) throw ImmersionError("metric is singular at this point");
    f.g_inv = lu.inverse();
    f.g_inv = symmetric_part(f.g_inv);

    // <x_ab, x_d>
    std::vector<double> second(k * k * k, 0.0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            for (std::size_t d = 0; d < k; ++d) {
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) s += f.chart_jets[i].h(a, b) * f.jacobian(i, d);
                second[(a * k + b) * k + d] = s;
            }
    f.christoffel.assign(k * k * k, 0.0);
    for (std::size_t c = 0; c < k; ++c)
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
                double s = 0.0;
                for (std::size_t d = 0; d < k; ++d) s += f.g_inv(c, d) * second[(a * k + b) * k + d];
                f.christoffel[(c * k + a) * k + b] = s;
            }

    f.tangent_frame = RealMatrix(n, k);
    for (std::size_t a = 0; a < k; ++a) f.tangent_frame.set_column(a, frames.tangent[a]);
    f.normal_frame = RealMatrix(n, n - k);
    for (std::size_t j = 0; j < n - k; ++j) f.normal_frame.set_column(j, frames.normal[j]);
    // T = R^{-1}, upper triangular
    f.tangent_change = inverse(frames.r);
    return f;
}

/// Coordinate components h_ab = <x_ab, ν> for a unit normal ν.
inline RealMatrix second_fundamental_coords(const FrameData& f, const std::vector<double>& nu) {
    RealMatrix h(f.k, f.k);
    for (std::size_t a = 0; a < f.k; ++a)
        for (std::size_t b = 0; b < f.k; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < f.n; ++i) s += f.chart_jets[i].h(a, b) * nu[i];
            h(a, b) = s;
        }
    return h;
}

/// Coordinate tensor (k x k) expressed in the orthonormal tangent frame: TᵀMT.
inline RealMatrix to_orthonormal(const FrameData& f, const RealMatrix& m) {
    return f.tangent_change.transpose() * m * f.tangent_change;
}

/// A^ν for each column ν of the normal frame, in the orthonormal tangent frame.
inline std::vector<RealMatrix> second_fundamental_form(const FrameData& f) {
    std::vector<RealMatrix> out;
    for (std::size_t j = 0; j < f.n - f.k; ++j)
        out.push_back(symmetric_part(to_orthonormal(f, second_fundamental_coords(f, f.normal_frame.column(j)))));
    return out;
}

/// Coordinate covariant derivative ∇_a μ_b = ∂_a μ_b − Γ^c_ab μ_c.
inline RealMatrix covariant_coords(const FrameData& f, const std::vector<Jet2>& mu) {
    RealMatrix b(f.k, f.k);
    for (std::size_t a = 0; a < f.k; ++a)
        for (std::size_t c2 = 0; c2 < f.k; ++c2) {
            double s = mu[c2].grad[a];
            for (std::size_t c = 0; c < f.k; ++c) s -= f.gamma(c, a, c2) * mu[c].value;
            b(a, c2) = s;
        }
    return b;
}

/// Fills B, B_raw and dmu_resid of the frame data.
inline void covariant_mu(FrameData& f, const OneFormField& mu) {
    if (mu.dim() != f.k) throw InputError("covariant_mu: 1-form has wrong number of components");
    const auto jets = mu.jets(f.point);
    f.dmu_resid = 0.0;
    for (std::size_t a = 0; a < f.k; ++a)
        for (std::size_t b = a + 1; b < f.k; ++b)
            f.dmu_resid = std::max(f.dmu_resid, std::abs(jets[b].grad[a] - jets[a].grad[b]));
    f.B_raw = to_orthonormal(f, covariant_coords(f, jets));
    f.B = symmetric_part(f.B_raw);
}

/// Everything at once: frames, A^ν, and B for μ.
inline FrameData full_frame(const Chart& chart, const OneFormField& mu, std::span<const double> u) {
    FrameData f = frame_at(chart, u);
    f.A = second_fundamental_form(f);
    covariant_mu(f, mu);
    return f;
}

// ---------------------------------------------------------------------------
// Intrinsic differential operators from jets

/// Δf = g^{ab}(∂_a∂_b f − Γ^c_ab ∂_c f).
inline double laplace_beltrami(const FrameData& f, const Jet2& fn) {
    double s = 0.0;
    for (std::size_t a = 0; a < f.k; ++a)
        for (std::size_t b = 0; b < f.k; ++b) {
            double t = fn.h(a, b);
            for (std::size_t c = 0; c < f.k; ++c) t -= f.gamma(c, a, b) * fn.grad[c];
            s += f.g_inv(a, b) * t;
        }
    return s;
}

/// Mean curvature vector (trace of the second fundamental form), Δx.
inline std::vector<double> mean_curvature_vector(const FrameData& f) {
    std::vector<double> h(f.n);
    for (std::size_t i = 0; i < f.n; ++i) h[i] = laplace_beltrami(f, f.chart_jets[i]);
    return h;
}

/// div λ = g^{ab} ∇_a λ_b.
inline double divergence(const FrameData& f, const std::vector<Jet2>& lambda) {
    const RealMatrix cov = covariant_coords(f, lambda);
    double s = 0.0;
    for (std::size_t a = 0; a < f.k; ++a)
        for (std::size_t b = 0; b < f.k; ++b) s += f.g_inv(a, b) * cov(a, b);
    return s;
}

/// |df|^2 = g^{ab} f_a f_b.
inline double gradient_norm2(const FrameData& f, const Jet2& fn) {
    double s = 0.0;
    for (std::size_t a = 0; a < f.k; ++a)
        for (std::size_t b = 0; b < f.k; ++b) s += f.g_inv(a, b) * fn.grad[a] * fn.grad[b];
    return s;
}

/// Largest |(FᵀF − I)_ij| of the combined tangent+normal frame.
inline double frame_orthonormality_defect(const FrameData& f) {
    RealMatrix full(f.n, f.n);
    for (std::size_t a = 0; a < f.k; ++a) full.set_column(a, f.tangent_frame.column(a));
    for (std::size_t j = 0; j < f.n - f.k; ++j) full.set_column(f.k + j, f.normal_frame.column(j));
    return max_abs(full.transpose() * full - RealMatrix::identity(f.n));
}

} // namespace twaust
