#pragma once

// Linear subspaces of symmetric matrices: singularity of a span, the
// classification of 3-dimensional singular spans up to rotation, and the
// first prolongation of a tableau L ⊂ S^p V* ⊗ W.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "errors.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace twaust {

inline constexpr double kRankThreshold = 1e-10;

namespace detail {

inline Eigen::MatrixXd to_eigen(const RealMatrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
    return e;
}

inline RealMatrix from_eigen(const Eigen::MatrixXd& e) {
    RealMatrix m(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    for (Eigen::Index i = 0; i < e.rows(); ++i)
        for (Eigen::Index j = 0; j < e.cols(); ++j) m(i, j) = e(i, j);
    return m;
}

/// Numerical rank with threshold relative to the largest singular value.
inline int numerical_rank(const Eigen::VectorXd& sv, double rel = kRankThreshold) {
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel * sv(0)) ++r;
    return r;
}

} // namespace detail

/// Linearly independent symmetric k x k matrices.
class SymSpan {
public:
    SymSpan() = default;

    /// Strict constructor: every matrix must be symmetric and the list independent.
    static SymSpan make(std::vector<RealMatrix> basis) {
        validate_shapes(basis);
        if (rank_of(basis) != basis.size()) throw InputError("SymSpan: basis is linearly dependent");
        SymSpan s;
        s.basis_ = std::move(basis);
        return s;
    }

    /// Keeps a maximal independent subset, in order.
    static SymSpan reduce(const std::vector<RealMatrix>& mats) {
        validate_shapes(mats);
        SymSpan s;
        for (const auto& m : mats) {
            auto trial = s.basis_;
            trial.push_back(m);
            if (rank_of(trial) == trial.size()) s.basis_.push_back(m);
        }
        return s;
    }

    std::size_t dim() const noexcept { return basis_.size(); }
    std::size_t size_k() const noexcept { return basis_.empty() ? 0 : basis_[0].rows(); }
    const std::vector<RealMatrix>& basis() const noexcept { return basis_; }
    const RealMatrix& operator[](std::size_t i) const { return basis_[i]; }

    RealMatrix combination(const std::vector<double>& c) const {
        RealMatrix m(size_k(), size_k(), 0.0);
        for (std::size_t i = 0; i < dim(); ++i) m += basis_[i] * c[i];
        return m;
    }

    double scale() const {
        double s = 0.0;
        for (const auto& b : basis_) s = std::max(s, frobenius_norm(b));
        return s;
    }

    /// Span of QᵀB_iQ.
    SymSpan conjugated(const RealMatrix& q) const {
        SymSpan s;
        for (const auto& b : basis_) s.basis_.push_back(symmetric_part(q.transpose() * b * q));
        return s;
    }

private:
    static void validate_shapes(const std::vector<RealMatrix>& mats) {
        if (mats.empty()) return;
        const std::size_t k = mats[0].rows();
        for (const auto& m : mats) {
            if (!m.square() || m.rows() != k || k == 0) throw InputError("SymSpan: matrices must be square of equal size");
            if (!m.all_finite()) throw InputError("SymSpan: non-finite entry");
            if (asymmetry(m) > 1e-12 * std::max(1.0, max_abs(m))) throw InputError("SymSpan: matrix is not symmetric");
        }
    }

    static std::size_t rank_of(const std::vector<RealMatrix>& mats) {
        if (mats.empty()) return 0;
        const std::size_t k = mats[0].rows();
        Eigen::MatrixXd stack(k * k, mats.size());
        for (std::size_t c = 0; c < mats.size(); ++c)
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < k; ++j) stack(i * k + j, c) = mats[c](i, j);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack);
        return static_cast<std::size_t>(detail::numerical_rank(svd.singularValues()));
    }

    std::vector<RealMatrix> basis_;
};

namespace detail {
inline RealMatrix sym_unit(std::size_t k, std::size_t i, std::size_t j) {
    RealMatrix m(k, k, 0.0);
    m(i, j) = 1.0;
    m(j, i) = 1.0;
    return m;
}
} // namespace detail

/// Matrices vanishing outside the upper-left 2x2 block (common kernel e3).
inline std::vector<RealMatrix> w1_basis() {
    using detail::sym_unit;
    return {sym_unit(3, 0, 0), sym_unit(3, 0, 1), sym_unit(3, 1, 1)};
}

/// Matrices vanishing on the lower-right 2x2 block (axis e1).
inline std::vector<RealMatrix> w2_basis() {
    using detail::sym_unit;
    return {sym_unit(3, 0, 0), sym_unit(3, 0, 1), sym_unit(3, 0, 2)};
}

/// Trace-free two-dimensional subspace spanned by E13+E31 and E23+E32.
inline std::vector<RealMatrix> vprime2_basis() {
    using detail::sym_unit;
    return {sym_unit(3, 0, 2), sym_unit(3, 1, 2)};
}

/// Haar-ish random orthogonal matrix with determinant +1.
inline RealMatrix random_rotation(Rng& rng, std::size_t n) {
    Eigen::MatrixXd g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // Box-Muller
            const double u1 = std::max(rng.unit(), 1e-300);
            const double u2 = rng.unit();
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
        }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (std::size_t i = 0; i < n; ++i)
        if (r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) < 0) q.col(static_cast<Eigen::Index>(i)) *= -1.0;
    if (q.determinant() < 0) q.col(0) *= -1.0;
    return detail::from_eigen(q);
}

// ---------------------------------------------------------------------------
// Polarized determinant

/// Full polarization of det on k x k matrices,
/// D(X_1..X_k) = (1/k!) Σ_{S ≠ ∅} (−1)^{k−|S|} det(Σ_{i∈S} X_i), so D(X,..,X) = det X.
inline double polarized_det(const std::vector<RealMatrix>& xs) {
    const std::size_t k = xs.size();
    if (k == 0) throw InputError("polarized_det: need at least one matrix");
    for (const auto& x : xs)
        if (!x.square() || x.rows() != k) throw InputError("polarized_det: need k matrices of size k x k");
    double total = 0.0;
    double factorial = 1.0;
    for (std::size_t i = 2; i <= k; ++i) factorial *= static_cast<double>(i);
    for (std::size_t mask = 1; mask < (std::size_t{1} << k); ++mask) {
        RealMatrix sum(k, k, 0.0);
        std::size_t count = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t{1} << i)) {
                sum += xs[i];
                ++count;
            }
        const double sign = ((k - count) % 2 == 0) ? 1.0 : -1.0;
        total += sign * determinant(sum);
    }
    return total / factorial;
}

struct SingularityResult {
    bool singular = true;
    std::vector<std::size_t> certificate;  // basis indices of a violating tuple
    double value = 0.0;                    // D at the certificate (or largest |D| seen)
};

/// Does det vanish identically on the span? Checks every polarization value on
/// basis tuples (with repetition), which are the coefficients of det restricted
/// to the span.
inline SingularityResult is_singular_span(const SymSpan& span) {
    const std::size_t k = span.size_k();
    if (span.dim() == 0) return {};
    if (k > 4) throw InputError("is_singular_span: supported for k <= 4");
    const double tol = kRankThreshold * std::pow(span.scale(), static_cast<double>(k));
    SingularityResult res;
    double worst = -1.0;
    std::vector<std::size_t> idx(k, 0);
    // nondecreasing index tuples
    for (;;) {
        std::vector<RealMatrix> xs;
        for (auto i : idx) xs.push_back(span[i]);
        const double d = polarized_det(xs);
        if (std::abs(d) > worst) {
            worst = std::abs(d);
            res.value = d;
            res.certificate = idx;
        }
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == span.dim() - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < k; ++j) idx[j] = idx[pos - 1];
    }
    res.singular = worst < tol;
    if (res.singular) res.certificate.clear();
    return res;
}

// ---------------------------------------------------------------------------
// Classification of singular spans in Sym(3)

enum class SpanShape { zero, W1, W2, none };

inline const char* to_string(SpanShape s) {
    switch (s) {
    case SpanShape::zero: return "zero";
    case SpanShape::W1: return "W1";
    case SpanShape::W2: return "W2";
    case SpanShape::none: return "none";
    }
    return "none";
}

struct Classification {
    SpanShape type = SpanShape::none;
    RealMatrix rotation;          // columns: new basis; RᵀBR has the target shape
    double shape_residual = 0.0;  // max |forbidden entry| / max |B|
    std::size_t kernel_dim = 0;   // dimension of the common kernel
};

namespace detail {

/// Orthonormal basis of R^3 with `first` placed in column `slot`.
inline RealMatrix rotation_with_axis(Eigen::Vector3d axis, int slot) {
    axis.normalize();
    // pick the coordinate vector least aligned with the axis
    Eigen::Index m;
    axis.cwiseAbs().minCoeff(&m);
    Eigen::Vector3d seed = Eigen::Vector3d::Zero();
    seed(m) = 1.0;
    Eigen::Vector3d b1 = (seed - seed.dot(axis) * axis).normalized();
    Eigen::Vector3d b2 = axis.cross(b1);
    Eigen::Matrix3d r;
    if (slot == 0) {
        r.col(0) = axis;
        r.col(1) = b1;
        r.col(2) = b2;
    } else {
        r.col(0) = b1;
        r.col(1) = b2;
        r.col(2) = axis;
    }
    return from_eigen(r);
}

inline double shape_residual(const SymSpan& span, const RealMatrix& r, SpanShape shape) {
    double worst = 0.0;
    for (const auto& b : span.basis()) {
        const RealMatrix c = r.transpose() * b * r;
        const double scale = std::max(max_abs(b), 1e-300);
        double bad = 0.0;
        if (shape == SpanShape::W1) {
            for (std::size_t i = 0; i < 3; ++i) bad = std::max({bad, std::abs(c(2, i)), std::abs(c(i, 2))});
        } else {
            for (std::size_t i = 1; i < 3; ++i)
                for (std::size_t j = 1; j < 3; ++j) bad = std::max(bad, std::abs(c(i, j)));
        }
        worst = std::max(worst, bad / scale);
    }
    return worst;
}

inline Eigen::Vector3d null_vector(const RealMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Eigen::Matrix3d(to_eigen(m)));
    Eigen::Index i;
    es.eigenvalues().cwiseAbs().minCoeff(&i);
    return es.eigenvectors().col(i);
}

inline Eigen::MatrixXd common_kernel(const SymSpan& span) {
    const std::size_t m = span.dim();
    Eigen::MatrixXd stack(3 * m, 3);
    for (std::size_t s = 0; s < m; ++s)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) stack(static_cast<Eigen::Index>(3 * s + i), static_cast<Eigen::Index>(j)) = span[s](i, j);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeFullV);
    const int r = numerical_rank(svd.singularValues());
    return svd.matrixV().rightCols(3 - r);
}

} // namespace detail

/// Classifies a singular span in Sym(3) of dimension 1..3 as conjugate to a
/// subspace of W1 (common kernel, rotated to e3) or W2 (common image axis of
/// the plane on which every element vanishes, rotated to e1). The result is
/// verified by the shape residual.
inline Classification classify_singular_3span(const SymSpan& span, double tol = 1e-8) {
    if (span.size_k() != 3) throw InputError("classify_singular_3span: matrices must be 3x3");
    if (span.dim() == 0 || span.dim() > 3) throw InputError("classify_singular_3span: span dimension must be 1..3");
    Classification out;
    const Eigen::MatrixXd ker = detail::common_kernel(span);
    out.kernel_dim = static_cast<std::size_t>(ker.cols());
    if (ker.cols() >= 1) {
        out.type = SpanShape::W1;
        out.rotation = detail::rotation_with_axis(ker.col(0), 2);
    } else {
        // Each element of W2 (axis a) has its column space containing a; the
        // kernels of two generic elements therefore span a⊥ and a is their cross product.
        Rng rng(0x5EEDu);
        out.type = SpanShape::W2;
        double best = std::numeric_limits<double>::infinity();
        for (int attempt = 0; attempt < 16 && !(best < tol); ++attempt) {
            std::vector<double> c1(span.dim()), c2(span.dim());
            for (auto& c : c1) c = rng.uniform(-1.0, 1.0);
            for (auto& c : c2) c = rng.uniform(-1.0, 1.0);
            const Eigen::Vector3d a = detail::null_vector(span.combination(c1)).cross(detail::null_vector(span.combination(c2)));
            if (a.norm() < 1e-6) continue;
            const RealMatrix r = detail::rotation_with_axis(a, 0);
            const double res = detail::shape_residual(span, r, SpanShape::W2);
            if (res < best) {
                best = res;
                out.rotation = r;
            }
        }
        if (!std::isfinite(best)) throw ClassificationError("classify_singular_3span: no distinguished axis found");
    }
    out.shape_residual = detail::shape_residual(span, out.rotation, out.type);
    if (!(out.shape_residual < tol))
        throw ClassificationError("classify_singular_3span: shape residual " + std::to_string(out.shape_residual) +
                                  " exceeds tolerance; input is not a singular span");
    return out;
}

/// Non-throwing shape test used by structural predicates on II spans.
inline SpanShape span_shape(const std::vector<RealMatrix>& mats, double tol = 1e-8) {
    const SymSpan span = SymSpan::reduce(mats);
    if (span.dim() == 0) return SpanShape::zero;
    if (span.size_k() != 3 || span.dim() > 3) return SpanShape::none;
    try {
        return classify_singular_3span(span, tol).type;
    } catch (const ClassificationError&) {
        return SpanShape::none;
    }
}

// ---------------------------------------------------------------------------
// Prolongation

/// L ⊂ S^order V* ⊗ W given by basis elements; element[w] is the full
/// symmetric order-tensor over V stored row-major (V_dim^order entries).
struct Tableau {
    std::size_t V_dim = 0;
    std::size_t W_dim = 1;
    std::size_t order = 2;
    std::vector<std::vector<std::vector<double>>> basis;
};

struct Prolongation {
    std::size_t dimension = 0;
    Tableau basis;  // order + 1 tensors spanning L^(1)
    std::vector<double> singular_values;
};

namespace detail {

inline std::size_t flat_index(const std::vector<std::size_t>& idx, std::size_t n) {
    std::size_t f = 0;
    for (auto i : idx) f = f * n + i;
    return f;
}

/// All nondecreasing index tuples of the given length over {0..n-1}.
inline std::vector<std::vector<std::size_t>> multisets(std::size_t n, std::size_t len) {
    std::vector<std::vector<std::size_t>> out;
    if (len == 0) return {{}};
    std::vector<std::size_t> idx(len, 0);
    for (;;) {
        out.push_back(idx);
        std::size_t pos = len;
        while (pos > 0 && idx[pos - 1] == n - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t j = pos; j < len; ++j) idx[j] = idx[pos - 1];
    }
    return out;
}

} // namespace detail

inline void validate_tableau(const Tableau& t) {
    if (t.V_dim == 0 || t.W_dim == 0) throw InputError("Tableau: V_dim and W_dim must be positive");
    std::size_t entries = 1;
    for (std::size_t i = 0; i < t.order; ++i) entries *= t.V_dim;
    for (const auto& el : t.basis) {
        if (el.size() != t.W_dim) throw InputError("Tableau: element must have W_dim components");
        for (const auto& comp : el) {
            if (comp.size() != entries) throw InputError("Tableau: component has wrong number of entries");
            for (double x : comp)
                if (!std::isfinite(x)) throw InputError("Tableau: non-finite entry");
        }
    }
}

/// L^(1) = {T ∈ S^{p+1}V*⊗W : T(e_i, ·) ∈ L for all i}. Unknowns are the
/// symmetric coordinates of T and the coefficients c_ir with T(e_i,·) = Σ_r c_ir L_r;
/// L^(1) is the projection of the nullspace onto the T block.
inline Prolongation prolongation(const Tableau& tab) {
    validate_tableau(tab);
    const std::size_t n = tab.V_dim;
    const std::size_t m = tab.W_dim;
    const std::size_t p = tab.order;

    // independent L basis, vectorized on symmetric coordinates
    const auto sym_p = detail::multisets(n, p);
    std::vector<Eigen::VectorXd> ell;
    {
        Eigen::MatrixXd stack(static_cast<Eigen::Index>(m * sym_p.size()), 0);
        for (const auto& el : tab.basis) {
            Eigen::VectorXd v(static_cast<Eigen::Index>(m * sym_p.size()));
            for (std::size_t w = 0; w < m; ++w)
                for (std::size_t s = 0; s < sym_p.size(); ++s)
                    v(static_cast<Eigen::Index>(w * sym_p.size() + s)) = el[w][detail::flat_index(sym_p[s], n)];
            Eigen::MatrixXd trial(stack.rows(), stack.cols() + 1);
            trial << stack, v;
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(trial);
            if (detail::numerical_rank(svd.singularValues()) == trial.cols()) {
                stack = trial;
                ell.push_back(v);
            }
        }
    }
    const std::size_t dimL = ell.size();
    const auto sym_p1 = detail::multisets(n, p + 1);
    std::map<std::vector<std::size_t>, std::size_t> t_index;
    for (std::size_t s = 0; s < sym_p1.size(); ++s) t_index[sym_p1[s]] = s;
    const std::size_t nt = m * sym_p1.size();
    const std::size_t nc = n * dimL;
    const std::size_t neq = n * m * sym_p.size();

    Prolongation out;
    out.basis.V_dim = n;
    out.basis.W_dim = m;
    out.basis.order = p + 1;

    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(neq), static_cast<Eigen::Index>(nt + nc));
    std::size_t row = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t w = 0; w < m; ++w)
            for (std::size_t s = 0; s < sym_p.size(); ++s, ++row) {
                auto full = sym_p[s];
                full.push_back(i);
                std::sort(full.begin(), full.end());
                sys(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(w * sym_p1.size() + t_index[full])) = 1.0;
                for (std::size_t r = 0; r < dimL; ++r)
                    sys(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(nt + i * dimL + r)) =
                        -ell[r](static_cast<Eigen::Index>(w * sym_p.size() + s));
            }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    const int rank = detail::numerical_rank(sv);
    const Eigen::MatrixXd null = svd.matrixV().rightCols(static_cast<Eigen::Index>(nt + nc) - rank);
    // c is determined by T because the L basis is independent, so nullity = dim L^(1)
    out.dimension = static_cast<std::size_t>(null.cols());

    std::size_t full_entries = 1;
    for (std::size_t i = 0; i < p + 1; ++i) full_entries *= n;
    for (Eigen::Index col = 0; col < null.cols(); ++col) {
        std::vector<std::vector<double>> el(m, std::vector<double>(full_entries, 0.0));
        // expand symmetric coordinates to the full tensor
        std::vector<std::size_t> idx(p + 1, 0);
        for (std::size_t f = 0; f < full_entries; ++f) {
            std::size_t rem = f;
            for (std::size_t d = p + 1; d-- > 0;) {
                idx[d] = rem % n;
                rem /= n;
            }
            auto key = idx;
            std::sort(key.begin(), key.end());
            for (std::size_t w = 0; w < m; ++w)
                el[w][f] = null(static_cast<Eigen::Index>(w * sym_p1.size() + t_index[key]), col);
        }
        out.basis.basis.push_back(std::move(el));
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON I/O

namespace detail {

inline void flatten_nested(const nlohmann::json& j, std::size_t depth, std::size_t n, std::vector<double>& out) {
    if (depth == 0) {
        if (!j.is_number()) throw InputError("Tableau JSON: expected a number");
        out.push_back(j.get<double>());
        return;
    }
    if (!j.is_array() || j.size() != n) throw InputError("Tableau JSON: nested array has wrong length");
    for (const auto& e : j) flatten_nested(e, depth - 1, n, out);
}

inline nlohmann::json nest(const std::vector<double>& flat, std::size_t order, std::size_t n, std::size_t& pos) {
    if (order == 0) return flat[pos++];
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) arr.push_back(nest(flat, order - 1, n, pos));
    return arr;
}

} // namespace detail

/// {"V_dim": n, "W_dim": m, "order": p, "basis": [element...]}; each element is
/// a list of m nested p-deep arrays, or a single nested array when m = 1.
inline Tableau tableau_from_json(const nlohmann::json& j) {
    Tableau t;
    try {
        t.V_dim = j.at("V_dim").get<std::size_t>();
        t.W_dim = j.value("W_dim", std::size_t{1});
        t.order = j.value("order", std::size_t{2});
        for (const auto& el : j.at("basis")) {
            std::vector<std::vector<double>> comps;
            const bool single = t.W_dim == 1 && [&] {
                // depth of the element equals order when W is omitted
                const nlohmann::json* cur = &el;
                std::size_t depth = 0;
                while (cur->is_array() && !cur->empty()) {
                    cur = &(*cur)[0];
                    ++depth;
                }
                return depth == t.order;
            }();
            if (single) {
                std::vector<double> flat;
                detail::flatten_nested(el, t.order, t.V_dim, flat);
                comps.push_back(std::move(flat));
            } else {
                if (!el.is_array() || el.size() != t.W_dim) throw InputError("Tableau JSON: element needs W_dim components");
                for (const auto& c : el) {
                    std::vector<double> flat;
                    detail::flatten_nested(c, t.order, t.V_dim, flat);
                    comps.push_back(std::move(flat));
                }
            }
            t.basis.push_back(std::move(comps));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("Tableau JSON: ") + e.what());
    }
    validate_tableau(t);
    return t;
}

inline nlohmann::json tableau_to_json(const Tableau& t) {
    nlohmann::json j;
    j["V_dim"] = t.V_dim;
    j["W_dim"] = t.W_dim;
    j["order"] = t.order;
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& el : t.basis) {
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& c : el) {
            std::size_t pos = 0;
            comps.push_back(detail::nest(c, t.order, t.V_dim, pos));
        }
        basis.push_back(comps);
    }
    j["basis"] = basis;
    return j;
}

/// Tableau of order 2, W = R, from a list of symmetric matrices.
inline Tableau tableau_from_matrices(const std::vector<RealMatrix>& mats) {
    Tableau t;
    if (mats.empty()) throw InputError("tableau_from_matrices: empty list");
    t.V_dim = mats[0].rows();
    t.W_dim = 1;
    t.order = 2;
    for (const auto& m : mats) {
        if (!m.square() || m.rows() != t.V_dim) throw InputError("tableau_from_matrices: size mismatch");
        t.basis.push_back({m.data()});
    }
    validate_tableau(t);
    return t;
}

/// A JSON array of k x k matrices (arrays of rows).
inline std::vector<RealMatrix> matrices_from_json(const nlohmann::json& j) {
    std::vector<RealMatrix> out;
    if (j.is_object() && !j.contains("matrices")) throw InputError("matrices JSON: object needs a \"matrices\" array");
    const nlohmann::json& arr = j.is_object() ? j.at("matrices") : j;
    if (!arr.is_array()) throw InputError("matrices JSON: expected an array");
    try {
        for (const auto& mj : arr) {
            const std::size_t r = mj.size();
            RealMatrix m(r, r);
            for (std::size_t i = 0; i < r; ++i) {
                if (mj[i].size() != r) throw InputError("matrices JSON: matrix must be square");
                for (std::size_t c = 0; c < r; ++c) m(i, c) = mj[i][c].get<double>();
            }
            out.push_back(std::move(m));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("matrices JSON: ") + e.what());
    }
    return out;
}

inline nlohmann::json matrix_to_json(const RealMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

} // namespace twaust
