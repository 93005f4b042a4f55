#pragma once

// The twisted-austere condition system for a pair (M, μ): closedness of μ,
// the determinant phase condition on C = I + iB, and the σ_j conditions on
// A^ν C⁻¹ for every normal ν, together with the equivalent specialized and
// k = 3 expanded forms.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "linclass.hpp"
#include "parallel.hpp"
#include "polyalg.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace twaust {

inline constexpr double kDefaultTolerance = 1e-8;

/// Wraps an angle to (−π, π].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    if (r > std::numbers::pi) r -= two_pi;
    return r;
}

/// φ = θ − (n−k)π/2 in (−π, π].
inline double cophase(double theta, std::size_t n, std::size_t k) {
    if (!(n > k && k >= 1)) throw InputError("cophase: need n > k >= 1");
    return wrap_angle(theta - static_cast<double>(n - k) * std::numbers::pi / 2.0);
}

struct PhaseSpec {
    double theta = 0.0;
    std::size_t n = 0;
    std::size_t k = 0;
    double phi = 0.0;

    static PhaseSpec make(double theta, std::size_t n, std::size_t k) {
        return PhaseSpec{theta, n, k, cophase(theta, n, k)};
    }
};

struct ConditionResiduals {
    double r_closed = 0.0;
    double r_det = 0.0;
    double r_det_scaled = 0.0;                    // divided by |det C|
    std::vector<std::vector<double>> r_sigma;     // [ν][j-1]
    std::vector<std::vector<double>> r_sigma_scaled;
    std::vector<double> r_special1;               // tr(A(I+B²)⁻¹)
    std::vector<double> r_specialk;               // det A · Im(i^k / det C)
    std::vector<double> point;
};

namespace detail {

inline void require_shapes(const std::vector<RealMatrix>& a_list, const RealMatrix& b, const char* who) {
    if (!b.square() || b.rows() == 0) throw InputError(std::string(who) + ": B must be square");
    for (const auto& a : a_list)
        if (!a.square() || a.rows() != b.rows()) throw InputError(std::string(who) + ": A and B dimensions differ");
}

inline Complex i_pow(std::size_t j) {
    static const Complex units[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return units[j % 4];
}

} // namespace detail

/// Raw and scaled residuals of the general condition system. The σ_j scale is
/// (1+‖A‖)(1+‖B‖)^j with Frobenius norms.
inline ConditionResiduals residuals_general(const std::vector<RealMatrix>& a_list, const RealMatrix& b, double phi) {
    detail::require_shapes(a_list, b, "residuals_general");
    const std::size_t k = b.rows();
    const ComplexMatrix c = identity_plus_i(b);
    LU<Complex> lu(c);
    const Complex det_c = lu.determinant();
    const ComplexMatrix c_inv = lu.inverse();
    ConditionResiduals r;
    r.r_det = (std::polar(1.0, phi) * det_c).imag();
    r.r_det_scaled = r.r_det / std::abs(det_c);
    const double nb = frobenius_norm(b);

    RealMatrix b2 = b * b;
    for (std::size_t i = 0; i < k; ++i) b2(i, i) += 1.0;
    const RealMatrix b2_inv = inverse(b2);
    const double im_ik_over_det = (detail::i_pow(k) / det_c).imag();

    for (const auto& a : a_list) {
        const auto s = sigma_all(ComplexMatrix(to_complex(a) * c_inv));
        std::vector<double> raw(k), scaled(k);
        const double na = frobenius_norm(a);
        for (std::size_t j = 1; j <= k; ++j) {
            raw[j - 1] = (detail::i_pow(j) * s[j]).imag();
            scaled[j - 1] = raw[j - 1] / ((1.0 + na) * std::pow(1.0 + nb, static_cast<double>(j)));
        }
        r.r_sigma.push_back(std::move(raw));
        r.r_sigma_scaled.push_back(std::move(scaled));
        r.r_special1.push_back(trace(a * b2_inv));
        r.r_specialk.push_back(determinant(a) * im_ik_over_det);
    }
    return r;
}

struct SpecializedResiduals {
    std::vector<double> trace_form;  // tr(A^ν (I+B²)⁻¹)
    std::vector<double> det_form;    // det A^ν · Im(i^k / det C)
};

/// The j = 1 and j = k conditions rewritten without complex inverses. They
/// equal r_sigma[ν][0] and r_sigma[ν][k−1] identically; φ does not enter.
inline SpecializedResiduals residuals_specialized(const std::vector<RealMatrix>& a_list, const RealMatrix& b) {
    detail::require_shapes(a_list, b, "residuals_specialized");
    const std::size_t k = b.rows();
    RealMatrix b2 = b * b;
    for (std::size_t i = 0; i < k; ++i) b2(i, i) += 1.0;
    const RealMatrix b2_inv = inverse(b2);
    const Complex det_c = determinant(identity_plus_i(b));
    const double factor = (detail::i_pow(k) / det_c).imag();
    SpecializedResiduals out;
    for (const auto& a : a_list) {
        out.trace_form.push_back(trace(a * b2_inv));
        out.det_form.push_back(determinant(a) * factor);
    }
    return out;
}

struct K3ExpandedResiduals {
    double det = 0.0;             // (1−σ₂B) sin φ + (σ₁B − σ₃B) cos φ
    std::vector<double> sigma1;   // σ₁(A(I − adj B)) cos φ − 2{A,B} sin φ
    std::vector<double> sigma2;   // σ₂(A) sin φ + σ₁(B adj A) cos φ
    std::vector<double> sigma3;   // det A cos φ
};

/// Real polynomial forms of the k = 3 system. Given the determinant
/// condition, e^{iφ} det C = ρ is real and each expanded σ_j residual equals
/// ρ times the general one, so both vanish on the same points.
inline K3ExpandedResiduals residuals_k3_expanded(const std::vector<RealMatrix>& a_list, const RealMatrix& b, double phi) {
    detail::require_shapes(a_list, b, "residuals_k3_expanded");
    if (b.rows() != 3) throw InputError("residuals_k3_expanded: needs k = 3");
    const auto sb = sigma_all(b);
    const double sp = std::sin(phi), cp = std::cos(phi);
    K3ExpandedResiduals r;
    r.det = (1.0 - sb[2]) * sp + (sb[1] - sb[3]) * cp;
    const RealMatrix i_minus_adj = RealMatrix::identity(3) - adjugate(b);
    for (const auto& a : a_list) {
        r.sigma1.push_back(trace(a * i_minus_adj) * cp - 2.0 * sigma2_form(a, b) * sp);
        r.sigma2.push_back(sigma(a, 2) * sp + trace(b * adjugate(a)) * cp);
        r.sigma3.push_back(determinant(a) * cp);
    }
    return r;
}

struct StructuralFlags {
    double max_abs_det = 0.0;
    double min_second_singular = std::numeric_limits<double>::infinity();  // over A^ν ≠ 0
    bool rank_one = false;
    SpanShape shape = SpanShape::zero;
};

/// Pointwise shape data for k = 3: determinants, a rank-one detector from the
/// singular values of each A^ν, and the classification of span{A^ν}.
inline StructuralFlags structural_predicates(const std::vector<RealMatrix>& a_list, double tol = 1e-8) {
    StructuralFlags f;
    for (const auto& a : a_list) {
        if (a.rows() != 3 || !a.square()) throw InputError("structural_predicates: needs 3x3 matrices");
        f.max_abs_det = std::max(f.max_abs_det, std::abs(determinant(a)));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(Eigen::Matrix3d(detail::to_eigen(a)));
        Eigen::Vector3d sv = es.eigenvalues().cwiseAbs();
        std::sort(sv.data(), sv.data() + 3, std::greater<>());
        if (sv(0) > tol) {
            f.min_second_singular = std::min(f.min_second_singular, sv(1));
            if (sv(1) < tol * std::max(1.0, sv(0))) f.rank_one = true;
        }
    }
    std::vector<RealMatrix> nonzero;
    for (const auto& a : a_list)
        if (max_abs(a) > tol) nonzero.push_back(a);
    f.shape = nonzero.empty() ? SpanShape::zero : span_shape(nonzero, std::max(tol, 1e-8));
    return f;
}

// ---------------------------------------------------------------------------
// Sampled check

struct CheckOptions {
    double tolerance = kDefaultTolerance;
    unsigned threads = 0;
    bool flip_phase_probe = true;
};

namespace detail {

struct PointOutcome {
    bool skipped = false;
    std::string skip_reason;
    CheckReport conds;          // per-point conditions
    double negated_worst = 0.0; // worst scaled residual under φ → −φ
    StructuralFlags flags;
    bool has_flags = false;
};

inline void record_point(CheckReport& rep, const FrameData& f, double phi, double tol) {
    const std::size_t k = f.k;
    rep.record("closed", f.dmu_resid, tol);
    const auto r = residuals_general(f.A, f.B, phi);
    rep.record("im_det", r.r_det_scaled, tol);
    for (std::size_t nu = 0; nu < f.A.size(); ++nu) {
        const std::string tag = "nu" + std::to_string(nu);
        for (std::size_t j = 1; j <= k; ++j)
            rep.record("sigma_" + tag + "_j" + std::to_string(j), r.r_sigma_scaled[nu][j - 1], tol);
        const double na = 1.0 + frobenius_norm(f.A[nu]);
        rep.record("trace_form_" + tag, r.r_special1[nu] / na, tol);
        rep.record("det_form_" + tag, r.r_specialk[nu] / std::pow(na, static_cast<double>(k)), tol);
    }
    if (k == 3) {
        const auto e = residuals_k3_expanded(f.A, f.B, phi);
        const double nb = 1.0 + frobenius_norm(f.B);
        rep.record("k3_det", e.det / (nb * nb * nb), tol);
        for (std::size_t nu = 0; nu < f.A.size(); ++nu) {
            const std::string tag = "nu" + std::to_string(nu);
            const double na = 1.0 + frobenius_norm(f.A[nu]);
            rep.record("k3_sigma1_" + tag, e.sigma1[nu] / (na * nb * nb), tol);
            rep.record("k3_sigma2_" + tag, e.sigma2[nu] / (na * na * nb), tol);
            rep.record("k3_sigma3_" + tag, e.sigma3[nu] / (na * na * na), tol);
        }
    }
}

} // namespace detail

/// Evaluates the condition system on every base sample. Points where the chart
/// or μ cannot be evaluated are skipped; more than 10% skipped makes the
/// verdict inconclusive.
inline CheckReport check_pair(const Chart& chart, const OneFormField& mu, const PhaseSpec& phase,
                              const SampleSpec& samples, const CheckOptions& opt = {}) {
    if (phase.k != chart.dim_k || phase.n != chart.dim_n) throw InputError("check_pair: phase dimensions differ from chart");
    if (mu.dim() != chart.dim_k) throw InputError("check_pair: 1-form has wrong number of components");
    samples.validate(chart.domain);
    const auto pts = samples.base_points();
    std::vector<detail::PointOutcome> out(pts.size());
    parallel_for(pts.size(), opt.threads, [&](std::size_t i) {
        auto& o = out[i];
        try {
            const FrameData f = full_frame(chart, mu, pts[i]);
            detail::record_point(o.conds, f, phase.phi, opt.tolerance);
            if (opt.flip_phase_probe) {
                CheckReport neg;
                detail::record_point(neg, f, wrap_angle(-phase.phi), opt.tolerance);
                o.negated_worst = neg.worst_max();
            }
            if (chart.dim_k == 3) {
                o.flags = structural_predicates(f.A);
                o.has_flags = true;
            }
        } catch (const GeometryError& e) {
            o.skipped = true;
            o.skip_reason = e.what();
        } catch (const DomainError& e) {
            o.skipped = true;
            o.skip_reason = e.what();
        }
    });

    CheckReport rep("check_pair");
    std::size_t skipped = 0;
    double negated_worst = 0.0;
    StructuralFlags agg;
    std::size_t rank_one_points = 0, w1 = 0, w2 = 0, unclassified = 0;
    agg.min_second_singular = std::numeric_limits<double>::infinity();
    std::string first_skip;
    for (const auto& o : out) {
        if (o.skipped) {
            if (first_skip.empty()) first_skip = o.skip_reason;
            ++skipped;
            continue;
        }
        rep.merge_conditions(o.conds);
        negated_worst = std::max(negated_worst, o.negated_worst);
        if (o.has_flags) {
            agg.max_abs_det = std::max(agg.max_abs_det, o.flags.max_abs_det);
            agg.min_second_singular = std::min(agg.min_second_singular, o.flags.min_second_singular);
            rank_one_points += o.flags.rank_one;
            w1 += o.flags.shape == SpanShape::W1;
            w2 += o.flags.shape == SpanShape::W2;
            unclassified += o.flags.shape == SpanShape::none;
        }
    }
    rep.set_points(pts.size(), skipped);
    rep.set_measured("phi", phase.phi);
    rep.set_measured("theta", phase.theta);
    if (!first_skip.empty()) rep.add_note("first skipped point: " + first_skip);
    if (opt.flip_phase_probe) {
        rep.set_measured("negated_phase_worst", negated_worst);
        if (rep.verdict() == Verdict::fail && negated_worst < opt.tolerance)
            rep.add_note("conditions fail for phi but hold for -phi; check the cophase sign convention");
    }
    if (chart.dim_k == 3) {
        rep.set_measured("max_abs_det_A", agg.max_abs_det);
        if (std::isfinite(agg.min_second_singular)) rep.set_measured("min_second_singular_A", agg.min_second_singular);
        rep.set_measured("rank_one_points", static_cast<double>(rank_one_points));
        rep.set_measured("span_W1_points", static_cast<double>(w1));
        rep.set_measured("span_W2_points", static_cast<double>(w2));
        rep.set_measured("span_unclassified_points", static_cast<double>(unclassified));
    }
    return rep;
}

} // namespace twaust
