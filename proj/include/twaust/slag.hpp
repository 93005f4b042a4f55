#pragma once

// The twisted conormal bundle L = {(x, ξ + μ♯) : x ∈ M, ξ ⟂ T_xM} ⊂ R^n × R^n
// and a direct pointwise test that L is special Lagrangian, independent of the
// condition system in austere.hpp.

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "jets.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace twaust {

/// Base-point data with first derivatives in u: Jacobian columns, fiber
/// vectors ν^a and the metric dual μ♯ = g^{ab} μ_a x_b.
struct BaseJets {
    std::vector<double> u;
    std::vector<double> x;
    RealMatrix jacobian;                     // n x k
    std::vector<std::vector<Jet1>> normals;  // n-k vectors of length n
    std::vector<Jet1> mu_sharp;              // length n
};

struct ImmersionPoint {
    std::vector<double> x;
    std::vector<double> y;
    RealMatrix X;  // n x n, x-components of the n tangent vectors
    RealMatrix Y;  // n x n, y-components
};

struct CalibrationResiduals {
    double lagrangian = 0.0;  // max |XᵀY − YᵀX| after normalizing tangent vectors
    double phase = 0.0;       // |Im(e^{iθ} det Z)| / |det Z|
    int orientation = 0;      // sign of Re(e^{iθ} det Z)
    double abs_det = 0.0;
};

class TwistedConormalImmersion {
public:
    TwistedConormalImmersion(Chart base, OneFormField mu) : base_(std::move(base)), mu_(std::move(mu)) {
        if (mu_.dim() != base_.dim_k) throw InputError("TwistedConormalImmersion: 1-form has wrong number of components");
    }

    const Chart& base() const noexcept { return base_; }
    std::size_t n() const noexcept { return base_.dim_n; }
    std::size_t k() const noexcept { return base_.dim_k; }
    std::size_t fiber_dim() const noexcept { return base_.dim_n - base_.dim_k; }

    BaseJets base_jets(std::span<const double> u) const {
        const std::size_t k = this->k(), n = this->n();
        const auto xj = base_.jets(u);
        const auto mj = mu_.jets(u);
        BaseJets b;
        b.u.assign(u.begin(), u.end());
        b.x.resize(n);
        b.jacobian = RealMatrix(n, k);
        Matrix<Jet1> jac(n, k);
        for (std::size_t i = 0; i < n; ++i) {
            b.x[i] = xj[i].value;
            for (std::size_t a = 0; a < k; ++a) {
                jac(i, a) = Jet1::gradient_entry(xj[i], a);
                b.jacobian(i, a) = xj[i].grad[a];
            }
        }
        if (base_.fiber_basis == FiberBasis::hypersurface_cross) {
            // still reject non-immersed points
            (void)orthonormal_frames(b.jacobian, base_.normal_reference);
            b.normals.push_back(cross_normal(jac));
        } else {
            b.normals = orthonormal_frames(jac, base_.normal_reference).normal;
        }
        const Matrix<Jet1> g = jac.transpose() * jac;
        std::vector<Jet1> mu(k);
        for (std::size_t a = 0; a < k; ++a) mu[a] = Jet1::from(mj[a]);
        LU<Jet1> lu(g);
        if (lu.singular()) throw ImmersionError("metric is singular at this point");
        const std::vector<Jet1> w = lu.solve(mu);
        b.mu_sharp.assign(n, Jet1(0.0, k));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < k; ++a) b.mu_sharp[i] += w[a] * jac(i, a);
        return b;
    }

    /// Point and tangent vectors at fiber coordinates t. Parameter order is
    /// (u_1..u_k, t_1..t_{n-k}).
    ImmersionPoint at(const BaseJets& b, std::span<const double> t) const {
        const std::size_t k = this->k(), n = this->n(), m = fiber_dim();
        if (t.size() != m) throw InputError("TwistedConormalImmersion: fiber point has wrong dimension");
        ImmersionPoint p;
        p.x = b.x;
        p.y.assign(n, 0.0);
        p.X = RealMatrix(n, n, 0.0);
        p.Y = RealMatrix(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double yi = b.mu_sharp[i].v;
            for (std::size_t a = 0; a < m; ++a) yi += t[a] * b.normals[a][i].v;
            p.y[i] = yi;
            for (std::size_t c = 0; c < k; ++c) {
                p.X(i, c) = b.jacobian(i, c);
                double d = b.mu_sharp[i].d[c];
                for (std::size_t a = 0; a < m; ++a) d += t[a] * b.normals[a][i].d[c];
                p.Y(i, c) = d;
            }
            for (std::size_t a = 0; a < m; ++a) p.Y(i, k + a) = b.normals[a][i].v;
        }
        return p;
    }

    ImmersionPoint eval(std::span<const double> u, std::span<const double> t) const { return at(base_jets(u), t); }

private:
    Chart base_;
    OneFormField mu_;
};

inline TwistedConormalImmersion build_immersion(const Chart& chart, const OneFormField& mu) {
    return TwistedConormalImmersion(chart, mu);
}

/// Residuals of the tangent plane spanned by the columns of (X; Y) ⊂ C^n.
inline CalibrationResiduals calibration_residuals(const ImmersionPoint& p, double theta) {
    const std::size_t n = p.X.rows();
    RealMatrix x = p.X, y = p.Y;
    for (std::size_t c = 0; c < n; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += x(i, c) * x(i, c) + y(i, c) * y(i, c);
        s = std::sqrt(s);
        if (!(s > 0.0)) throw ImmersionError("conormal immersion has a vanishing tangent vector");
        for (std::size_t i = 0; i < n; ++i) {
            x(i, c) /= s;
            y(i, c) /= s;
        }
    }
    CalibrationResiduals r;
    const RealMatrix w = x.transpose() * y;
    r.lagrangian = max_abs(w - w.transpose());
    ComplexMatrix z(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) z(i, j) = Complex(x(i, j), y(i, j));
    const Complex det_z = std::polar(1.0, theta) * determinant(z);
    r.abs_det = std::abs(det_z);
    if (!(r.abs_det > 1e-12)) throw ImmersionError("conormal immersion is degenerate at this point");
    r.phase = std::abs(det_z.imag()) / r.abs_det;
    r.orientation = det_z.real() > 0 ? 1 : (det_z.real() < 0 ? -1 : 0);
    return r;
}

struct VerifyOptions {
    double tolerance = 1e-8;
    unsigned threads = 0;
};

/// Calibration residuals over base samples × fiber samples.
inline CheckReport verify_special_lagrangian(const Chart& chart, const OneFormField& mu, double theta,
                                             const SampleSpec& samples, const VerifyOptions& opt = {}) {
    samples.validate(chart.domain);
    if (samples.fiber_box.dim() != chart.dim_n - chart.dim_k)
        throw InputError("verify_special_lagrangian: fiber box must have dimension n - k");
    const TwistedConormalImmersion imm(chart, mu);
    const auto base = samples.base_points();
    const auto fiber = samples.fiber_points();

    struct Slot {
        bool skipped = false;
        std::string reason;
        std::vector<CalibrationResiduals> res;
        std::size_t skipped_fiber = 0;
    };
    std::vector<Slot> slots(base.size());
    parallel_for(base.size(), opt.threads, [&](std::size_t i) {
        auto& s = slots[i];
        BaseJets bj;
        try {
            bj = imm.base_jets(base[i]);
        } catch (const GeometryError& e) {
            s.skipped = true;
            s.reason = e.what();
            return;
        } catch (const DomainError& e) {
            s.skipped = true;
            s.reason = e.what();
            return;
        }
        for (const auto& t : fiber) {
            try {
                s.res.push_back(calibration_residuals(imm.at(bj, t), theta));
            } catch (const GeometryError&) {
                ++s.skipped_fiber;
            }
        }
    });

    CheckReport rep("verify_special_lagrangian");
    std::size_t skipped = 0, pos = 0, neg = 0;
    std::string first_skip;
    rep.condition("lagrangian", opt.tolerance);
    rep.condition("phase", opt.tolerance);
    for (const auto& s : slots) {
        if (s.skipped) {
            skipped += fiber.size();
            if (first_skip.empty()) first_skip = s.reason;
            continue;
        }
        skipped += s.skipped_fiber;
        for (const auto& r : s.res) {
            rep.record("lagrangian", r.lagrangian, opt.tolerance);
            rep.record("phase", r.phase, opt.tolerance);
            pos += r.orientation > 0;
            neg += r.orientation < 0;
        }
    }
    rep.set_points(base.size() * fiber.size(), skipped);
    rep.set_measured("theta", theta);
    rep.set_measured("orientation_positive", static_cast<double>(pos));
    rep.set_measured("orientation_negative", static_cast<double>(neg));
    if (!first_skip.empty()) rep.add_note("first skipped point: " + first_skip);
    return rep;
}

/// CSV of sampled points of L: u, t, x, y, lagrangian_resid, phase_resid.
/// Rows for points that cannot be evaluated are omitted. Returns the row count.
inline std::size_t export_csv(const Chart& chart, const OneFormField& mu, double theta, const SampleSpec& samples,
                              std::ostream& os) {
    samples.validate(chart.domain);
    const TwistedConormalImmersion imm(chart, mu);
    const std::size_t k = chart.dim_k, n = chart.dim_n;
    for (std::size_t a = 0; a < k; ++a) os << 'u' << a + 1 << ',';
    for (std::size_t a = 0; a < n - k; ++a) os << 't' << a + 1 << ',';
    for (std::size_t i = 0; i < n; ++i) os << 'x' << i + 1 << ',';
    for (std::size_t i = 0; i < n; ++i) os << 'y' << i + 1 << ',';
    os << "lagrangian_resid,phase_resid\n";
    const auto old_prec = os.precision(17);
    std::size_t rows = 0;
    for (const auto& u : samples.base_points()) {
        BaseJets bj;
        try {
            bj = imm.base_jets(u);
        } catch (const GeometryError&) {
            continue;
        } catch (const DomainError&) {
            continue;
        }
        for (const auto& t : samples.fiber_points()) {
            ImmersionPoint p = imm.at(bj, t);
            CalibrationResiduals r;
            try {
                r = calibration_residuals(p, theta);
            } catch (const GeometryError&) {
                continue;
            }
            for (double x : u) os << x << ',';
            for (double x : t) os << x << ',';
            for (double x : p.x) os << x << ',';
            for (double x : p.y) os << x << ',';
            os << r.lagrangian << ',' << r.phase << '\n';
            ++rows;
        }
    }
    os.precision(old_prec);
    return rows;
}

} // namespace twaust
