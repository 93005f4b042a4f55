#pragma once

// Explicit twisted-austere constructions as ready-to-check (chart, μ, θ)
// bundles, each carrying numerical residuals of its own hypotheses.

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "austere.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "jets.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "report.hpp"
#include "sampling.hpp"

namespace twaust {

inline constexpr double kHypothesisTolerance = 1e-7;

/// Pointwise residual of one hypothesis, evaluated at chart parameters u.
struct Hypothesis {
    std::string name;
    std::function<double(std::span<const double>)> residual;
};

/// Pointwise quantity that is reported (min and max), never asserted.
struct Measure {
    std::string name;
    std::function<double(std::span<const double>)> value;
};

struct ExampleInstance {
    std::string id;
    std::string description;
    Chart chart;
    OneFormField mu;
    double theta = 0.0;
    SampleSpec sample_default;
    nlohmann::ordered_json params;  // every parameter, defaults filled in
    std::vector<Hypothesis> hypotheses;
    std::vector<Measure> measures;
    std::map<std::string, double> measured;  // fixed at instantiation

    PhaseSpec phase() const { return PhaseSpec::make(theta, chart.dim_n, chart.dim_k); }
};

inline const std::vector<std::string>& example_ids() {
    static const std::vector<std::string> ids{"tg_graph",       "line_k1",           "minimal_graph_k2",
                                              "cylinder_thm41", "split_cylinder",    "cone_eigenfunction",
                                              "twisted_cone",   "nonsplit_torus_cone"};
    return ids;
}

namespace catalog_detail {

constexpr double kPi = std::numbers::pi;

/// Reads parameters from a JSON object, records the resolved values and
/// rejects unknown keys.
class Params {
public:
    Params(const nlohmann::json& j, std::string id) : id_(std::move(id)) {
        if (j.is_null()) return;
        if (!j.is_object()) throw InputError(id_ + ": params must be a JSON object");
        in_ = j;
    }

    double num(const std::string& key, double def, double lo = -std::numeric_limits<double>::infinity(),
               double hi = std::numeric_limits<double>::infinity()) {
        double v = def;
        if (auto it = take(key)) {
            if (!it->is_number()) throw InputError(id_ + ": parameter '" + key + "' must be a number");
            v = it->get<double>();
        }
        if (!std::isfinite(v) || v < lo || v > hi)
            throw InputError(id_ + ": parameter '" + key + "' out of range [" + fmt(lo) + ", " + fmt(hi) + "]");
        out_[key] = v;
        return v;
    }

    std::size_t integer(const std::string& key, std::size_t def, std::size_t lo, std::size_t hi) {
        std::size_t v = def;
        if (auto it = take(key)) {
            if (!it->is_number_integer()) throw InputError(id_ + ": parameter '" + key + "' must be an integer");
            const auto s = it->get<long long>();
            if (s < 0) throw InputError(id_ + ": parameter '" + key + "' must be non-negative");
            v = static_cast<std::size_t>(s);
        }
        if (v < lo || v > hi)
            throw InputError(id_ + ": parameter '" + key + "' out of range [" + std::to_string(lo) + ", " +
                             std::to_string(hi) + "]");
        out_[key] = v;
        return v;
    }

    bool flag(const std::string& key, bool def) {
        bool v = def;
        if (auto it = take(key)) {
            if (!it->is_boolean()) throw InputError(id_ + ": parameter '" + key + "' must be a boolean");
            v = it->get<bool>();
        }
        out_[key] = v;
        return v;
    }

    std::string choice(const std::string& key, const std::string& def, const std::vector<std::string>& allowed) {
        std::string v = def;
        if (auto it = take(key)) {
            if (!it->is_string()) throw InputError(id_ + ": parameter '" + key + "' must be a string");
            v = it->get<std::string>();
        }
        if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
            throw InputError(id_ + ": parameter '" + key + "' has unsupported value '" + v + "'");
        out_[key] = v;
        return v;
    }

    std::vector<double> list(const std::string& key, std::vector<double> def) {
        if (auto it = take(key)) {
            if (!it->is_array()) throw InputError(id_ + ": parameter '" + key + "' must be an array");
            def.clear();
            for (const auto& x : *it) {
                if (!x.is_number()) throw InputError(id_ + ": parameter '" + key + "' must hold numbers");
                def.push_back(x.get<double>());
            }
        }
        for (double x : def)
            if (!std::isfinite(x)) throw InputError(id_ + ": parameter '" + key + "' must be finite");
        out_[key] = def;
        return def;
    }

    /// Throws on any key that was never read.
    nlohmann::ordered_json finish() const {
        for (auto it = in_.begin(); it != in_.end(); ++it)
            if (!used_.count(it.key())) throw InputError(id_ + ": unknown parameter '" + it.key() + "'");
        return out_;
    }

private:
    const nlohmann::json* take(const std::string& key) {
        if (!in_.is_object() || !in_.contains(key)) return nullptr;
        used_.insert(key);
        return &in_.at(key);
    }

    static std::string fmt(double x) {
        if (std::isinf(x)) return x < 0 ? "-inf" : "inf";
        return nlohmann::json(x).dump();
    }

    std::string id_;
    nlohmann::json in_;
    std::set<std::string> used_;
    nlohmann::ordered_json out_ = nlohmann::ordered_json::object();
};

inline Expr var(std::size_t i) { return Expr::var(i); }

/// Parameters of a sub-chart picked out of the full chart's parameters.
inline std::vector<double> pick(std::span<const double> u, std::initializer_list<std::size_t> idx) {
    std::vector<double> out;
    for (auto i : idx) out.push_back(u[i]);
    return out;
}

/// Evaluates scalar expressions (as functions of `params` variables) with jets.
struct Scalars {
    std::shared_ptr<const Program> prog;
    Scalars(std::vector<Expr> es, std::size_t params) : prog(std::make_shared<Program>(std::move(es), params)) {}
    std::vector<Jet2> operator()(std::span<const double> u) const { return prog->jet2(u); }
};

/// max_i |Δ y_i + 2 y_i| for a surface y: Σ → S^{n-1}; zero iff Σ is minimal in the sphere.
inline double sphere_minimality(const Chart& sigma, std::span<const double> p) {
    const FrameData f = frame_at(sigma, p);
    const auto h = mean_curvature_vector(f);
    double r = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) r = std::max(r, std::abs(h[i] + 2.0 * f.position[i]));
    return r;
}

/// |Δ m + 2m| on the surface chart.
inline double eigen_residual(const Chart& sigma, const Scalars& m, std::span<const double> p) {
    const FrameData f = frame_at(sigma, p);
    const Jet2 j = m(p)[0];
    return std::abs(laplace_beltrami(f, j) + 2.0 * j.value);
}

/// |mean curvature vector| of a surface in Euclidean space.
inline double euclidean_minimality(const Chart& sigma, std::span<const double> p) {
    const auto h = mean_curvature_vector(frame_at(sigma, p));
    double s = 0.0;
    for (double x : h) s += x * x;
    return std::sqrt(s);
}

/// |∂_0 λ_1 − ∂_1 λ_0| for a 1-form on a 2-parameter chart.
inline double closedness_2d(const Scalars& lambda, std::span<const double> p) {
    const auto j = lambda(p);
    return std::abs(j[1].grad[0] - j[0].grad[1]);
}

inline SampleSpec default_samples(const Chart& c, std::size_t points) {
    return SampleSpec::grid(c.domain, points, c.dim_n - c.dim_k);
}

inline Box box(std::vector<double> lo, std::vector<double> hi) { return Box{std::move(lo), std::move(hi)}; }

// ---------------------------------------------------------------------------

inline ExampleInstance tg_graph(Params& p) {
    const std::size_t k = p.integer("k", 2, 1, 5);
    const std::size_t n = p.integer("n", k + 1, k + 1, 6);
    const std::string family = p.choice("family", k == 2 ? "harmonic" : "quadratic", {"harmonic", "quadratic"});
    const double theta = p.num("theta", static_cast<double>(n - k) * kPi / 2.0);
    const bool corrupt = p.flag("corrupt", false);
    const double phi = cophase(theta, n, k);

    Expr f(0.0);
    if (family == "harmonic") {
        if (k != 2) throw InputError("tg_graph: the harmonic family needs k = 2");
        f = exp(var(0)) * cos(var(1)) + 0.5 * (var(0) * var(0) - var(1) * var(1));
    } else {
        std::vector<double> lam = p.list("lambdas", std::vector<double>(k - 1, 0.5));
        if (lam.size() != k - 1) throw InputError("tg_graph: 'lambdas' needs k - 1 entries");
        double angle = -phi;
        for (double l : lam) angle -= std::atan(l);
        if (std::abs(std::cos(angle)) < 1e-6) throw InputError("tg_graph: last eigenvalue would be infinite");
        lam.push_back(std::tan(angle));
        for (std::size_t a = 0; a < k; ++a) f += 0.5 * lam[a] * var(a) * var(a);
    }
    if (corrupt) f += 0.5 * var(0) * var(0);

    std::vector<Expr> map(n, Expr(0.0));
    for (std::size_t a = 0; a < k; ++a) map[a] = var(a);
    ExampleInstance e;
    e.description = "graph of df over flat R^k, Hess f satisfying the phase-twisted determinant equation";
    e.chart = Chart::make(k, n, map, Box{std::vector<double>(k, -1.0), std::vector<double>(k, 1.0)});
    e.mu = OneFormField::exact(f, k);
    e.theta = theta;
    e.sample_default = default_samples(e.chart, k == 1 ? 20 : 64);
    const Scalars fj({f}, k);
    e.hypotheses.push_back({"hessian_det_eq", [fj, k, phi](std::span<const double> u) {
                                const Jet2 j = fj(u)[0];
                                RealMatrix h(k, k);
                                for (std::size_t a = 0; a < k; ++a)
                                    for (std::size_t b = 0; b < k; ++b) h(a, b) = j.h(a, b);
                                const Complex d = std::polar(1.0, phi) * determinant(identity_plus_i(h));
                                return std::abs(d.imag()) / std::pow(1.0 + frobenius_norm(h), static_cast<double>(k));
                            }});
    return e;
}

inline ExampleInstance line_k1(Params& p) {
    const std::size_t n = p.integer("n", 3, 2, 6);
    const double theta = p.num("theta", wrap_angle(0.5 + static_cast<double>(n - 1) * kPi / 2.0));
    const double phi = cophase(theta, n, 1);
    if (std::abs(std::cos(phi)) < 1e-9) throw InputError("line_k1: cos φ must be nonzero");
    const double a = p.num("a", -std::tan(phi));
    const double b = p.num("b", 0.3);
    const bool corrupt = p.flag("corrupt", false);
    const double slope = corrupt ? a + 0.5 : a;

    std::vector<Expr> map(n, Expr(0.0));
    map[0] = var(0);
    ExampleInstance e;
    e.description = "straight line with the affine 1-form (a x + b) dx";
    e.chart = Chart::make(1, n, map, box({-2.0}, {2.0}));
    e.mu = OneFormField::make({slope * var(0) + b});
    e.theta = theta;
    e.sample_default = default_samples(e.chart, 20);
    e.hypotheses.push_back({"slope_eq", [slope, phi](std::span<const double>) { return std::abs(slope + std::tan(phi)); }});
    return e;
}

/// (1 + h_v²) F_uu + (1 + h_u²) F_vv − 2 h_u h_v F_uv.
inline double graph_operator(const Jet2& h, const Jet2& F) {
    const double hu = h.grad[0], hv = h.grad[1];
    return (1 + hv * hv) * F.h(0, 0) + (1 + hu * hu) * F.h(1, 1) - 2 * hu * hv * F.h(0, 1);
}

inline ExampleInstance minimal_graph_k2(Params& p) {
    // real harmonic functions on the helicoid: Re F(angle + i asinh r)
    const double c_angle = p.num("c_angle", 1.0);
    const double c_radial = p.num("c_radial", 0.0);
    const double c_exp = p.num("c_exp", 0.0);
    const bool corrupt = p.flag("corrupt", false);

    const Expr u = var(0), v = var(1);
    const Expr angle = atan2(v, u);
    const Expr s = asinh(sqrt(u * u + v * v));
    Expr h = angle;
    Expr f = c_angle * angle + c_radial * s + c_exp * exp(angle) * cos(s);
    if (corrupt) h = f = u * v;

    ExampleInstance e;
    e.description = "graph of h over a planar domain with μ = df, h and f solving the minimal surface and reduced Laplace equations";
    e.chart = Chart::make(2, 3, {u, v, h}, box({0.5, 0.5}, {2.0, 2.0}), {}, FiberBasis::hypersurface_cross);
    e.mu = OneFormField::exact(f, 2);
    e.theta = kPi / 2;
    e.sample_default = default_samples(e.chart, 200);
    const Scalars hf({h, f}, 2);
    e.hypotheses.push_back({"minimal_surface_eq", [hf](std::span<const double> x) {
                                const auto j = hf(x);
                                return std::abs(graph_operator(j[0], j[0]));
                            }});
    e.hypotheses.push_back({"reduced_laplace_eq", [hf](std::span<const double> x) {
                                const auto j = hf(x);
                                return std::abs(graph_operator(j[0], j[1]));
                            }});
    return e;
}

/// Helicoid (r cos t, r sin t, t) as a chart in (r, t).
inline std::array<Expr, 3> helicoid(const Expr& r, const Expr& t) { return {r * cos(t), r * sin(t), t}; }

inline ExampleInstance cylinder_thm41(Params& p) {
    // Σ: the helicoid with its axis tilted by c into the x⁰ direction; k = x⁰|Σ = c t
    const double c = p.num("c", 0.6, -0.95, 0.95);
    const double theta = p.num("theta", kPi / 2);
    const double alpha = p.num("lambda_harmonic", 1.0);
    const bool corrupt = p.flag("corrupt", false);
    const double phi = cophase(theta, 4, 3);
    if (std::abs(std::cos(phi)) < 1e-9) throw InputError("cylinder_thm41: cos φ must be nonzero");
    const double tphi = std::tan(phi), sphi = 1.0 / std::cos(phi);

    const Expr r = var(0), t = var(1), w = var(2);
    const auto hel = helicoid(r, t);
    const double tilt = std::sqrt(1 - c * c);
    const std::vector<Expr> sigma_map{c * t, hel[0], hel[1], tilt * t};
    const Box sigma_box = box({0.2, -1.0}, {1.5, 1.0});
    const Chart sigma = Chart::make(2, 4, sigma_map, sigma_box);

    // λ = dℓ + α dt with div λ = Δℓ = −|∇k|² tan φ, ℓ = −½ c² tan φ t²
    std::vector<Expr> lambda{Expr(0.0), alpha - c * c * tphi * t};
    if (corrupt) lambda = {Expr(1.0), alpha - c * c * tphi * t};

    const Expr K = c * t;      // π*k
    const Expr U = c * t + w;  // x⁰ on M
    std::vector<Expr> mu(3);
    const auto dUK = gradient(U * K, 3);
    const auto dU = gradient(U, 3);
    for (std::size_t a = 0; a < 3; ++a) {
        Expr lam = a < 2 ? lambda[a] : Expr(0.0);
        mu[a] = lam + sphi * dUK[a] - tphi * U * dU[a];
    }

    ExampleInstance e;
    e.description = "cylinder Σ + R e0 over a minimal surface Σ in R^4 transverse to e0, μ built from k = x0|Σ and λ";
    std::vector<Expr> map = sigma_map;
    map[0] = map[0] + w;
    e.chart = Chart::make(3, 4, map, box({0.2, -1.0, -1.0}, {1.5, 1.0, 1.0}));
    e.mu = OneFormField::make(mu);
    e.theta = theta;
    e.sample_default = default_samples(e.chart, 125);

    const Scalars lam_j(lambda, 2);
    const Scalars k_j({K}, 2);
    e.hypotheses.push_back({"sigma_minimal", [sigma](std::span<const double> x) {
                                return euclidean_minimality(sigma, pick(x, {0, 1}));
                            }});
    e.hypotheses.push_back({"lambda_closed", [lam_j](std::span<const double> x) { return closedness_2d(lam_j, pick(x, {0, 1})); }});
    e.hypotheses.push_back({"codifferential_eq", [sigma, lam_j, k_j, tphi](std::span<const double> x) {
                                const auto q = pick(x, {0, 1});
                                const FrameData f = frame_at(sigma, q);
                                const double div = divergence(f, lam_j(q));
                                return std::abs(div + gradient_norm2(f, k_j(q)[0]) * tphi);
                            }});
    return e;
}

inline ExampleInstance split_cylinder(Params& p) {
    const double theta = p.num("theta", 3 * kPi / 4);
    const double m0 = p.num("m0", 0.2);
    const double c_harm = p.num("c_harmonic", 1.0);
    const bool corrupt = p.flag("corrupt", false);
    const double phi = cophase(theta, 4, 3);
    if (std::abs(std::cos(phi)) < 1e-9) throw InputError("split_cylinder: cos φ must be nonzero");
    const double tphi = std::tan(phi);

    const Expr r = var(0), t = var(1), w = var(2);
    const auto hel = helicoid(r, t);
    const Chart sigma = Chart::make(2, 3, {hel[0], hel[1], hel[2]}, box({0.2, -1.0}, {1.5, 1.0}));
    // μ̌ = c dh with h the helicoid height; dr is closed but not co-closed
    std::vector<Expr> check{corrupt ? Expr(1.0) : Expr(0.0), Expr(c_harm)};
    const Expr m = m0 - tphi * w;

    ExampleInstance e;
    e.description = "product Σ x R of a minimal surface with a line, μ = harmonic 1-form on Σ plus m(t) dt with m' = -tan φ";
    e.chart = Chart::make(3, 4, {w, hel[0], hel[1], hel[2]}, box({0.2, -1.0, -1.0}, {1.5, 1.0, 1.0}));
    e.mu = OneFormField::make({check[0], check[1], m});
    e.theta = theta;
    e.sample_default = default_samples(e.chart, 125);

    const Scalars cj(check, 2);
    const Scalars mj({m}, 3);
    e.hypotheses.push_back({"sigma_minimal", [sigma](std::span<const double> x) {
                                return euclidean_minimality(sigma, pick(x, {0, 1}));
                            }});
    e.hypotheses.push_back({"harmonic_closed", [cj](std::span<const double> x) { return closedness_2d(cj, pick(x, {0, 1})); }});
    e.hypotheses.push_back({"harmonic_coclosed", [sigma, cj](std::span<const double> x) {
                                const auto q = pick(x, {0, 1});
                                return std::abs(divergence(frame_at(sigma, q), cj(q)));
                            }});
    e.hypotheses.push_back({"slope_eq", [mj, tphi](std::span<const double> x) { return std::abs(mj(x)[0].grad[2] + tphi); }});
    return e;
}

/// Clifford torus (cos a, sin a, cos b, sin b)/√2 in S³.
inline std::vector<Expr> clifford(const Expr& a, const Expr& b) {
    const double s = 1.0 / std::sqrt(2.0);
    return {s * cos(a), s * sin(a), s * cos(b), s * sin(b)};
}

inline ExampleInstance cone_eigenfunction(Params& p) {
    const auto c = p.list("c", {1.0, 0.0, 0.5, 0.0});
    if (c.size() != 4) throw InputError("cone_eigenfunction: 'c' needs 4 entries");
    const double oblique = p.num("oblique", 0.0);
    const bool corrupt = p.flag("corrupt", false);

    const Expr s = var(0), a = var(1), b = var(2);
    const auto y = clifford(a, b);
    Expr m(0.0);
    for (std::size_t i = 0; i < 4; ++i) m += c[i] * y[i];
    // also an eigenfunction: the flat metric is ½(da² + db²)
    m += oblique * cos(0.6 * a + 0.8 * b);
    if (corrupt) m += 0.5 * cos(a + b);

    const Expr ta = var(0), tb = var(1);
    const Chart sigma = Chart::make(2, 4, clifford(ta, tb), box({0.0, 0.0}, {1.5, 1.5}));
    const Expr m_sigma = substitute(m, {Expr(0.0), ta, tb});

    std::vector<Expr> map(4);
    for (std::size_t i = 0; i < 4; ++i) map[i] = s * y[i];
    ExampleInstance e;
    e.description = "cone over the Clifford torus with μ = d(m s), Δm = -2m on the torus";
    e.chart = Chart::make(3, 4, map, box({0.5, 0.0, 0.0}, {2.0, 1.5, 1.5}));
    e.mu = OneFormField::exact(m * s, 3);
    e.theta = kPi / 2;
    e.sample_default = default_samples(e.chart, 125);
    const Scalars mj({m_sigma}, 2);
    e.hypotheses.push_back({"sphere_minimal", [sigma](std::span<const double> x) {
                                return sphere_minimality(sigma, pick(x, {1, 2}));
                            }});
    e.hypotheses.push_back({"eigenfunction_eq", [sigma, mj](std::span<const double> x) {
                                return eigen_residual(sigma, mj, pick(x, {1, 2}));
                            }});
    return e;
}

/// w(a, b) from fourth-order integration of dw = β along the axis-parallel
/// path (a0, b0) → (a, b0) → (a, b) with a fixed number of steps per leg.
class PathIntegral {
public:
    PathIntegral(std::vector<Expr> beta, double a0, double b0, std::size_t steps)
        : prog_(std::make_shared<Program>(std::move(beta), 2)), a0_(a0), b0_(b0), steps_(steps) {
        if (prog_->size() % 2 != 0) throw InputError("PathIntegral: β needs both components");
        dim_ = prog_->size() / 2;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t steps() const noexcept { return steps_; }
    PathIntegral with_steps(std::size_t s) const {
        PathIntegral p = *this;
        p.steps_ = s;
        return p;
    }

    std::vector<double> value(double a, double b) const {
        std::vector<double> w(dim_, 0.0);
        leg(w, 0, a0_, a, b0_);
        leg(w, 1, b0_, b, a);
        return w;
    }

    /// ∫ β_axis along one coordinate line from `from` to `to`; `fixed` is the other coordinate.
    void leg(std::vector<double>& w, std::size_t axis, double from, double to, double fixed) const {
        if (from == to) return;
        const double h = (to - from) / static_cast<double>(steps_);
        auto rhs = [&](double s) {
            const double pt[2] = {axis == 0 ? s : fixed, axis == 0 ? fixed : s};
            const auto v = prog_->values(pt);
            return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(axis * dim_),
                                       v.begin() + static_cast<std::ptrdiff_t>((axis + 1) * dim_));
        };
        // RK4 for w' = β(s): the stages do not depend on w
        for (std::size_t i = 0; i < steps_; ++i) {
            const double s = from + h * static_cast<double>(i);
            const auto k1 = rhs(s);
            const auto k2 = rhs(s + h / 2);
            const auto k4 = rhs(s + h);
            for (std::size_t c = 0; c < dim_; ++c) w[c] += h / 6.0 * (k1[c] + 4.0 * k2[c] + k4[c]);
        }
    }

private:
    std::shared_ptr<const Program> prog_;
    double a0_ = 0.0, b0_ = 0.0;
    std::size_t steps_ = 1;
    std::size_t dim_ = 0;
};

inline ExampleInstance twisted_cone(Params& p) {
    const double f_alpha = p.num("f_alpha", std::atan2(-0.6, 0.8));
    const double f_phase = p.num("f_phase", 0.0);
    const double m_alpha = p.num("m_alpha", std::atan2(0.8, 0.6));
    const double m_phase = p.num("m_phase", 1.0);
    const bool corrupt = p.flag("corrupt", false);

    // on the Clifford torus Δ = 2(∂_a² + ∂_b²), so unit-frequency plane waves have Δ = -2
    const Expr a = var(0), b = var(1), t = var(2);
    const Expr f = cos(std::cos(f_alpha) * a + std::sin(f_alpha) * b + f_phase);
    const double mfreq = corrupt ? 1.5 : 1.0;
    const Expr m = cos(mfreq * (std::cos(m_alpha) * a + std::sin(m_alpha) * b) + m_phase);
    const auto y = clifford(a, b);

    // *da = db, *db = -da for the conformal metric; β = y(*df) - f(*dy)
    const Expr fa = diff(f, 0), fb = diff(f, 1);
    std::vector<Expr> beta(8);
    for (std::size_t i = 0; i < 4; ++i) {
        const Expr ya = diff(y[i], 0), yb = diff(y[i], 1);
        beta[i] = -y[i] * fb + f * yb;
        beta[4 + i] = y[i] * fa - f * ya;
    }

    const Box dom = box({0.2, 0.2, 0.5}, {1.4, 1.4, 2.0});
    const double a0 = dom.lo[0], b0 = dom.lo[1];
    // double the step count until w agrees with the doubled run to 1e-11 at probe points
    PathIntegral integ(beta, a0, b0, 8);
    const std::vector<std::array<double, 2>> probes{{dom.hi[0], dom.hi[1]}, {dom.hi[0], b0}, {a0, dom.hi[1]},
                                                    {(a0 + dom.hi[0]) / 2, (b0 + dom.hi[1]) / 2}};
    for (;;) {
        const PathIntegral fine = integ.with_steps(2 * integ.steps());
        double diffmax = 0.0;
        for (const auto& q : probes) {
            const auto w1 = integ.value(q[0], q[1]);
            const auto w2 = fine.value(q[0], q[1]);
            for (std::size_t i = 0; i < 4; ++i) diffmax = std::max(diffmax, std::abs(w1[i] - w2[i]));
        }
        integ = fine;
        if (diffmax < 1e-11) break;
        if (integ.steps() > (1u << 16)) throw ConvergenceError("twisted_cone: path integration did not converge");
    }
    auto shared = std::make_shared<const PathIntegral>(integ);

    std::vector<Expr> map(4);
    for (std::size_t i = 0; i < 4; ++i) {
        auto value = [shared, i](std::span<const double> u) { return shared->value(u[0], u[1])[i]; };
        const Expr w = custom("w" + std::to_string(i + 1), value, {beta[i], beta[4 + i], Expr(0.0)});
        map[i] = w + t * y[i];
    }

    // μ = m(*df) − f(*dm) + d(t m)
    const Expr ma = diff(m, 0), mb = diff(m, 1);
    std::vector<Expr> mu{-m * fb + f * mb + t * ma, m * fa - f * ma + t * mb, m};

    ExampleInstance e;
    e.description = "twisted cone w + t y over the Clifford torus y, dw = y(*df) - f(*dy), slope m with Δm = -2m";
    e.chart = Chart::make(3, 4, map, dom);
    e.mu = OneFormField::make(mu);
    e.theta = kPi / 2;
    e.sample_default = default_samples(e.chart, 125);

    // holonomy of dw around each period of the torus
    auto loop = [&](std::size_t axis, double fixed) {
        std::vector<double> w(4, 0.0);
        integ.with_steps(std::max<std::size_t>(integ.steps(), 256)).leg(w, axis, 0.0, 2 * kPi, fixed);
        double s = 0.0;
        for (double x : w) s += x * x;
        return std::sqrt(s);
    };
    e.measured["holonomy_a"] = loop(0, b0);
    e.measured["holonomy_b"] = loop(1, a0);
    e.measured["path_steps"] = static_cast<double>(integ.steps());

    const Expr ta = var(0), tb = var(1);
    const Chart sigma = Chart::make(2, 4, clifford(ta, tb), box({0.0, 0.0}, {1.5, 1.5}));
    const Scalars fj({f}, 2), mj({m}, 2);
    const auto beta_prog = std::make_shared<Program>(beta, 2);
    e.hypotheses.push_back({"sphere_minimal", [sigma](std::span<const double> x) {
                                return sphere_minimality(sigma, pick(x, {0, 1}));
                            }});
    e.hypotheses.push_back({"f_eigenfunction_eq", [sigma, fj](std::span<const double> x) {
                                return eigen_residual(sigma, fj, pick(x, {0, 1}));
                            }});
    e.hypotheses.push_back({"m_eigenfunction_eq", [sigma, mj](std::span<const double> x) {
                                return eigen_residual(sigma, mj, pick(x, {0, 1}));
                            }});
    e.hypotheses.push_back({"beta_closed", [beta_prog](std::span<const double> x) {
                                const auto j = beta_prog->jet2(pick(x, {0, 1}));
                                double r = 0.0;
                                for (std::size_t i = 0; i < 4; ++i) r = std::max(r, std::abs(j[4 + i].grad[0] - j[i].grad[1]));
                                return r;
                            }});
    e.hypotheses.push_back({"dw_consistency", [shared, beta_prog](std::span<const double> x) {
                                // fourth-order central differences of the integrated w against β
                                constexpr double h = 1e-3;
                                const double a = x[0], b = x[1];
                                const auto bv = beta_prog->values(pick(x, {0, 1}));
                                double r = 0.0;
                                for (std::size_t axis = 0; axis < 2; ++axis) {
                                    auto at = [&](double d) {
                                        return axis == 0 ? shared->value(a + d, b) : shared->value(a, b + d);
                                    };
                                    const auto m2 = at(-2 * h), m1 = at(-h), p1 = at(h), p2 = at(2 * h);
                                    for (std::size_t i = 0; i < 4; ++i) {
                                        const double d = (m2[i] - 8 * m1[i] + 8 * p1[i] - p2[i]) / (12 * h);
                                        r = std::max(r, std::abs(d - bv[axis * 4 + i]));
                                    }
                                }
                                return r;
                            }});
    return e;
}

inline ExampleInstance nonsplit_torus_cone(Params& p) {
    const double a = p.num("a", 1.0, 1e-3, 1e3);
    const auto c = p.list("c", {1.0, 0.0, 0.0, 0.0, 0.5});
    if (c.size() != 5) throw InputError("nonsplit_torus_cone: 'c' needs 5 entries");
    const bool corrupt = p.flag("corrupt", false);

    auto torus = [a](const Expr& t, const Expr& u) {
        return std::vector<Expr>{cos(t) * cos(a * u), cos(t) * sin(a * u), sin(t) * cos(u / a), sin(t) * sin(u / a)};
    };
    auto slope = [&](const Expr& t, const Expr& u) {
        Expr m = (c[0] * cos(a * u) + c[1] * sin(a * u)) * cos(t) + (c[2] * cos(u / a) + c[3] * sin(u / a)) * sin(t);
        if (corrupt) m += 0.5 * sin(2.0 * t);
        return m;
    };

    const Expr s = var(0), t = var(1), u = var(2);
    const auto y = torus(t, u);
    std::vector<Expr> map(4);
    for (std::size_t i = 0; i < 4; ++i) map[i] = s * y[i];
    auto mu = gradient(slope(t, u) * s, 3);
    mu[2] += c[4];

    ExampleInstance e;
    e.description = "cone over a minimal torus in S^3 with μ = d(m s) + c5 du";
    e.chart = Chart::make(3, 4, map, box({0.5, 0.2, 0.0}, {2.0, 1.3, 2.0}));
    e.mu = OneFormField::make(mu);
    e.theta = kPi / 2;
    e.sample_default = default_samples(e.chart, 125);

    const Expr tt = var(0), tu = var(1);
    const Chart sigma = Chart::make(2, 4, torus(tt, tu), box({0.2, 0.0}, {1.3, 2.0}));
    const Scalars mj({slope(tt, tu)}, 2);
    e.hypotheses.push_back({"sphere_minimal", [sigma](std::span<const double> x) {
                                return sphere_minimality(sigma, pick(x, {1, 2}));
                            }});
    e.hypotheses.push_back({"eigenfunction_eq", [sigma, mj](std::span<const double> x) {
                                return eigen_residual(sigma, mj, pick(x, {1, 2}));
                            }});
    // B10² / (|h| p³) with p = 1/s; the tangent frame starts with the ruling direction
    const Chart chart = e.chart;
    const OneFormField mu_f = e.mu;
    e.measures.push_back({"b10sq_over_hp3", [chart, mu_f](std::span<const double> x) {
                              const FrameData f = full_frame(chart, mu_f, x);
                              const double b10sq = f.B(0, 1) * f.B(0, 1) + f.B(0, 2) * f.B(0, 2);
                              const RealMatrix& A = f.A[0];
                              const double h = std::sqrt(std::abs(A(1, 1) * A(2, 2) - A(1, 2) * A(1, 2)));
                              const double pinv = x[0];
                              return b10sq * pinv * pinv * pinv / h;
                          }});
    return e;
}

} // namespace catalog_detail

/// Builds the example `id`; `params` is a JSON object (or null for defaults).
/// Every construction accepts "corrupt": true, which breaks one hypothesis.
inline ExampleInstance instantiate(const std::string& id, const nlohmann::json& params = nullptr) {
    using namespace catalog_detail;
    Params p(params, id);
    ExampleInstance e;
    if (id == "tg_graph") e = tg_graph(p);
    else if (id == "line_k1") e = line_k1(p);
    else if (id == "minimal_graph_k2") e = minimal_graph_k2(p);
    else if (id == "cylinder_thm41") e = cylinder_thm41(p);
    else if (id == "split_cylinder") e = split_cylinder(p);
    else if (id == "cone_eigenfunction") e = cone_eigenfunction(p);
    else if (id == "twisted_cone") e = twisted_cone(p);
    else if (id == "nonsplit_torus_cone") e = nonsplit_torus_cone(p);
    else throw InputError("unknown example '" + id + "'");
    e.id = id;
    e.params = p.finish();
    return e;
}

/// Evaluates every hypothesis of the instance on the sample set; pass iff all
/// residuals stay below `tolerance`.
inline CheckReport validate_inputs(const ExampleInstance& e, const SampleSpec& samples, unsigned threads = 0,
                                   double tolerance = kHypothesisTolerance) {
    samples.validate(e.chart.domain);
    const auto pts = samples.base_points();
    struct Slot {
        bool skipped = false;
        std::string reason;
        std::vector<double> res;
        std::vector<double> meas;
    };
    std::vector<Slot> slots(pts.size());
    parallel_for(pts.size(), threads, [&](std::size_t i) {
        auto& s = slots[i];
        try {
            for (const auto& h : e.hypotheses) s.res.push_back(h.residual(pts[i]));
            for (const auto& m : e.measures) s.meas.push_back(m.value(pts[i]));
        } catch (const GeometryError& ex) {
            s.skipped = true;
            s.reason = ex.what();
        } catch (const DomainError& ex) {
            s.skipped = true;
            s.reason = ex.what();
        }
    });

    CheckReport rep("validate_inputs:" + e.id);
    for (const auto& h : e.hypotheses) rep.condition(h.name, tolerance);
    std::vector<double> lo(e.measures.size(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(e.measures.size(), -std::numeric_limits<double>::infinity());
    std::size_t skipped = 0;
    std::string first_skip;
    for (const auto& s : slots) {
        if (s.skipped) {
            ++skipped;
            if (first_skip.empty()) first_skip = s.reason;
            continue;
        }
        for (std::size_t j = 0; j < s.res.size(); ++j) rep.record(e.hypotheses[j].name, s.res[j], tolerance);
        for (std::size_t j = 0; j < s.meas.size(); ++j) {
            lo[j] = std::min(lo[j], s.meas[j]);
            hi[j] = std::max(hi[j], s.meas[j]);
        }
    }
    rep.set_points(pts.size(), skipped);
    for (std::size_t j = 0; j < e.measures.size(); ++j) {
        rep.set_measured(e.measures[j].name + "_min", lo[j]);
        rep.set_measured(e.measures[j].name + "_max", hi[j]);
    }
    for (const auto& [k, v] : e.measured) rep.set_measured(k, v);
    rep.set_measured("theta", e.theta);
    if (!first_skip.empty()) rep.add_note("first skipped point: " + first_skip);
    return rep;
}

inline CheckReport validate_inputs(const ExampleInstance& e, unsigned threads = 0) {
    return validate_inputs(e, e.sample_default, threads);
}

} // namespace twaust
