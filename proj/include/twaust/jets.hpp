#pragma once

// Second-order forward-mode jets over an expression DAG.
//
// Expressions are immutable trees with shared subexpressions. A Program
// linearizes a set of root expressions once (post-order, each node visited
// once) and then evaluates values, 1-jets or 2-jets at a point by one pass
// over the tape. Symbolic differentiation and variable substitution work on
// the expressions themselves.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace twaust {

inline constexpr std::size_t kMaxJetParams = 6;
inline constexpr double kDenominatorGuard = 1e-13;

// ---------------------------------------------------------------------------
// Jet types

/// Value, gradient and symmetric Hessian with respect to p parameters.
struct Jet2 {
    double value = 0.0;
    std::size_t p = 0;
    std::array<double, kMaxJetParams> grad{};
    std::array<double, kMaxJetParams * kMaxJetParams> hess{};

    Jet2() = default;
    Jet2(double v, std::size_t params) : value(v), p(params) {}

    static Jet2 variable(double v, std::size_t params, std::size_t index) {
        Jet2 j(v, params);
        j.grad[index] = 1.0;
        return j;
    }

    double& h(std::size_t i, std::size_t j) { return hess[i * kMaxJetParams + j]; }
    double h(std::size_t i, std::size_t j) const { return hess[i * kMaxJetParams + j]; }
};

/// Dual number carrying first derivatives with respect to p parameters.
struct Jet1 {
    double v = 0.0;
    std::size_t p = 0;
    std::array<double, kMaxJetParams> d{};

    Jet1() = default;
    Jet1(double value) : v(value) {} // NOLINT: constants convert implicitly
    Jet1(double value, std::size_t params) : v(value), p(params) {}

    static Jet1 from(const Jet2& j) {
        Jet1 r(j.value, j.p);
        for (std::size_t i = 0; i < j.p; ++i) r.d[i] = j.grad[i];
        return r;
    }

    /// First derivative of the gradient entry `a` of a 2-jet.
    static Jet1 gradient_entry(const Jet2& j, std::size_t a) {
        Jet1 r(j.grad[a], j.p);
        for (std::size_t i = 0; i < j.p; ++i) r.d[i] = j.h(a, i);
        return r;
    }

    Jet1& operator+=(const Jet1& o) {
        v += o.v;
        widen(o);
        for (std::size_t i = 0; i < p; ++i) d[i] += o.d[i];
        return *this;
    }
    Jet1& operator-=(const Jet1& o) {
        v -= o.v;
        widen(o);
        for (std::size_t i = 0; i < p; ++i) d[i] -= o.d[i];
        return *this;
    }
    Jet1& operator*=(const Jet1& o) {
        widen(o);
        for (std::size_t i = 0; i < p; ++i) d[i] = d[i] * o.v + v * o.d[i];
        v *= o.v;
        return *this;
    }
    Jet1& operator/=(const Jet1& o) {
        widen(o);
        const double inv = 1.0 / o.v;
        for (std::size_t i = 0; i < p; ++i) d[i] = (d[i] - v * inv * o.d[i]) * inv;
        v *= inv;
        return *this;
    }

    friend Jet1 operator+(Jet1 a, const Jet1& b) { return a += b; }
    friend Jet1 operator-(Jet1 a, const Jet1& b) { return a -= b; }
    friend Jet1 operator*(Jet1 a, const Jet1& b) { return a *= b; }
    friend Jet1 operator/(Jet1 a, const Jet1& b) { return a /= b; }
    friend Jet1 operator-(Jet1 a) {
        a.v = -a.v;
        for (std::size_t i = 0; i < a.p; ++i) a.d[i] = -a.d[i];
        return a;
    }
    friend bool operator==(const Jet1& a, const Jet1& b) {
        if (a.v != b.v) return false;
        for (std::size_t i = 0; i < std::max(a.p, b.p); ++i)
            if (a.d[i] != b.d[i]) return false;
        return true;
    }

private:
    // constants have p == 0 and zero derivatives, so widening is free
    void widen(const Jet1& o) { p = std::max(p, o.p); }
};

inline Jet1 sqrt(const Jet1& x) {
    Jet1 r(std::sqrt(x.v), x.p);
    const double f = 0.5 / r.v;
    for (std::size_t i = 0; i < x.p; ++i) r.d[i] = f * x.d[i];
    return r;
}

inline double pivot_magnitude(const Jet1& x) { return std::abs(x.v); }
inline bool is_finite_scalar(const Jet1& x) {
    if (!std::isfinite(x.v)) return false;
    for (std::size_t i = 0; i < x.p; ++i)
        if (!std::isfinite(x.d[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Expressions

enum class Op : std::uint8_t {
    constant, variable, add, sub, mul, div, neg,
    sin, cos, tan, atan2, asin, asinh, sqrt, exp, log, pow, custom
};

class Expr;
struct CustomFunction;

struct Node {
    Op op = Op::constant;
    double c = 0.0;          // constant value, or exponent for pow
    std::size_t var = 0;     // variable index
    std::shared_ptr<const Node> a, b;
    std::shared_ptr<const CustomFunction> fn;
};

class Expr {
public:
    Expr() : Expr(0.0) {}
    Expr(double c) { // NOLINT: numeric literals become constants
        auto n = std::make_shared<Node>();
        n->op = Op::constant;
        n->c = c;
        node_ = std::move(n);
    }
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    static Expr var(std::size_t i) {
        auto n = std::make_shared<Node>();
        n->op = Op::variable;
        n->var = i;
        return Expr(std::move(n));
    }

    const Node& node() const { return *node_; }
    const std::shared_ptr<const Node>& ptr() const { return node_; }
    Op op() const { return node_->op; }
    bool is_constant() const { return node_->op == Op::constant; }
    bool is_constant(double c) const { return is_constant() && node_->c == c; }
    double constant_value() const { return node_->c; }

private:
    std::shared_ptr<const Node> node_;
};

class Program;

/// Scalar function supplied numerically (e.g. by quadrature) together with its
/// gradient as expressions. Its second derivatives are the first derivatives of
/// those gradient expressions.
struct CustomFunction {
    std::string name;
    std::function<double(std::span<const double>)> value;
    std::vector<Expr> gradient;
    std::shared_ptr<const Program> gradient_program;
};

namespace detail {

inline Expr make(Op op, const Expr& a, const Expr& b = Expr(), double c = 0.0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = a.ptr();
    if (op == Op::add || op == Op::sub || op == Op::mul || op == Op::div || op == Op::atan2) n->b = b.ptr();
    n->c = c;
    return Expr(std::move(n));
}

} // namespace detail

inline Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return a.constant_value() + b.constant_value();
    if (a.is_constant(0.0)) return b;
    if (b.is_constant(0.0)) return a;
    return detail::make(Op::add, a, b);
}
inline Expr operator-(const Expr& a) {
    if (a.is_constant()) return -a.constant_value();
    if (a.op() == Op::neg) return Expr(a.node().a);
    return detail::make(Op::neg, a);
}
inline Expr operator-(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return a.constant_value() - b.constant_value();
    if (b.is_constant(0.0)) return a;
    if (a.is_constant(0.0)) return -b;
    return detail::make(Op::sub, a, b);
}
inline Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return a.constant_value() * b.constant_value();
    if (a.is_constant(0.0) || b.is_constant(0.0)) return 0.0;
    if (a.is_constant(1.0)) return b;
    if (b.is_constant(1.0)) return a;
    return detail::make(Op::mul, a, b);
}
inline Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_constant(1.0)) return a;
    if (a.is_constant(0.0) && !b.is_constant(0.0)) return 0.0;
    return detail::make(Op::div, a, b);
}
inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

inline Expr sin(const Expr& x) { return detail::make(Op::sin, x); }
inline Expr cos(const Expr& x) { return detail::make(Op::cos, x); }
inline Expr tan(const Expr& x) { return detail::make(Op::tan, x); }
inline Expr atan2(const Expr& y, const Expr& x) { return detail::make(Op::atan2, y, x); }
inline Expr asin(const Expr& x) { return detail::make(Op::asin, x); }
inline Expr asinh(const Expr& x) { return detail::make(Op::asinh, x); }
inline Expr sqrt(const Expr& x) { return detail::make(Op::sqrt, x); }
inline Expr exp(const Expr& x) { return detail::make(Op::exp, x); }
inline Expr log(const Expr& x) { return detail::make(Op::log, x); }
inline Expr pow(const Expr& x, double e) {
    if (e == 0.0) return 1.0;
    if (e == 1.0) return x;
    return detail::make(Op::pow, x, Expr(), e);
}
inline Expr square(const Expr& x) { return x * x; }

/// Wraps a numerically supplied function into an expression node.
inline Expr custom(std::string name, std::function<double(std::span<const double>)> value, std::vector<Expr> gradient);

// ---------------------------------------------------------------------------
// Compiled evaluation

namespace detail {

inline bool is_integer(double e) { return std::floor(e) == e; }

/// Applies a scalar function with derivatives f1, f2 to a jet.
inline Jet2 chain1(const Jet2& x, double f0, double f1, double f2) {
    Jet2 r(f0, x.p);
    for (std::size_t i = 0; i < x.p; ++i) r.grad[i] = f1 * x.grad[i];
    for (std::size_t i = 0; i < x.p; ++i)
        for (std::size_t j = i; j < x.p; ++j) r.h(i, j) = r.h(j, i) = f1 * x.h(i, j) + f2 * x.grad[i] * x.grad[j];
    return r;
}

/// Scalar value and first two derivatives of a unary primitive.
struct Unary {
    double f0, f1, f2;
};

inline Unary unary(Op op, double x, double c) {
    switch (op) {
    case Op::neg: return {-x, -1.0, 0.0};
    case Op::sin: return {std::sin(x), std::cos(x), -std::sin(x)};
    case Op::cos: return {std::cos(x), -std::sin(x), -std::cos(x)};
    case Op::tan: {
        if (std::abs(std::cos(x)) <= kDenominatorGuard) throw DomainError("tan", "argument at a pole");
        const double t = std::tan(x);
        const double s = 1.0 + t * t;
        return {t, s, 2.0 * t * s};
    }
    case Op::asin: {
        if (!(std::abs(x) < 1.0)) throw DomainError("asin", "argument outside (-1, 1)");
        const double q = 1.0 - x * x;
        const double r = std::sqrt(q);
        return {std::asin(x), 1.0 / r, x / (q * r)};
    }
    case Op::asinh: {
        const double q = 1.0 + x * x;
        const double r = std::sqrt(q);
        return {std::asinh(x), 1.0 / r, -x / (q * r)};
    }
    case Op::sqrt: {
        if (!(x > 0.0)) throw DomainError("sqrt", "argument not positive");
        const double r = std::sqrt(x);
        return {r, 0.5 / r, -0.25 / (x * r)};
    }
    case Op::exp: {
        const double e = std::exp(x);
        return {e, e, e};
    }
    case Op::log: {
        if (!(x > 0.0)) throw DomainError("log", "argument not positive");
        return {std::log(x), 1.0 / x, -1.0 / (x * x)};
    }
    case Op::pow: {
        if (!is_integer(c) && !(x > 0.0)) throw DomainError("pow", "non-integer power of a non-positive base");
        if (c < 0.0 && std::abs(x) <= kDenominatorGuard) throw DomainError("pow", "negative power at zero");
        const double f0 = std::pow(x, c);
        const double f1 = c == 1.0 ? 1.0 : c * std::pow(x, c - 1.0);
        const double f2 = (c == 1.0 || c == 0.0) ? 0.0 : c * (c - 1.0) * std::pow(x, c - 2.0);
        return {f0, f1, f2};
    }
    default: throw InputError("unary: not a unary op");
    }
}

inline double atan2_partials(double y, double x, double& fy, double& fx, double& fyy, double& fxx, double& fxy) {
    const double r2 = x * x + y * y;
    if (r2 <= kDenominatorGuard * kDenominatorGuard) throw DomainError("atan2", "evaluated at the origin");
    const double r4 = r2 * r2;
    fy = x / r2;
    fx = -y / r2;
    fyy = -2.0 * x * y / r4;
    fxx = 2.0 * x * y / r4;
    fxy = (y * y - x * x) / r4;
    return std::atan2(y, x);
}

} // namespace detail

/// Linearized evaluation tape for a fixed set of root expressions.
class Program {
public:
    Program() = default;

    Program(std::vector<Expr> roots, std::size_t params) : roots_(std::move(roots)), params_(params) {
        if (params_ > kMaxJetParams) throw InputError("Program: too many parameters for jet evaluation");
        std::unordered_map<const Node*, std::size_t> slot;
        for (const auto& r : roots_) root_slots_.push_back(linearize(r.ptr(), slot));
    }

    std::size_t params() const noexcept { return params_; }
    std::size_t size() const noexcept { return root_slots_.size(); }
    const std::vector<Expr>& roots() const noexcept { return roots_; }

    std::vector<double> values(std::span<const double> u) const {
        check_point(u);
        std::vector<double> s(tape_.size());
        for (std::size_t k = 0; k < tape_.size(); ++k) {
            const Instr& in = tape_[k];
            const double a = in.a != kNone ? s[in.a] : 0.0;
            const double b = in.b != kNone ? s[in.b] : 0.0;
            switch (in.op) {
            case Op::constant: s[k] = in.c; break;
            case Op::variable: s[k] = u[in.var]; break;
            case Op::add: s[k] = a + b; break;
            case Op::sub: s[k] = a - b; break;
            case Op::mul: s[k] = a * b; break;
            case Op::div:
                if (std::abs(b) <= kDenominatorGuard) throw DomainError("div", "denominator below guard");
                s[k] = a / b;
                break;
            case Op::atan2: {
                double fy, fx, fyy, fxx, fxy;
                s[k] = detail::atan2_partials(a, b, fy, fx, fyy, fxx, fxy);
                break;
            }
            case Op::custom: s[k] = in.fn->value(u); break;
            default: s[k] = detail::unary(in.op, a, in.c).f0; break;
            }
        }
        std::vector<double> out;
        out.reserve(root_slots_.size());
        for (auto r : root_slots_) out.push_back(s[r]);
        return out;
    }

    std::vector<Jet2> jet2(std::span<const double> u) const {
        check_point(u);
        const std::size_t p = params_;
        std::vector<Jet2> s(tape_.size());
        for (std::size_t k = 0; k < tape_.size(); ++k) {
            const Instr& in = tape_[k];
            Jet2& r = s[k];
            switch (in.op) {
            case Op::constant: r = Jet2(in.c, p); break;
            case Op::variable: r = Jet2::variable(u[in.var], p, in.var); break;
            case Op::add:
            case Op::sub: {
                const Jet2& a = s[in.a];
                const Jet2& b = s[in.b];
                const double sg = in.op == Op::add ? 1.0 : -1.0;
                r = Jet2(a.value + sg * b.value, p);
                for (std::size_t i = 0; i < p; ++i) r.grad[i] = a.grad[i] + sg * b.grad[i];
                for (std::size_t i = 0; i < p; ++i)
                    for (std::size_t j = 0; j < p; ++j) r.h(i, j) = a.h(i, j) + sg * b.h(i, j);
                break;
            }
            case Op::mul: r = multiply(s[in.a], s[in.b]); break;
            case Op::div: {
                const Jet2& b = s[in.b];
                if (std::abs(b.value) <= kDenominatorGuard) throw DomainError("div", "denominator below guard");
                const double inv = 1.0 / b.value;
                r = multiply(s[in.a], detail::chain1(b, inv, -inv * inv, 2.0 * inv * inv * inv));
                break;
            }
            case Op::atan2: {
                const Jet2& y = s[in.a];
                const Jet2& x = s[in.b];
                double fy, fx, fyy, fxx, fxy;
                r = Jet2(detail::atan2_partials(y.value, x.value, fy, fx, fyy, fxx, fxy), p);
                for (std::size_t i = 0; i < p; ++i) r.grad[i] = fy * y.grad[i] + fx * x.grad[i];
                for (std::size_t i = 0; i < p; ++i)
                    for (std::size_t j = i; j < p; ++j)
                        r.h(i, j) = r.h(j, i) = fy * y.h(i, j) + fx * x.h(i, j) + fyy * y.grad[i] * y.grad[j] +
                                    fxx * x.grad[i] * x.grad[j] + fxy * (y.grad[i] * x.grad[j] + x.grad[i] * y.grad[j]);
                break;
            }
            case Op::custom: {
                r = Jet2(in.fn->value(u), p);
                const auto g = in.fn->gradient_program->jet2(u);
                for (std::size_t i = 0; i < p; ++i) {
                    r.grad[i] = g[i].value;
                    for (std::size_t j = 0; j < p; ++j) r.h(i, j) = 0.5 * (g[i].grad[j] + g[j].grad[i]);
                }
                break;
            }
            default: {
                const Jet2& a = s[in.a];
                const auto f = detail::unary(in.op, a.value, in.c);
                r = detail::chain1(a, f.f0, f.f1, f.f2);
                break;
            }
            }
        }
        std::vector<Jet2> out;
        out.reserve(root_slots_.size());
        for (auto r : root_slots_) out.push_back(s[r]);
        return out;
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    struct Instr {
        Op op;
        double c;
        std::size_t var;
        std::size_t a;
        std::size_t b;
        const CustomFunction* fn;
    };

    static Jet2 multiply(const Jet2& a, const Jet2& b) {
        const std::size_t p = std::max(a.p, b.p);
        Jet2 r(a.value * b.value, p);
        for (std::size_t i = 0; i < p; ++i) r.grad[i] = a.value * b.grad[i] + b.value * a.grad[i];
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j)
                r.h(i, j) = r.h(j, i) =
                    a.value * b.h(i, j) + b.value * a.h(i, j) + a.grad[i] * b.grad[j] + b.grad[i] * a.grad[j];
        return r;
    }

    void check_point(std::span<const double> u) const {
        if (u.size() != params_) throw InputError("Program: point has wrong dimension");
        for (double x : u)
            if (!std::isfinite(x)) throw InputError("Program: non-finite point");
    }

    std::size_t linearize(const std::shared_ptr<const Node>& n, std::unordered_map<const Node*, std::size_t>& slot) {
        if (auto it = slot.find(n.get()); it != slot.end()) return it->second;
        Instr in{n->op, n->c, n->var, kNone, kNone, n->fn.get()};
        if (n->op == Op::variable && n->var >= params_) throw InputError("Program: variable index out of range");
        if (n->op == Op::custom) {
            if (n->fn->gradient.size() != params_) throw InputError("Program: custom gradient has wrong length");
        }
        if (n->a) in.a = linearize(n->a, slot);
        if (n->b) in.b = linearize(n->b, slot);
        tape_.push_back(in);
        slot.emplace(n.get(), tape_.size() - 1);
        return tape_.size() - 1;
    }

    std::vector<Expr> roots_;
    std::size_t params_ = 0;
    std::vector<Instr> tape_;
    std::vector<std::size_t> root_slots_;
};

inline Expr custom(std::string name, std::function<double(std::span<const double>)> value, std::vector<Expr> gradient) {
    auto fn = std::make_shared<CustomFunction>();
    fn->name = std::move(name);
    fn->value = std::move(value);
    const std::size_t p = gradient.size();
    fn->gradient = std::move(gradient);
    fn->gradient_program = std::make_shared<Program>(fn->gradient, p);
    auto n = std::make_shared<Node>();
    n->op = Op::custom;
    n->fn = std::move(fn);
    return Expr(std::move(n));
}

inline Jet2 eval_jet2(const Expr& e, std::span<const double> u) {
    return Program({e}, u.size()).jet2(u)[0];
}

inline std::vector<Jet2> eval_map_jet2(const std::vector<Expr>& exprs, std::span<const double> u) {
    return Program(exprs, u.size()).jet2(u);
}

inline double eval_value(const Expr& e, std::span<const double> u) {
    return Program({e}, u.size()).values(u)[0];
}

// ---------------------------------------------------------------------------
// Symbolic operations

namespace detail {

inline Expr diff_node(const Expr& e, std::size_t i, std::unordered_map<const Node*, Expr>& memo) {
    const Node& n = e.node();
    if (auto it = memo.find(&n); it != memo.end()) return it->second;
    const Expr a = n.a ? Expr(n.a) : Expr();
    const Expr b = n.b ? Expr(n.b) : Expr();
    auto da = [&] { return diff_node(a, i, memo); };
    auto db = [&] { return diff_node(b, i, memo); };
    Expr d;
    switch (n.op) {
    case Op::constant: d = 0.0; break;
    case Op::variable: d = n.var == i ? 1.0 : 0.0; break;
    case Op::add: d = da() + db(); break;
    case Op::sub: d = da() - db(); break;
    case Op::neg: d = -da(); break;
    case Op::mul: d = da() * b + a * db(); break;
    case Op::div: d = (da() * b - a * db()) / (b * b); break;
    case Op::sin: d = cos(a) * da(); break;
    case Op::cos: d = -(sin(a) * da()); break;
    case Op::tan: d = (1.0 + e * e) * da(); break;
    case Op::atan2: d = (b * da() - a * db()) / (a * a + b * b); break;
    case Op::asin: d = da() / sqrt(1.0 - a * a); break;
    case Op::asinh: d = da() / sqrt(1.0 + a * a); break;
    case Op::sqrt: d = da() / (2.0 * e); break;
    case Op::exp: d = e * da(); break;
    case Op::log: d = da() / a; break;
    case Op::pow: d = n.c * pow(a, n.c - 1.0) * da(); break;
    case Op::custom: d = n.fn->gradient.at(i); break;
    }
    memo.emplace(&n, d);
    return d;
}

inline Expr substitute_node(const Expr& e, const std::vector<Expr>& repl, std::unordered_map<const Node*, Expr>& memo) {
    const Node& n = e.node();
    if (auto it = memo.find(&n); it != memo.end()) return it->second;
    auto sa = [&] { return substitute_node(Expr(n.a), repl, memo); };
    auto sb = [&] { return substitute_node(Expr(n.b), repl, memo); };
    Expr r;
    switch (n.op) {
    case Op::constant: r = e; break;
    case Op::variable:
        if (n.var >= repl.size()) throw InputError("substitute: variable without replacement");
        r = repl[n.var];
        break;
    case Op::add: r = sa() + sb(); break;
    case Op::sub: r = sa() - sb(); break;
    case Op::neg: r = -sa(); break;
    case Op::mul: r = sa() * sb(); break;
    case Op::div: r = sa() / sb(); break;
    case Op::sin: r = sin(sa()); break;
    case Op::cos: r = cos(sa()); break;
    case Op::tan: r = tan(sa()); break;
    case Op::atan2: r = atan2(sa(), sb()); break;
    case Op::asin: r = asin(sa()); break;
    case Op::asinh: r = asinh(sa()); break;
    case Op::sqrt: r = sqrt(sa()); break;
    case Op::exp: r = exp(sa()); break;
    case Op::log: r = log(sa()); break;
    case Op::pow: r = pow(sa(), n.c); break;
    case Op::custom: throw InputError("substitute: custom nodes cannot be reparametrized");
    }
    memo.emplace(&n, r);
    return r;
}

} // namespace detail

/// Partial derivative with respect to parameter i, as a new expression.
inline Expr diff(const Expr& e, std::size_t i) {
    std::unordered_map<const Node*, Expr> memo;
    return detail::diff_node(e, i, memo);
}

inline std::vector<Expr> gradient(const Expr& e, std::size_t params) {
    std::vector<Expr> g;
    for (std::size_t i = 0; i < params; ++i) g.push_back(diff(e, i));
    return g;
}

/// Replaces each variable u_i by repl[i].
inline Expr substitute(const Expr& e, const std::vector<Expr>& repl) {
    std::unordered_map<const Node*, Expr> memo;
    return detail::substitute_node(e, repl, memo);
}

inline std::vector<Expr> substitute(const std::vector<Expr>& es, const std::vector<Expr>& repl) {
    std::unordered_map<const Node*, Expr> memo;
    std::vector<Expr> out;
    for (const auto& e : es) out.push_back(detail::substitute_node(e, repl, memo));
    return out;
}

/// Chain rule on jets: outer is a 2-jet in q variables evaluated at the values
/// of the q inner 2-jets, which share p parameters.
inline Jet2 compose(const Jet2& outer, const std::vector<Jet2>& inner) {
    if (inner.size() != outer.p) throw InputError("compose: inner count must match outer parameter count");
    const std::size_t p = inner.empty() ? 0 : inner[0].p;
    Jet2 r(outer.value, p);
    for (std::size_t q = 0; q < inner.size(); ++q) {
        for (std::size_t a = 0; a < p; ++a) r.grad[a] += outer.grad[q] * inner[q].grad[a];
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) r.h(a, b) += outer.grad[q] * inner[q].h(a, b);
    }
    for (std::size_t q = 0; q < inner.size(); ++q)
        for (std::size_t s = 0; s < inner.size(); ++s)
            for (std::size_t a = 0; a < p; ++a)
                for (std::size_t b = 0; b < p; ++b) r.h(a, b) += outer.h(q, s) * inner[q].grad[a] * inner[s].grad[b];
    return r;
}

} // namespace twaust
