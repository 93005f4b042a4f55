#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <twaust/jets.hpp>
#include <twaust/random.hpp>

using namespace twaust;

namespace {

const Expr u = Expr::var(0);
const Expr v = Expr::var(1);

double fd_grad(const Expr& e, std::vector<double> x, std::size_t i, double h = 1e-5) {
    auto xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    return (eval_value(e, xp) - eval_value(e, xm)) / (2 * h);
}

double fd_hess(const Expr& e, std::vector<double> x, std::size_t i, std::size_t j, double h = 1e-4) {
    auto at = [&](double di, double dj) {
        auto y = x;
        y[i] += di;
        y[j] += dj;
        return eval_value(e, y);
    };
    return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

} // namespace

TEST(Jet2, ProductRule) {
    const std::vector<double> x{2.0, 3.0};
    const auto j = eval_jet2(u * v, x);
    EXPECT_DOUBLE_EQ(j.value, 6.0);
    EXPECT_DOUBLE_EQ(j.grad[0], 3.0);
    EXPECT_DOUBLE_EQ(j.grad[1], 2.0);
    EXPECT_DOUBLE_EQ(j.h(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(j.h(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(j.h(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(j.h(1, 1), 0.0);
}

TEST(Jet2, ArctanOfQuotient) {
    const std::vector<double> x{1.0, 1.0};
    for (const Expr& e : {atan2(v, u), Expr(0.0) + atan2(v * 1.0, u)}) {
        const auto j = eval_jet2(e, x);
        EXPECT_NEAR(j.value, std::numbers::pi / 4, 1e-15);
        EXPECT_NEAR(j.grad[0], -0.5, 1e-15);
        EXPECT_NEAR(j.grad[1], 0.5, 1e-15);
        // d2/du2 atan(v/u) = 2uv/(u^2+v^2)^2
        EXPECT_NEAR(j.h(0, 0), 0.5, 1e-15);
        EXPECT_NEAR(j.h(1, 1), -0.5, 1e-15);
        EXPECT_NEAR(j.h(0, 1), 0.0, 1e-15);
    }
}

TEST(Jet2, SinAtZero) {
    const std::vector<double> x{0.0};
    const auto j = eval_jet2(sin(u), x);
    EXPECT_DOUBLE_EQ(j.value, 0.0);
    EXPECT_DOUBLE_EQ(j.grad[0], 1.0);
    EXPECT_DOUBLE_EQ(j.h(0, 0), 0.0);
}

TEST(Jet2, MapEvaluation) {
    const std::vector<double> x{1.0, 2.0};
    const auto id = eval_map_jet2({u, v}, x);
    EXPECT_EQ(id[0].value, 1.0);
    EXPECT_EQ(id[1].value, 2.0);
    EXPECT_EQ(id[0].grad[0], 1.0);
    EXPECT_EQ(id[0].grad[1], 0.0);
    EXPECT_EQ(id[1].grad[1], 1.0);
    for (const auto& j : id)
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) EXPECT_EQ(j.h(a, b), 0.0);

    const std::vector<double> y{1.0, 1.0};
    const auto heli = eval_map_jet2({u, v, atan2(v, u)}, y);
    EXPECT_NEAR(heli[2].grad[0], -0.5, 1e-15);
    EXPECT_NEAR(heli[2].grad[1], 0.5, 1e-15);

    const auto c = eval_map_jet2({Expr(3.0), Expr(-1.0)}, y);
    for (const auto& j : c) {
        EXPECT_EQ(j.grad[0], 0.0);
        EXPECT_EQ(j.grad[1], 0.0);
        EXPECT_EQ(j.h(0, 1), 0.0);
    }
}

TEST(Jet2, DomainErrorsNamePrimitive) {
    const std::vector<double> origin{0.0, 0.0};
    try {
        eval_jet2(atan2(v, u), origin);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.primitive(), "atan2");
    }
    const std::vector<double> two{2.0, 0.0};
    try {
        eval_jet2(asin(u), two);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_EQ(e.primitive(), "asin");
    }
    EXPECT_THROW(eval_jet2(sqrt(v), two), DomainError);
    EXPECT_THROW(eval_jet2(log(v), two), DomainError);
    EXPECT_THROW(eval_jet2(u / v, two), DomainError);
    EXPECT_THROW(eval_value(u / v, two), DomainError);
    EXPECT_THROW(eval_jet2(pow(v - 1.0, 0.5), two), DomainError);
    EXPECT_NO_THROW(eval_jet2(pow(v - 1.0, 3.0), two));
    const std::vector<double> pole{std::numbers::pi / 2, 0.0};
    EXPECT_THROW(eval_jet2(tan(u), pole), DomainError);
}

TEST(Jet2, RejectsBadPoints) {
    const std::vector<double> one{1.0};
    EXPECT_THROW(eval_jet2(v, one), InputError);
    const std::vector<double> bad{std::nan(""), 1.0};
    EXPECT_THROW(eval_jet2(u, bad), InputError);
}

TEST(Jet2, AgreesWithFiniteDifferences) {
    const Expr w = Expr::var(2);
    const std::vector<Expr> exprs{
        sin(u * v) + cos(w) * exp(0.3 * u),
        atan2(v, u) * sqrt(1.0 + u * u + w * w),
        log(2.0 + sin(u)) / (1.5 + cos(v * w)),
        asin(0.4 * sin(u + v)) + tan(0.3 * w),
        pow(1.0 + u * u, 1.5) - pow(v, 3.0) + asinh(u * w),
    };
    Rng rng(77);
    for (int trial = 0; trial < 40; ++trial) {
        const std::vector<double> x{rng.uniform(0.3, 2.0), rng.uniform(0.3, 2.0), rng.uniform(-1.0, 1.0)};
        for (const auto& e : exprs) {
            const auto j = eval_jet2(e, x);
            EXPECT_NEAR(j.value, eval_value(e, x), 1e-14);
            for (std::size_t a = 0; a < 3; ++a) {
                EXPECT_NEAR(j.grad[a], fd_grad(e, x, a), 1e-6);
                for (std::size_t b = 0; b < 3; ++b) {
                    EXPECT_NEAR(j.h(a, b), fd_hess(e, x, a, b), 1e-4);
                    EXPECT_DOUBLE_EQ(j.h(a, b), j.h(b, a));
                }
            }
        }
    }
}

TEST(Jet2, ChainRuleMatchesComposedExpression) {
    // outer f(p, q) and inner (g1(u, v), g2(u, v))
    const Expr f = sin(u) * v + atan2(v, u + 3.0);
    const std::vector<Expr> g{u * u + v, cos(u) * exp(v)};
    const Expr composed = substitute(f, g);
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::vector<double> x{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const auto inner = eval_map_jet2(g, x);
        const std::vector<double> mid{inner[0].value, inner[1].value};
        const auto outer = eval_jet2(f, mid);
        const auto viaChain = compose(outer, inner);
        const auto direct = eval_jet2(composed, x);
        EXPECT_NEAR(viaChain.value, direct.value, 1e-12);
        for (std::size_t a = 0; a < 2; ++a) {
            EXPECT_NEAR(viaChain.grad[a], direct.grad[a], 1e-12);
            for (std::size_t b = 0; b < 2; ++b) EXPECT_NEAR(viaChain.h(a, b), direct.h(a, b), 1e-12);
        }
    }
}

TEST(SymbolicDiff, MatchesJetGradient) {
    const Expr e = atan2(v, u) * sin(u * v) + pow(u, 2.5) / (1.0 + v * v);
    const Expr eu = diff(e, 0);
    const Expr ev = diff(e, 1);
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::vector<double> x{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
        const auto j = eval_jet2(e, x);
        const auto ju = eval_jet2(eu, x);
        const auto jv = eval_jet2(ev, x);
        EXPECT_NEAR(ju.value, j.grad[0], 1e-12);
        EXPECT_NEAR(jv.value, j.grad[1], 1e-12);
        EXPECT_NEAR(ju.grad[1], j.h(0, 1), 1e-11);
        EXPECT_NEAR(jv.grad[0], j.h(1, 0), 1e-11);
        EXPECT_NEAR(ju.grad[0], j.h(0, 0), 1e-11);
    }
}

TEST(CustomNode, UsesSuppliedGradient) {
    // F(u, v) = u^2 v supplied numerically with its gradient as expressions
    const Expr F = custom("F", [](std::span<const double> x) { return x[0] * x[0] * x[1]; }, {2.0 * u * v, u * u});
    const std::vector<double> x{1.5, -0.5};
    const auto j = eval_jet2(F * F, x);
    const auto ref = eval_jet2(square(u * u * v), x);
    EXPECT_NEAR(j.value, ref.value, 1e-14);
    for (std::size_t a = 0; a < 2; ++a) {
        EXPECT_NEAR(j.grad[a], ref.grad[a], 1e-13);
        for (std::size_t b = 0; b < 2; ++b) EXPECT_NEAR(j.h(a, b), ref.h(a, b), 1e-13);
    }
    EXPECT_NEAR(eval_value(diff(F, 0), x), 2.0 * 1.5 * -0.5, 1e-15);
}

TEST(Jet1, ArithmeticAndSqrt) {
    Jet1 a(2.0, 2), b(3.0, 2);
    a.d[0] = 1.0;
    b.d[1] = 1.0;
    const Jet1 q = sqrt(a * b) / (a + 1.0);
    const double val = std::sqrt(6.0) / 3.0;
    EXPECT_NEAR(q.v, val, 1e-15);
    // d/da sqrt(ab)/(a+1) = (b/(2 sqrt(ab)))/(a+1) - sqrt(ab)/(a+1)^2
    EXPECT_NEAR(q.d[0], 3.0 / (2.0 * std::sqrt(6.0)) / 3.0 - std::sqrt(6.0) / 9.0, 1e-15);
    EXPECT_NEAR(q.d[1], 2.0 / (2.0 * std::sqrt(6.0)) / 3.0, 1e-15);
}

TEST(Program, SharedSubexpressionsEvaluatedOnce) {
    Expr e = u;
    for (int i = 0; i < 60; ++i) e = e * 0.5 + e * 0.5; // 2^60 paths if not shared
    const std::vector<double> x{1.25};
    EXPECT_NEAR(Program({e}, 1).values(x)[0], 1.25, 1e-14);
}
