#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <twaust/austere.hpp>
#include <twaust/catalog.hpp>
#include <twaust/slag.hpp>

#include "oracles.hpp"

using namespace twaust;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdicts {
    CheckReport validate, check, verify;
};

Verdicts run_all(const ExampleInstance& e) {
    return {validate_inputs(e), check_pair(e.chart, e.mu, e.phase(), e.sample_default),
            verify_special_lagrangian(e.chart, e.mu, e.theta, e.sample_default)};
}

// largest residual over the conditions that failed
double failing_max(const CheckReport& r) {
    double m = 0.0;
    for (const auto& c : r.conditions())
        if (!c.pass()) m = std::max(m, c.saw_nan ? 1e300 : c.max);
    return m;
}

} // namespace

class CatalogDefaults : public ::testing::TestWithParam<std::string> {};

TEST_P(CatalogDefaults, PassesAllThreeChecks) {
    const auto e = instantiate(GetParam());
    EXPECT_EQ(e.id, GetParam());
    const auto v = run_all(e);
    EXPECT_EQ(v.validate.verdict(), Verdict::pass) << v.validate.dump();
    EXPECT_EQ(v.check.verdict(), Verdict::pass) << v.check.dump();
    EXPECT_EQ(v.verify.verdict(), Verdict::pass) << v.verify.dump();
    EXPECT_LT(v.check.worst_max(), 1e-8);
    EXPECT_LT(v.verify.worst_max(), 1e-8);
}

TEST_P(CatalogDefaults, CorruptionFailsWithNamedResidual) {
    const auto e = instantiate(GetParam(), {{"corrupt", true}});
    const auto v = run_all(e);
    EXPECT_EQ(v.validate.verdict(), Verdict::fail);
    const bool some_fail = v.check.verdict() == Verdict::fail || v.verify.verdict() == Verdict::fail;
    EXPECT_TRUE(some_fail);
    EXPECT_GT(std::max(failing_max(v.check), failing_max(v.verify)), 1e-3);
    // the two certificates agree on the corrupted pair as well
    EXPECT_EQ(v.check.verdict(), v.verify.verdict());
}

TEST_P(CatalogDefaults, InstantiationIsDeterministic) {
    const auto a = instantiate(GetParam());
    const auto b = instantiate(GetParam());
    EXPECT_EQ(a.params.dump(), b.params.dump());
    EXPECT_EQ(validate_inputs(a).dump(), validate_inputs(b).dump());
    const auto p = a.sample_default.base_points()[1];
    const auto ja = a.chart.jets(p), jb = b.chart.jets(p);
    for (std::size_t i = 0; i < ja.size(); ++i) EXPECT_EQ(ja[i].value, jb[i].value);
}

INSTANTIATE_TEST_SUITE_P(All, CatalogDefaults, ::testing::ValuesIn(example_ids()));

TEST(Catalog, RejectsUnknownIdAndParams) {
    EXPECT_THROW(instantiate("no_such_example"), InputError);
    EXPECT_THROW(instantiate("line_k1", {{"slope", 1.0}}), InputError);
    EXPECT_THROW(instantiate("nonsplit_torus_cone", {{"a", -1.0}}), InputError);
    EXPECT_THROW(instantiate("nonsplit_torus_cone", {{"c", {1.0, 2.0}}}), InputError);
    EXPECT_THROW(instantiate("tg_graph", {{"k", 3}, {"family", "harmonic"}}), InputError);
    EXPECT_THROW(instantiate("line_k1", nlohmann::json::array()), InputError);
    EXPECT_THROW(instantiate("cylinder_thm41", {{"c", "0.5"}}), InputError);
}

TEST(Catalog, ResolvedParamsIncludeDefaults) {
    const auto e = instantiate("nonsplit_torus_cone", {{"a", 1.5}});
    EXPECT_EQ(e.params["a"], 1.5);
    EXPECT_EQ(e.params["c"].size(), 5u);
    EXPECT_EQ(e.params["corrupt"], false);
}

TEST(GraphExample, AnchorValue) {
    const auto e = instantiate("minimal_graph_k2");
    const auto pt = build_immersion(e.chart, e.mu).eval(std::vector<double>{1, 1}, std::vector<double>{1});
    EXPECT_NEAR(pt.y[0], 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(pt.y[1], -1.0 / 6.0, 1e-14);
    EXPECT_NEAR(pt.y[2], 4.0 / 3.0, 1e-14);
}

TEST(GraphExample, EquationResidualsAgainstHandDerivatives) {
    // h = atan(v/u): h_u = -v/r², h_v = u/r², h_uu = 2uv/r⁴ = -h_vv, h_uv = (v² - u²)/r⁴
    const auto e = instantiate("minimal_graph_k2");
    const auto rep = validate_inputs(e);
    EXPECT_LT(rep.find("minimal_surface_eq")->max, 1e-9);
    EXPECT_LT(rep.find("reduced_laplace_eq")->max, 1e-9);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        const double u = rng.uniform(0.5, 2), v = rng.uniform(0.5, 2), r2 = u * u + v * v;
        const double hu = -v / r2, hv = u / r2, huu = 2 * u * v / (r2 * r2), hvv = -huu, huv = (v * v - u * u) / (r2 * r2);
        const double hand = (1 + hv * hv) * huu + (1 + hu * hu) * hvv - 2 * hu * hv * huv;
        EXPECT_NEAR(hand, 0.0, 1e-14);
        const std::vector<double> p{u, v};
        EXPECT_NEAR(e.hypotheses[0].residual(p), std::abs(hand), 1e-12);
    }
    // with h = f = uv the minimal surface operator is -2uv
    const auto c = instantiate("minimal_graph_k2", {{"corrupt", true}});
    const std::vector<double> p{1.5, 0.7};
    EXPECT_NEAR(c.hypotheses[0].residual(p), 2 * 1.5 * 0.7, 1e-12);
}

TEST(GraphExample, GeneralHarmonicFamilyPasses) {
    const auto e = instantiate("minimal_graph_k2", {{"c_angle", 0.3}, {"c_radial", 1.2}, {"c_exp", -0.4}});
    const auto v = run_all(e);
    EXPECT_EQ(v.validate.verdict(), Verdict::pass) << v.validate.dump();
    EXPECT_EQ(v.check.verdict(), Verdict::pass);
    EXPECT_EQ(v.verify.verdict(), Verdict::pass);
}

TEST(TgGraph, QuadraticFamilyAtNonzeroPhase) {
    const auto e = instantiate("tg_graph", {{"k", 3}, {"n", 5}, {"theta", 0.3}, {"lambdas", {0.4, -1.1}}});
    const auto v = run_all(e);
    EXPECT_EQ(v.validate.verdict(), Verdict::pass);
    EXPECT_EQ(v.check.verdict(), Verdict::pass) << v.check.dump();
    EXPECT_EQ(v.verify.verdict(), Verdict::pass);
}

TEST(LineK1, SlopeMinusTanPhiWithZeroOffset) {
    const double theta = 0.9;
    const double phi = cophase(theta, 3, 1);
    const auto e = instantiate("line_k1", {{"theta", theta}, {"a", -std::tan(phi)}, {"b", 0.0}});
    EXPECT_EQ(check_pair(e.chart, e.mu, e.phase(), e.sample_default).verdict(), Verdict::pass);
    const auto bad = instantiate("line_k1", {{"theta", theta}, {"a", std::tan(phi)}, {"b", 0.0}});
    EXPECT_EQ(check_pair(bad.chart, bad.mu, bad.phase(), bad.sample_default).verdict(), Verdict::fail);
}

TEST(CylinderThm41, NonzeroTanPhi) {
    for (double theta : {kPi / 2 + 0.4, kPi / 2 - 0.7}) {
        const auto e = instantiate("cylinder_thm41", {{"theta", theta}, {"c", -0.4}});
        const auto v = run_all(e);
        EXPECT_EQ(v.validate.verdict(), Verdict::pass) << theta;
        EXPECT_EQ(v.check.verdict(), Verdict::pass) << theta;
        EXPECT_EQ(v.verify.verdict(), Verdict::pass) << theta;
    }
}

TEST(CylinderThm41, ResidualsContinuousInTilt) {
    const auto a = instantiate("cylinder_thm41", {{"c", 0.6}});
    const auto b = instantiate("cylinder_thm41", {{"c", 0.6001}});
    const auto ra = check_pair(a.chart, a.mu, a.phase(), a.sample_default);
    const auto rb = check_pair(b.chart, b.mu, b.phase(), b.sample_default);
    EXPECT_NEAR(ra.worst_max(), rb.worst_max(), 1e-9);
}

TEST(SplitCylinder, OtherPhasesAndSlopes) {
    for (double theta : {2.9, 0.4}) {
        const auto e = instantiate("split_cylinder", {{"theta", theta}, {"m0", -1.0}, {"c_harmonic", 2.5}});
        const auto v = run_all(e);
        EXPECT_EQ(v.check.verdict(), Verdict::pass) << theta;
        EXPECT_EQ(v.verify.verdict(), Verdict::pass) << theta;
    }
}

TEST(CliffordTorus, MinimalInSphereByFiniteDifferences) {
    const Expr a = Expr::var(0), b = Expr::var(1);
    const Chart sigma = Chart::make(2, 4, catalog_detail::clifford(a, b), Box{{0, 0}, {1.5, 1.5}});
    const oracle::Field y = [](const std::vector<double>& p) {
        const double s = 1 / std::sqrt(2.0);
        return std::vector<double>{s * std::cos(p[0]), s * std::sin(p[0]), s * std::cos(p[1]), s * std::sin(p[1])};
    };
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> p{rng.uniform(0.2, 1.3), rng.uniform(0.2, 1.3)};
        EXPECT_LT(catalog_detail::sphere_minimality(sigma, p), 1e-8);
        for (std::size_t c = 0; c < 4; ++c) {
            const oracle::Scalar yc = [&](const std::vector<double>& q) { return y(q)[c]; };
            EXPECT_NEAR(oracle::laplace_beltrami(y, yc, p), -2 * y(p)[c], 1e-7);
        }
    }
}

TEST(ConeEigenfunction, ObliqueEigenfunctionPasses) {
    const auto e = instantiate("cone_eigenfunction", {{"oblique", 0.7}, {"c", {0.0, -0.3, 0.0, 1.0}}});
    const auto v = run_all(e);
    EXPECT_EQ(v.validate.verdict(), Verdict::pass);
    EXPECT_EQ(v.check.verdict(), Verdict::pass);
    EXPECT_EQ(v.verify.verdict(), Verdict::pass);
}

TEST(TorusCone, SlopeIsCosUCosT) {
    const auto e = instantiate("nonsplit_torus_cone", {{"a", 1.0}, {"c", {1, 0, 0, 0, 0.5}}});
    // μ_s = ∂_s(m s) = m
    Rng rng(8);
    for (int i = 0; i < 10; ++i) {
        const std::vector<double> p{rng.uniform(0.5, 2), rng.uniform(0.2, 1.3), rng.uniform(0, 2)};
        EXPECT_NEAR(e.mu.jets(p)[0].value, std::cos(p[2]) * std::cos(p[1]), 1e-14);
        EXPECT_NEAR(e.mu.jets(p)[2].value, p[0] * std::cos(p[1]) * -std::sin(p[2]) + 0.5, 1e-14);
    }
}

TEST(TorusCone, EigenfunctionByFiniteDifferenceLaplacian) {
    const auto e = instantiate("nonsplit_torus_cone", {{"a", 1.0}, {"c", {1, 0, 0, 0, 0.5}}});
    const oracle::Field torus = [](const std::vector<double>& q) {
        const double t = q[0], u = q[1];
        return std::vector<double>{std::cos(t) * std::cos(u), std::cos(t) * std::sin(u), std::sin(t) * std::cos(u),
                                   std::sin(t) * std::sin(u)};
    };
    const oracle::Scalar m = [](const std::vector<double>& q) { return std::cos(q[1]) * std::cos(q[0]); };
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> q{rng.uniform(0.2, 1.3), rng.uniform(0, 2)};
        EXPECT_LT(std::abs(oracle::laplace_beltrami(torus, m, q) + 2 * m(q)), 1e-7);
        const std::vector<double> x{1.0, q[0], q[1]};
        EXPECT_LT(e.hypotheses[1].residual(x), 1e-10);
    }
}

TEST(TorusCone, OtherParametersPassAndRecordRatio) {
    const auto e = instantiate("nonsplit_torus_cone", {{"a", 1.7}, {"c", {0.3, -0.4, 0.8, 0.2, -0.7}}});
    const auto v = run_all(e);
    EXPECT_EQ(v.validate.verdict(), Verdict::pass);
    EXPECT_EQ(v.check.verdict(), Verdict::pass);
    EXPECT_EQ(v.verify.verdict(), Verdict::pass);
    const double lo = v.validate.measured_or("b10sq_over_hp3_min", -1), hi = v.validate.measured_or("b10sq_over_hp3_max", -1);
    EXPECT_TRUE(std::isfinite(lo) && std::isfinite(hi));
    EXPECT_GT(lo, 0.0);
}

TEST(TwistedCone, IntegrationAndHolonomy) {
    const auto e = instantiate("twisted_cone");
    EXPECT_GE(e.measured.at("path_steps"), 16.0);
    EXPECT_GT(e.measured.at("holonomy_a"), 1e-3);
    const auto rep = validate_inputs(e);
    EXPECT_LT(rep.find("dw_consistency")->max, 1e-9);
    EXPECT_LT(rep.find("beta_closed")->max, 1e-12);
    EXPECT_EQ(rep.measured_or("holonomy_b", -1.0), e.measured.at("holonomy_b"));
}

TEST(TwistedCone, TangentsMatchFiniteDifferencesOfIntegratedChart) {
    const auto e = instantiate("twisted_cone", {{"m_phase", 0.2}});
    const oracle::Field x = [&](const std::vector<double>& p) {
        std::vector<double> out;
        for (const auto& j : e.chart.jets(p)) out.push_back(j.value);
        return out;
    };
    const std::vector<double> p{0.9, 0.7, 1.2};
    const auto jets = e.chart.jets(p);
    for (std::size_t a = 0; a < 3; ++a) {
        const auto d = oracle::d6(x, p, a, 1e-2);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(jets[i].grad[a], d[i], 1e-8);
    }
}

TEST(Validate, ThreadCountDoesNotChangeReport) {
    const auto e = instantiate("cone_eigenfunction");
    EXPECT_EQ(validate_inputs(e, e.sample_default, 1).dump(), validate_inputs(e, e.sample_default, 3).dump());
}
