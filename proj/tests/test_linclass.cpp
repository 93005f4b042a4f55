#include <gtest/gtest.h>

#include <fstream>

#include <twaust/linclass.hpp>
#include <twaust/polyalg.hpp>

using namespace twaust;

namespace {

SymSpan conjugate_and_mix(const std::vector<RealMatrix>& basis, const RealMatrix& q, Rng& rng) {
    // Q B Qᵀ, followed by a random invertible change of basis inside the span
    const std::size_t d = basis.size();
    RealMatrix mix = random_invertible(rng, d);
    std::vector<RealMatrix> out;
    for (std::size_t i = 0; i < d; ++i) {
        RealMatrix m(3, 3, 0.0);
        for (std::size_t j = 0; j < d; ++j) m += basis[j] * mix(i, j);
        out.push_back(symmetric_part(q * m * q.transpose()));
    }
    return SymSpan::make(out);
}

Tableau block_tableau(std::size_t n, std::size_t k) {
    std::vector<RealMatrix> mats;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = k; j < n; ++j) {
            RealMatrix m(n, n, 0.0);
            m(i, j) = m(j, i) = 1.0;
            mats.push_back(m);
        }
    return tableau_from_matrices(mats);
}

std::vector<RealMatrix> full_sym(std::size_t n) {
    std::vector<RealMatrix> mats;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            RealMatrix m(n, n, 0.0);
            m(i, j) = m(j, i) = 1.0;
            mats.push_back(m);
        }
    return mats;
}

std::size_t binomial(std::size_t n, std::size_t r) {
    std::size_t b = 1;
    for (std::size_t i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
}

} // namespace

TEST(SymSpan, RejectsDependentAndAsymmetricInput) {
    auto b = w1_basis();
    b.push_back(b[0] * 2.0);
    EXPECT_THROW(SymSpan::make(b), InputError);
    EXPECT_EQ(SymSpan::reduce(b).dim(), 3u);
    RealMatrix asym{{0, 1, 0}, {0, 0, 0}, {0, 0, 0}};
    EXPECT_THROW(SymSpan::make({asym}), InputError);
}

TEST(PolarizedDet, DiagonalOfPolarizationIsDeterminant) {
    Rng rng(3);
    for (std::size_t k = 1; k <= 4; ++k)
        for (int t = 0; t < 50; ++t) {
            const RealMatrix x = random_symmetric(rng, k);
            const double d = polarized_det(std::vector<RealMatrix>(k, x));
            EXPECT_NEAR(d, determinant(x), 1e-10 * std::max(1.0, std::abs(determinant(x))));
        }
}

TEST(PolarizedDet, MixedTermOfDiagonalMatrices) {
    // D(E11, E22, E33) = 1/6 since det(aE11+bE22+cE33) = abc
    RealMatrix e1(3, 3, 0.0), e2(3, 3, 0.0), e3(3, 3, 0.0);
    e1(0, 0) = e2(1, 1) = e3(2, 2) = 1.0;
    EXPECT_NEAR(polarized_det({e1, e2, e3}), 1.0 / 6.0, 1e-15);
}

TEST(SingularSpan, NamedSpans) {
    EXPECT_TRUE(is_singular_span(SymSpan::make(w1_basis())).singular);
    EXPECT_TRUE(is_singular_span(SymSpan::make(w2_basis())).singular);
    EXPECT_TRUE(is_singular_span(SymSpan::make(vprime2_basis())).singular);
    const auto r = is_singular_span(SymSpan::make({RealMatrix::identity(3)}));
    EXPECT_FALSE(r.singular);
    EXPECT_EQ(r.certificate, (std::vector<std::size_t>{0, 0, 0}));
    EXPECT_NEAR(r.value, 1.0, 1e-15);
}

TEST(SingularSpan, CertificateNamesViolatingTuple) {
    auto b = w1_basis();
    RealMatrix e33(3, 3, 0.0);
    e33(2, 2) = 1.0;
    b.push_back(e33);
    const auto r = is_singular_span(SymSpan::make(b));
    ASSERT_FALSE(r.singular);
    std::vector<RealMatrix> xs;
    for (auto i : r.certificate) xs.push_back(b[i]);
    EXPECT_GT(std::abs(polarized_det(xs)), 1e-3);
}

TEST(SingularSpan, NoTwoDimensionalSingularSpanOf2x2Matrices) {
    // Exhaustive search over independent pairs of integer rank-one matrices s·vvᵀ
    std::vector<RealMatrix> rank_one;
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
            if (a == 0 && b == 0) continue;
            for (double s : {-1.0, 1.0}) rank_one.push_back(RealMatrix{{s * a * a, s * a * b}, {s * a * b, s * b * b}});
        }
    int tested = 0;
    for (std::size_t i = 0; i < rank_one.size(); ++i)
        for (std::size_t j = i + 1; j < rank_one.size(); ++j) {
            const SymSpan span = SymSpan::reduce({rank_one[i], rank_one[j]});
            if (span.dim() != 2) continue;
            EXPECT_FALSE(is_singular_span(span).singular);
            ++tested;
        }
    EXPECT_GT(tested, 100);

    Rng rng(11);
    for (int t = 0; t < 2000; ++t) {
        const double a1 = rng.uniform(0, 6.3), a2 = rng.uniform(0, 6.3);
        const RealMatrix x{{std::cos(a1) * std::cos(a1), std::cos(a1) * std::sin(a1)},
                           {std::cos(a1) * std::sin(a1), std::sin(a1) * std::sin(a1)}};
        const RealMatrix y{{std::cos(a2) * std::cos(a2), -std::cos(a2) * std::sin(a2)},
                           {-std::cos(a2) * std::sin(a2), std::sin(a2) * std::sin(a2)}};
        const SymSpan span = SymSpan::reduce({x, y});
        if (span.dim() == 2) EXPECT_FALSE(is_singular_span(span).singular);
    }
}

TEST(Classify, NamedSpans) {
    const auto c1 = classify_singular_3span(SymSpan::make(w1_basis()));
    EXPECT_EQ(c1.type, SpanShape::W1);
    EXPECT_NEAR(std::abs(c1.rotation(2, 2)), 1.0, 1e-12);
    const auto c2 = classify_singular_3span(SymSpan::make(w2_basis()));
    EXPECT_EQ(c2.type, SpanShape::W2);
    EXPECT_NEAR(std::abs(c2.rotation(0, 0)), 1.0, 1e-12);
}

TEST(Classify, VPrime2IsW2WithAxisE3) {
    const auto c = classify_singular_3span(SymSpan::make(vprime2_basis()));
    EXPECT_EQ(c.kernel_dim, 0u);
    EXPECT_EQ(c.type, SpanShape::W2);
    EXPECT_NEAR(std::abs(c.rotation(2, 0)), 1.0, 1e-10);
    EXPECT_LT(c.shape_residual, 1e-8);
}

TEST(Classify, RecoversTypeUnderRandomRotations) {
    Rng rng(2024);
    for (int t = 0; t < 1000; ++t) {
        const RealMatrix q = random_rotation(rng, 3);
        const auto c1 = classify_singular_3span(conjugate_and_mix(w1_basis(), q, rng));
        ASSERT_EQ(c1.type, SpanShape::W1) << t;
        ASSERT_LT(c1.shape_residual, 1e-8) << t;
        // kernel direction is Q e3
        double dot = 0.0;
        for (std::size_t i = 0; i < 3; ++i) dot += c1.rotation(i, 2) * q(i, 2);
        ASSERT_NEAR(std::abs(dot), 1.0, 1e-8);

        const auto c2 = classify_singular_3span(conjugate_and_mix(w2_basis(), q, rng));
        ASSERT_EQ(c2.type, SpanShape::W2) << t;
        ASSERT_LT(c2.shape_residual, 1e-8) << t;
        dot = 0.0;
        for (std::size_t i = 0; i < 3; ++i) dot += c2.rotation(i, 0) * q(i, 0);
        ASSERT_NEAR(std::abs(dot), 1.0, 1e-8);
    }
}

TEST(Classify, RejectsNonSingularSpan) {
    RealMatrix e33(3, 3, 0.0);
    e33(2, 2) = 1.0;
    auto b = w2_basis();
    b[0] = b[0] + e33 * 1.0;
    b[0](1, 1) = 1.0;
    EXPECT_THROW(classify_singular_3span(SymSpan::make(b)), ClassificationError);
    EXPECT_EQ(span_shape(b), SpanShape::none);
    EXPECT_EQ(span_shape({RealMatrix(3, 3, 0.0)}), SpanShape::zero);
}

TEST(Prolongation, FullSymmetricSquaresGiveAllCubics) {
    for (std::size_t n = 2; n <= 5; ++n) {
        const auto p = prolongation(tableau_from_matrices(full_sym(n)));
        EXPECT_EQ(p.dimension, binomial(n + 2, 3)) << n;
    }
}

TEST(Prolongation, OffDiagonalBlockIsRigid) {
    for (std::size_t n = 2; n <= 5; ++n)
        for (std::size_t k = 1; k < n; ++k) EXPECT_EQ(prolongation(block_tableau(n, k)).dimension, 0u) << n << k;
    EXPECT_EQ(prolongation(tableau_from_matrices(vprime2_basis())).dimension, 0u);
}

TEST(Prolongation, BasisElementsSatisfyDefinition) {
    // L = span{E11, E22} on R^2: L^(1) = span{x^3, y^3}
    RealMatrix e11(2, 2, 0.0), e22(2, 2, 0.0);
    e11(0, 0) = 1.0;
    e22(1, 1) = 1.0;
    const auto p = prolongation(tableau_from_matrices({e11, e22}));
    ASSERT_EQ(p.dimension, 2u);
    for (const auto& el : p.basis.basis) {
        const auto& t = el[0];
        // mixed entries T_{001}, T_{011} vanish
        EXPECT_NEAR(t[1], 0.0, 1e-12);
        EXPECT_NEAR(t[3], 0.0, 1e-12);
        // symmetric in all indices
        EXPECT_NEAR(t[1], t[2], 1e-12);
        EXPECT_NEAR(t[3], t[6], 1e-12);
    }
}

TEST(Prolongation, MonotoneUnderInclusion) {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const std::size_t big = 1 + static_cast<std::size_t>(rng.next() % (n * (n + 1) / 2));
        std::vector<RealMatrix> mats;
        for (std::size_t i = 0; i < big; ++i) {
            // sparse integer entries keep nontrivial prolongations likely
            RealMatrix m(n, n, 0.0);
            const std::size_t a = rng.next() % n, b = rng.next() % n;
            m(a, b) = m(b, a) = 1.0;
            if (rng.unit() < 0.3) m(0, 0) += 1.0;
            mats.push_back(m);
        }
        const std::size_t small = 1 + static_cast<std::size_t>(rng.next() % big);
        const std::vector<RealMatrix> sub(mats.begin(), mats.begin() + static_cast<std::ptrdiff_t>(small));
        EXPECT_LE(prolongation(tableau_from_matrices(sub)).dimension, prolongation(tableau_from_matrices(mats)).dimension);
    }
}

TEST(Prolongation, VectorValuedTableau) {
    // W = R^2, L = S^2V* ⊗ W gives cubics ⊗ W
    Tableau t;
    t.V_dim = 2;
    t.W_dim = 2;
    t.order = 2;
    for (const auto& m : full_sym(2)) {
        t.basis.push_back({m.data(), std::vector<double>(4, 0.0)});
        t.basis.push_back({std::vector<double>(4, 0.0), m.data()});
    }
    EXPECT_EQ(prolongation(t).dimension, 8u);
}

TEST(TableauJson, RoundTripAndValidation) {
    const Tableau t = block_tableau(4, 2);
    const auto j = tableau_to_json(t);
    const Tableau back = tableau_from_json(j);
    EXPECT_EQ(back.basis.size(), t.basis.size());
    EXPECT_EQ(back.basis[0][0], t.basis[0][0]);
    EXPECT_THROW(tableau_from_json(nlohmann::json{{"V_dim", 2}, {"basis", {{{1, 0}, {0}}}}}), InputError);
    // single-component form without the W wrapper
    const auto single = nlohmann::json{{"V_dim", 2}, {"order", 2}, {"basis", {{{1, 0}, {0, 0}}}}};
    EXPECT_EQ(tableau_from_json(single).basis.size(), 1u);
}

TEST(TableauJson, DataFilesLoad) {
    std::ifstream block(std::string(TWAUST_DATA_DIR) + "/block_example.json");
    ASSERT_TRUE(block.good());
    EXPECT_EQ(prolongation(tableau_from_json(nlohmann::json::parse(block))).dimension, 0u);
    std::ifstream vp(std::string(TWAUST_DATA_DIR) + "/vprime2.json");
    ASSERT_TRUE(vp.good());
    EXPECT_EQ(prolongation(tableau_from_json(nlohmann::json::parse(vp))).dimension, 0u);
    std::ifstream w1(std::string(TWAUST_DATA_DIR) + "/w1_span.json");
    ASSERT_TRUE(w1.good());
    EXPECT_EQ(classify_singular_3span(SymSpan::make(matrices_from_json(nlohmann::json::parse(w1)))).type, SpanShape::W1);
}
