#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "bcrb/ray_matrix.hpp"
#include "oracles.hpp"

using namespace bcrb;
using E = OpticalElement<double>;

namespace {

void expect_matrix_near(const Matrix2& actual, const Matrix2& expected, double tol) {
    EXPECT_NEAR(actual.a, expected.a, tol);
    EXPECT_NEAR(actual.b, expected.b, tol);
    EXPECT_NEAR(actual.c, expected.c, tol);
    EXPECT_NEAR(actual.d, expected.d, tol);
}

} // namespace

TEST(ElementMatrix, FreeSpaceIsTranslation) {
    EXPECT_EQ(element_matrix(E{element::FreeSpace<double>{1.0}}), (Matrix2{1.0, 1.0, 0.0, 1.0}));
}

TEST(ElementMatrix, MirrorUsesSignedCurvature) {
    const auto m = element_matrix(E{element::Mirror<double>{-0.880}});
    EXPECT_EQ(m.a, 1.0);
    EXPECT_EQ(m.b, 0.0);
    EXPECT_NEAR(m.c, 1.1364, 1e-4);
    EXPECT_EQ(m.d, 1.0);
}

TEST(ElementMatrix, UnitMagnifierIsIdentity) {
    EXPECT_EQ(element_matrix(E{element::Magnifier<double>{1.0}}), Matrix2::identity());
}

TEST(ElementMatrix, TelescopeLensTermsAreSignedDisplacements) {
    EXPECT_EQ(element_matrix(E{element::Displacement<double>{0.01}}), (Matrix2{1.0, 0.01, 0.0, 1.0}));
    EXPECT_EQ(element_matrix(E{element::Displacement<double>{-0.035}}), (Matrix2{1.0, -0.035, 0.0, 1.0}));
    EXPECT_EQ(element_matrix(E{element::ThinLens<double>{0.5}}), (Matrix2{1.0, 0.0, -2.0, 1.0}));
}

TEST(ElementMatrix, RejectsInvalidParameters) {
    EXPECT_THROW(element_matrix(E{element::Mirror<double>{0.0}}), invalid_element);
    EXPECT_THROW(element_matrix(E{element::ThinLens<double>{0.0}}), invalid_element);
    EXPECT_THROW(element_matrix(E{element::FreeSpace<double>{-1e-3}}), invalid_element);
    EXPECT_THROW(element_matrix(E{element::Magnifier<double>{0.0}}), invalid_element);
    EXPECT_THROW(element_matrix(E{element::Magnifier<double>{-2.0}}), invalid_element);
    EXPECT_THROW(element_matrix(E{element::FreeSpace<double>{std::numeric_limits<double>::quiet_NaN()}}),
                 invalid_element);
}

TEST(Apply, Examples) {
    EXPECT_EQ(apply(Matrix2::identity(), Ray{1e-3, 0.0}), (Ray{1e-3, 0.0}));
    const auto moved = apply(element_matrix(E{element::FreeSpace<double>{2.0}}), Ray{0.0, 1e-3});
    EXPECT_DOUBLE_EQ(moved.position, 2e-3);
    EXPECT_DOUBLE_EQ(moved.slope, 1e-3);
    // Hand multiplication: [[1,0],[1/0.88,1]] (1e-3, 0) = (1e-3, 1.13636e-3)
    const auto reflected = apply(element_matrix(E{element::Mirror<double>{-0.880}}), Ray{1e-3, 0.0});
    EXPECT_DOUBLE_EQ(reflected.position, 1e-3);
    EXPECT_NEAR(reflected.slope, 1.1364e-3, 1e-7);
}

TEST(Apply, IsLinear) {
    const Matrix2 m{1.3, 0.4, -0.2, 0.7};
    const Ray r1{0.2, -0.1}, r2{-0.05, 0.3};
    const auto sum = apply(m, Ray{r1.position + 2.0 * r2.position, r1.slope + 2.0 * r2.slope});
    const auto p1 = apply(m, r1), p2 = apply(m, r2);
    EXPECT_NEAR(sum.position, p1.position + 2.0 * p2.position, 1e-15);
    EXPECT_NEAR(sum.slope, p1.slope + 2.0 * p2.slope, 1e-15);
}

TEST(Compose, Examples) {
    EXPECT_EQ(compose<double>({Matrix2::identity(), Matrix2::identity()}), Matrix2::identity());
    const auto joined = compose<double>({element_matrix(E{element::FreeSpace<double>{1.0}}),
                                         element_matrix(E{element::FreeSpace<double>{2.0}})});
    EXPECT_EQ(joined, (Matrix2{1.0, 3.0, 0.0, 1.0}));
    EXPECT_THROW(compose(std::span<const Matrix2>{}), domain_error);
}

TEST(Compose, LastTraversedIsLeftmost) {
    const Matrix2 lens{1.0, 0.0, -2.0, 1.0};
    const Matrix2 space{1.0, 1.0, 0.0, 1.0};
    // Lens first, then space: space * lens.
    EXPECT_EQ(compose<double>({lens, space}), (Matrix2{-1.0, 1.0, -2.0, 1.0}));
    EXPECT_EQ(compose<double>({space, lens}), (Matrix2{1.0, 1.0, -2.0, -1.0}));
}

TEST(Compose, IsAssociative) {
    oracle::GeometryGenerator gen(7);
    for (int trial = 0; trial < 500; ++trial) {
        const auto chain = bcrb_chain(gen());
        const Matrix2 p = chain[trial % 9], q = chain[(trial + 3) % 9], r = chain[(trial + 5) % 9];
        expect_matrix_near(compose<double>({p, q, r}), compose<double>({compose<double>({p, q}), r}), 1e-12);
    }
}

TEST(RoundTrip, ExemplarIsOperational) {
    const auto m = round_trip_bcrb(CavityGeometry{});
    const double ad = m.a * m.d;
    EXPECT_GT(ad, 0.0);
    EXPECT_LT(ad, 1.0);
    EXPECT_NEAR(m.determinant(), 1.0, 1e-9);
}

TEST(RoundTrip, MatchesLongDoubleChain) {
    const CavityGeometry g;
    const auto ref = oracle::bcrb_round_trip(g);
    expect_matrix_near(round_trip_bcrb(g),
                       Matrix2{static_cast<double>(ref[0][0]), static_cast<double>(ref[0][1]),
                               static_cast<double>(ref[1][0]), static_cast<double>(ref[1][1])},
                       1e-12);
}

TEST(RoundTrip, ClosedFormAgreesWithProductOnExemplar) {
    const CavityGeometry g;
    expect_matrix_near(round_trip_closed_form(g), round_trip_bcrb(g), 1e-9);
}

TEST(RoundTrip, ClosedFormCollapsesWhenPrimedLengthsVanish) {
    CavityGeometry g;
    g.L2 = -g.f1;
    g.d = g.f2();
    const auto m = round_trip_closed_form(g);
    EXPECT_NEAR(m.b, g.L1 * g.magnification, 1e-15);
    EXPECT_NEAR(m.a, g.magnification - m.b / g.rho1, 1e-15);
}

TEST(RoundTrip, ClosedFormRejectsVanishingB) {
    CavityGeometry g;
    g.L1 = 0.0;
    g.L2 = -g.f1;
    g.d = g.f2();
    EXPECT_THROW(round_trip_closed_form(g), singular_configuration);
}

TEST(RoundTrip, UnitTelescopeReducesToOriginal) {
    oracle::GeometryGenerator gen(11);
    for (int trial = 0; trial < 200; ++trial) {
        CavityGeometry g = gen();
        g.magnification = 1.0;
        g.f1 = 1e-12;
        g.L2 = 0.0;
        expect_matrix_near(round_trip_bcrb(g), round_trip_original(g), 1e-9);
    }
}

TEST(RoundTrip, OriginalWithFlatOpticsAndNoLengthIsIdentity) {
    CavityGeometry g;
    g.rho1 = -1e9;
    g.rho2 = 1e9;
    g.f_R = 1e12;
    g.L1 = 0.0;
    g.L2 = 0.0;
    g.d = 1e-12;
    expect_matrix_near(round_trip_original(g), Matrix2::identity(), 1e-9);
}

TEST(RoundTrip, PropagatesInvalidElements) {
    CavityGeometry g;
    g.f_R = 0.0;
    EXPECT_THROW(round_trip_bcrb(g), invalid_element);
    g = {};
    g.magnification = -1.0;
    EXPECT_THROW(round_trip_bcrb(g), invalid_element);
}

TEST(Properties, UnimodularAndBasisEquivalent) {
    oracle::GeometryGenerator gen(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto g = gen();
        const auto product = round_trip_bcrb(g);
        EXPECT_NEAR(product.determinant(), 1.0, 1e-9);
        EXPECT_NEAR(round_trip_original(g).determinant(), 1.0, 1e-9);
        expect_matrix_near(product, oracle::basis_propagation(g), 1e-9);
        for (const auto& m : bcrb_chain(g)) EXPECT_NEAR(m.determinant(), 1.0, 1e-12);
    }
}

TEST(Stability, StrictOpenInterval) {
    EXPECT_TRUE(is_stable(round_trip_bcrb(CavityGeometry{})));
    EXPECT_FALSE(is_stable(Matrix2{1.5, 0.0, 0.0, 1.0}));
    EXPECT_FALSE(is_stable(Matrix2{0.0, 1.0, -1.0, 0.7}));
    EXPECT_FALSE(is_stable(Matrix2{1.0, 0.0, 0.0, 1.0}));
    EXPECT_TRUE(is_stable(Matrix2{0.5, 0.0, 0.0, 1.0}));
}

TEST(Stability, NaNIsUnstableWithDiagnostic) {
    const auto report = stability_check(Matrix2{std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0, 1.0});
    EXPECT_FALSE(report.stable);
    EXPECT_NE(report.diagnostic.find("NaN"), std::string_view::npos);
}

TEST(Stability, DependsOnlyOnProductOfDiagonal) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> any(-50.0, 50.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = any(rng) / 25.0, d = any(rng) / 25.0;
        const bool expected = is_stable(Matrix2{a, 0.0, 0.0, d});
        EXPECT_EQ(is_stable(Matrix2{a, any(rng), any(rng), d}), expected);
    }
}

TEST(Geometry, ValidationNamesField) {
    CavityGeometry g;
    g.rho2 = 0.0;
    try {
        validate(g);
        FAIL() << "expected validation_error";
    } catch (const validation_error& e) {
        EXPECT_EQ(e.field(), "geometry.rho2");
    }
    g = {};
    g.d = -1.0;
    EXPECT_THROW(validate(g), validation_error);
    EXPECT_NO_THROW(validate(CavityGeometry{}));
}
