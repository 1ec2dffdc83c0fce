#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "magkerr/polynomial.hpp"

using namespace magkerr;

namespace {
Polynomial from_roots(const std::vector<double>& roots, double lead = 1.0) {
    Polynomial p = Polynomial::constant(lead);
    for (double r : roots) p = p * Polynomial{-r, 1.0};
    return p;
}

// Oracle: real nonnegative eigenvalues of the companion matrix.
std::vector<double> companion_positive(const Polynomial& p) {
    std::vector<double> out;
    for (const auto& z : companion_roots(p)) {
        if (std::abs(z.imag()) <= 1e-9 * std::abs(z) && z.real() > 0) out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}
}  // namespace

TEST(Polynomial, ArithmeticAndEvaluation) {
    const Polynomial a{1, 2};     // 1 + 2x
    const Polynomial b{-1, 0, 3}; // -1 + 3x^2
    const auto c = a * b;
    EXPECT_EQ(c.degree(), 3);
    EXPECT_DOUBLE_EQ(c(2.0), a(2.0) * b(2.0));
    EXPECT_DOUBLE_EQ((a + b)(1.5), a(1.5) + b(1.5));
    EXPECT_DOUBLE_EQ((a - a).degree(), -1);
    EXPECT_DOUBLE_EQ(b.derivative()(2.0), 12.0);
    EXPECT_DOUBLE_EQ(b.rescaled(2.0)(1.5), b(3.0));
}

TEST(Roots, SimpleFactoredCubic) {
    const auto p = from_roots({1e13, 5e14, 9e14}, 3.7);
    const auto r = positive_real_roots(p);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0].x / 1e13, 1.0, 1e-12);
    EXPECT_NEAR(r[1].x / 5e14, 1.0, 1e-12);
    EXPECT_NEAR(r[2].x / 9e14, 1.0, 1e-12);
}

TEST(Roots, NegativeRootsIgnored) {
    const auto r = positive_real_roots(from_roots({-3.0, 2.0, -7.0}));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0].x, 2.0, 1e-12);
}

TEST(Roots, ZeroRootReported) {
    const auto r = positive_real_roots(Polynomial{0.0, -4.0, 0.0, 1.0});  // x(x^2 - 4)
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].x, 0.0);
    EXPECT_NEAR(r[1].x, 2.0, 1e-12);
}

TEST(Roots, ClosePairInsideOneGridCell) {
    // Two roots 1e-6 apart relative; far below the log-grid spacing.
    const auto r = positive_real_roots(from_roots({1e14, 1.000001e14, 3e14}));
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0].x / 1e14, 1.0, 1e-9);
    EXPECT_NEAR(r[1].x / 1.000001e14, 1.0, 1e-9);
}

TEST(Roots, TangencyHasMultiplicityTwo) {
    const auto r = positive_real_roots(from_roots({2.0, 2.0, 5.0}));
    ASSERT_EQ(r.size(), 2u);
    EXPECT_NEAR(r[0].x, 2.0, 1e-6);
    EXPECT_EQ(r[0].multiplicity, 2);
    EXPECT_EQ(r[1].multiplicity, 1);
}

TEST(Roots, NoPositiveRoots) {
    EXPECT_TRUE(positive_real_roots(Polynomial{1.0, 0.0, 1.0}).empty());
    EXPECT_TRUE(positive_real_roots(Polynomial::constant(3.0)).empty());
}

TEST(Roots, RecoverConstructedRootsOfRandomPolynomials) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logx(10.0, 16.0);
    std::uniform_int_distribution<int> count(1, 5);
    std::bernoulli_distribution flip(0.3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> roots;
        const int n = count(rng);
        for (int i = 0; i < n; ++i) roots.push_back((flip(rng) ? -1.0 : 1.0) * std::pow(10.0, logx(rng)));
        Polynomial p = from_roots(roots);
        const double s = std::pow(10.0, logx(rng));
        p = p * Polynomial{s * s, 0.0, 1.0};  // complex pair that must not show up
        std::vector<double> expected;
        for (double r : roots) {
            if (r > 0) expected.push_back(r);
        }
        std::sort(expected.begin(), expected.end());
        const auto found = positive_real_roots(p);
        ASSERT_EQ(found.size(), expected.size()) << "trial " << trial;
        for (std::size_t i = 0; i < expected.size(); ++i) EXPECT_NEAR(found[i].x / expected[i], 1.0, 1e-9);
    }
}

TEST(Roots, AgreeWithCompanionMatrixWhenWellScaled) {
    const auto p = from_roots({-2.0, 0.5, 1.5, 7.0}) * Polynomial{3.0, 1.0, 1.0};
    const auto found = positive_real_roots(p);
    const auto ref = companion_positive(p);
    ASSERT_EQ(found.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(found[i].x, ref[i], 1e-10);
}
