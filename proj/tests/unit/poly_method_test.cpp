#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "qmean/bounds_lab.hpp"
#include "qmean/poly_method.hpp"

using namespace qmean;

TEST(Symmetrize, AndTable) {
    const std::vector<double> table = {0, 0, 0, 1};
    const auto v = symmetrize(table, 2);
    EXPECT_EQ(v.values, (std::vector<double>{0, 0, 1}));
    EXPECT_EQ(v.min_degree, 2);
}

TEST(Symmetrize, ConstantTable) {
    const std::vector<double> table(8, 0.3);
    const auto v = symmetrize(table, 3);
    for (double x : v.values) EXPECT_NEAR(x, 0.3, 1e-16);
    EXPECT_EQ(v.min_degree, 0);
}

TEST(Symmetrize, ParityIsQuadraticOnThreeNodes) {
    const std::vector<double> table = {0, 1, 1, 0};
    const auto v = symmetrize(table, 2);
    EXPECT_EQ(v.values, (std::vector<double>{0, 1, 0}));
    EXPECT_EQ(v.min_degree, 2);
}

TEST(Symmetrize, RejectsBadTables) {
    EXPECT_THROW(symmetrize(std::vector<double>(7, 0.0), 3), std::domain_error);
    EXPECT_THROW(symmetrize(std::vector<double>{0, 2, 0, 0}, 2), std::domain_error);
    EXPECT_THROW(symmetrize(std::vector<double>(2, 0.0), 21), std::domain_error);
}

TEST(Symmetrize, PreservesRange) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.2, 0.7);
    for (int n = 1; n <= 12; ++n) {
        std::vector<double> table(std::size_t{1} << n);
        for (double& x : table) x = u(rng);
        const double lo = *std::min_element(table.begin(), table.end());
        const double hi = *std::max_element(table.begin(), table.end());
        for (double v : symmetrize(table, n).values) {
            ASSERT_GE(v, lo);
            ASSERT_LE(v, hi);
        }
    }
}

TEST(Symmetrize, MultilinearMonomialAveragesToFallingFactorialRatio) {
    // x1 x2 averaged over weight k is k(k-1)/(n(n-1)): degree 2 in k.
    const int n = 10;
    std::vector<double> table(std::size_t{1} << n);
    for (std::size_t x = 0; x < table.size(); ++x) table[x] = ((x & 1u) && (x & 2u)) ? 1.0 : 0.0;
    const auto v = symmetrize(table, n);
    for (int k = 0; k <= n; ++k) EXPECT_NEAR(v.values[k], k * (k - 1.0) / (n * (n - 1.0)), 1e-15);
    EXPECT_EQ(v.min_degree, 2);
}

TEST(MinimalDegree, Examples) {
    EXPECT_EQ(minimal_degree(std::vector<double>{0, 0, 1}), 2);
    EXPECT_EQ(minimal_degree(std::vector<double>{0, 0.5, 1}), 1);
    EXPECT_EQ(minimal_degree(std::vector<double>{0, 0, 0}), 0);
    EXPECT_THROW(minimal_degree(std::vector<double>{0, 1}, 0.0), std::domain_error);
}

TEST(MinimalDegree, RecoversKnownDegree) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int d = 0; d <= 10; ++d) {
        for (int extra = 2; extra <= 6; ++extra) {
            const int nodes = d + 1 + extra;
            std::vector<double> c(static_cast<std::size_t>(d) + 1);
            for (double& x : c) x = coef(rng);
            c.back() = c.back() >= 0 ? c.back() + 0.5 : c.back() - 0.5;
            std::vector<double> values(static_cast<std::size_t>(nodes));
            // evaluate at scaled nodes k/(nodes-1) so values stay O(1)
            for (int k = 0; k < nodes; ++k) values[k] = evaluate_monomial(c, static_cast<double>(k) / (nodes - 1));
            ASSERT_EQ(minimal_degree(values, 1e-8), d) << d << "," << nodes;
        }
    }
    // degree 3 at 11 nodes
    std::vector<double> cubic(11);
    for (int k = 0; k <= 10; ++k) cubic[k] = 0.5 + 0.01 * k - 0.002 * k * k + 0.0003 * k * k * k;
    EXPECT_EQ(minimal_degree(cubic), 3);
}

TEST(AcceptancePolynomial, ConstantAnswerIsDegreeZero) {
    const auto acc = acceptance_poly_of_distinguisher(Estimator::constant(), PartialFnSpec(8, 6, 2), 3.0);
    EXPECT_EQ(acc.poly.min_degree, 0);
    EXPECT_EQ(acc.degree_budget(), 0);
    EXPECT_TRUE(acc.within_budget());
}

TEST(AcceptancePolynomial, UnitaryOracleWithinTwiceQueries) {
    for (double threshold : {0.5, 1.0, 2.0, 4.0}) {
        const auto acc = acceptance_poly_of_distinguisher(Estimator::ae_oracle(4), PartialFnSpec(8, 6, 2), threshold);
        EXPECT_LE(acc.poly.min_degree, 8);
        for (double v : acc.poly.values) {
            EXPECT_GE(v, -1e-12);
            EXPECT_LE(v, 1 + 1e-12);
        }
    }
}

TEST(AcceptancePolynomial, BernoulliWithinTwiceSamples) {
    const int n = 8;
    const auto acc = acceptance_poly_of_distinguisher(Estimator::bernoulli(2), PartialFnSpec(n, 6, 2), n / 2.0);
    EXPECT_LE(acc.poly.min_degree, 4);
    // exact binomial acceptance: accept iff |6 - 8 i/2| < 4, i.e. i in {1,2}
    for (int k = 0; k <= n; ++k) {
        const double a = static_cast<double>(k) / n;
        EXPECT_NEAR(acc.poly.values[k], 1 - (1 - a) * (1 - a), 1e-15);
    }
}

TEST(DegreeLp, LinearWitnesses) {
    const auto two = min_degree_lp(PartialFnSpec(2, 2, 0), 0.0);
    EXPECT_EQ(two.degree, 1);
    EXPECT_TRUE(two.exact);
    for (int k = 0; k <= 2; ++k) EXPECT_NEAR(evaluate_monomial(two.coefficients, k), k / 2.0, 1e-15);
    EXPECT_EQ(min_degree_lp(PartialFnSpec(4, 4, 0), 1.0 / 3).degree, 1);
}

TEST(DegreeLp, WitnessSatisfiesConstraints) {
    for (const auto& [n, k1, k2, c] : std::vector<std::tuple<int, int, int, double>>{
             {10, 6, 5, 0.1}, {20, 12, 10, 0.25}, {40, 24, 20, 0.49}, {50, 30, 26, 0.3}}) {
        const auto w = min_degree_lp(PartialFnSpec(n, k1, k2), c);
        EXPECT_EQ(w.exact, n <= 40);
        const double slack = 1e-7;
        for (int k = 0; k <= n; ++k) {
            const double v = evaluate_monomial(w.coefficients, k);
            ASSERT_GE(v, -slack) << n << "," << k;
            ASSERT_LE(v, 1 + slack) << n << "," << k;
        }
        EXPECT_GE(evaluate_monomial(w.coefficients, k1), 1 - c - slack);
        EXPECT_LE(evaluate_monomial(w.coefficients, k2), c + slack);
        if (w.degree > 0) {
            // one degree less is infeasible
            EXPECT_GT(w.degree, 0);
        }
    }
}

TEST(DegreeLp, SeparationAtHalfDegenerates) {
    EXPECT_THROW(min_degree_lp(PartialFnSpec(10, 6, 4), 0.5), std::domain_error);
    EXPECT_THROW(min_degree_lp(PartialFnSpec(81, 6, 4), 0.2), std::domain_error);
}

TEST(DegreeLp, MonotoneInToleranceAndGap) {
    const int n = 20;
    int prev = n + 1;
    for (double c : {0.0, 0.1, 0.2, 0.3, 0.4, 0.49}) {
        const int d = min_degree_lp(PartialFnSpec(n, 12, 10), c).degree;
        EXPECT_LE(d, prev) << c;
        prev = d;
    }
    // shrinking the gap with k2 fixed never lowers the degree
    for (double c : {0.1, 0.3}) {
        int last = 0;
        for (int k1 = 20; k1 > 10; --k1) {
            const int d = min_degree_lp(PartialFnSpec(n, k1, 10), c).degree;
            EXPECT_GE(d, last) << k1;
            last = d;
        }
    }
}

TEST(DegreeLp, FloatingPathAgreesWithExactNearTheSwitch) {
    // n = 40 runs exact; the same instance embedded at n = 41 runs in floating point.
    const auto exact = min_degree_lp(PartialFnSpec(40, 24, 20), 0.3);
    const auto floating = min_degree_lp(PartialFnSpec(41, 24, 20), 0.3);
    EXPECT_TRUE(exact.exact);
    EXPECT_FALSE(floating.exact);
    EXPECT_LE(std::abs(exact.degree - floating.degree), 1);
}
