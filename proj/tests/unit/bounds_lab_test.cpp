#include <gmpxx.h>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "qmean/bounds_lab.hpp"

using namespace qmean;

namespace {

// Exact rational oracle for the constant-answer error: sum_k C(n,k) |n - 2k| / (2n 2^n).
double oracle_constant_error(int n) {
    mpz_class num = 0;
    for (int k = 0; k <= n; ++k) {
        mpz_class c;
        mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
        num += c * std::abs(n - 2 * k);
    }
    mpq_class v(num, mpz_class(2 * n) * (mpz_class(1) << n));
    v.canonicalize();
    return v.get_d();
}

// ln C(n,k) straight from big integers.
double oracle_log_binomial(int n, int k) {
    mpz_class c;
    mpz_bin_uiui(c.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    long exp = 0;
    const double mant = mpz_get_d_2exp(&exp, c.get_mpz_t());
    return std::log(mant) + exp * std::log(2.0);
}

}  // namespace

TEST(ConstAlgError, SmallEnumerations) {
    const auto two = const_alg_error_exact(2);
    EXPECT_NEAR(two.value, 0.25, 1e-15);
    EXPECT_NEAR(two.ratio, 0.25 * std::sqrt(4 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(two.ratio, 0.8862, 1e-4);
    EXPECT_NEAR(const_alg_error_exact(1).value, 0.5, 1e-15);
}

TEST(ConstAlgError, MatchesRationalOracle) {
    for (int n : {3, 10, 64, 101, 300}) {
        EXPECT_NEAR(const_alg_error_exact(n).value, oracle_constant_error(n), 1e-14) << n;
    }
}

TEST(ConstAlgError, RatioApproachesOne) {
    const double r4096 = const_alg_error_exact(4096).ratio;
    EXPECT_GE(r4096, 0.95);
    EXPECT_LE(r4096, 1.05);
    EXPECT_LT(std::abs(const_alg_error_exact(16384).ratio - 1), std::abs(const_alg_error_exact(1024).ratio - 1));
    double prev = 0.0;
    for (int n = 2; n <= 8192; n += 2) {
        const double r = const_alg_error_exact(n).ratio;
        ASSERT_GT(r, prev) << n;
        prev = r;
    }
}

TEST(Lemma61, Examples) {
    const auto b = lemma61_check(100, 1.0);
    EXPECT_TRUE(b.holds);
    EXPECT_NEAR(b.lhs, oracle_log_binomial(100, 60), 1e-10);
    EXPECT_NEAR(b.lhs, 64.79, 0.01);
    EXPECT_NEAR(b.rhs, 58.09, 0.01);
    EXPECT_TRUE(lemma61_check(36, 1.0).holds);
    EXPECT_NEAR(lemma61_check(36, 1.0).lhs, oracle_log_binomial(36, 24), 1e-10);
    EXPECT_TRUE(lemma61_check(10000, std::sqrt(10000.0) / 6).holds);
}

TEST(Lemma61, DomainErrors) {
    EXPECT_THROW(lemma61_check(100, 0.5), std::domain_error);
    EXPECT_THROW(lemma61_check(100, 2.0), std::domain_error);
    EXPECT_THROW(lemma61_check(3, 1.0), std::domain_error);
}

TEST(Lemma61, GridShape) {
    EXPECT_TRUE(lemma61_c_grid(35).empty());
    EXPECT_EQ(lemma61_c_grid(36), std::vector<double>{1.0});
    EXPECT_EQ(lemma61_c_grid(144).size(), 5u);  // 1, 1.25, ..., 2
}

TEST(Lemma61, BigIntegerCrossCheckOnGrid) {
    for (int n = 36; n <= 200; ++n) {
        for (double c : lemma61_c_grid(n)) {
            const auto b = lemma61_check(n, c);
            const double up = 0.5 * n + c * std::sqrt(static_cast<double>(n));
            const double down = 0.5 * n - c * std::sqrt(static_cast<double>(n));
            double lhs = INFINITY;
            for (double x : {std::floor(up), std::ceil(up), std::floor(down), std::ceil(down)})
                lhs = std::min(lhs, oracle_log_binomial(n, static_cast<int>(x)));
            ASSERT_NEAR(b.lhs, lhs, 1e-9);
            ASSERT_TRUE(b.holds);
        }
    }
}

TEST(NayakWu, FormulaValues) {
    EXPECT_NEAR(nayakwu_degree_bound(100, 60, 50), std::sqrt(10.0) + std::sqrt(2400.0) / 10, 1e-12);
    EXPECT_NEAR(nayakwu_degree_bound(100, 60, 50), 8.0613, 1e-4);
    EXPECT_NEAR(nayakwu_degree_bound(4, 4, 0), 1.0, 1e-15);
    EXPECT_NEAR(nayakwu_degree_bound(100, 51, 49), 32.066, 1e-3);
    EXPECT_NEAR(nayakwu_degree_bound(40, 24, 20), std::sqrt(10.0) + std::sqrt(24.0 * 16) / 4, 1e-12);
    EXPECT_THROW(nayakwu_degree_bound(10, 3, 3), std::domain_error);
}

TEST(NayakWu, ReflectionSymmetry) {
    for (int n : {7, 20, 64}) {
        for (int k1 = 1; k1 <= n; ++k1) {
            for (int k2 = 0; k2 < k1; ++k2) {
                ASSERT_NEAR(nayakwu_degree_bound(n, k1, k2), nayakwu_degree_bound(n, n - k2, n - k1), 1e-12);
            }
        }
    }
}

TEST(Floors, ShapeConventions) {
    EXPECT_EQ(floor_value(FloorShape::MinRootNInverseT, 4096, 0), 1.0 / 64);
    EXPECT_EQ(floor_value(FloorShape::MinRootNInverseT, 4096, 8), 1.0 / 64);
    EXPECT_EQ(floor_value(FloorShape::MinRootNInverseT, 4096, 128), 1.0 / 128);
    EXPECT_EQ(floor_value(FloorShape::InverseT, 4096, 0), 1.0);
    EXPECT_EQ(floor_value(FloorShape::InverseT, 4096, 32), 1.0 / 32);
}

TEST(FloorSweep, ConstantAnswerReducesToAsymptoticCheck) {
    SweepConfig cfg;
    cfg.estimators = {{EstimatorKind::Constant}};
    cfg.criterion = Criterion::AvgProb;
    cfg.n_grid = {4096};
    cfg.budget_grid = {8, 16};
    cfg.p = 1.0;
    cfg.measure_for = uniform_inputs;
    const auto res = floor_sweep(cfg);
    ASSERT_EQ(res.rows.size(), 1u);
    EXPECT_EQ(res.rows[0].T, 0);
    EXPECT_EQ(res.rows[0].floor, 1.0 / 64);
    // ratio * (2 pi)^{1/2} is the constant-algorithm ratio
    EXPECT_NEAR(res.rows[0].ratio * std::sqrt(2 * std::numbers::pi), const_alg_error_exact(4096).ratio, 1e-12);
}

TEST(FloorSweep, SkipsBudgetsAboveOneEighthOfN) {
    SweepConfig cfg;
    cfg.estimators = {{EstimatorKind::Ae}, {EstimatorKind::MedianReps, 4}};
    cfg.criterion = Criterion::WorstProb;
    cfg.n_grid = {256};
    cfg.budget_grid = {8, 16, 32};
    const auto res = floor_sweep(cfg);
    // ae: 8,16,32 kept; median r=4: 32 kept, 64 and 128 skipped
    EXPECT_EQ(res.rows.size(), 4u);
    EXPECT_EQ(res.skipped, 2);
    for (const auto& r : res.rows) EXPECT_LE(8 * r.T, 256);
}

TEST(FloorSweep, AverageCriterionNeedsMeasure) {
    SweepConfig cfg;
    cfg.estimators = {{EstimatorKind::Ae}};
    cfg.criterion = Criterion::AvgProb;
    cfg.n_grid = {64};
    cfg.budget_grid = {8};
    EXPECT_THROW(floor_sweep(cfg), std::domain_error);
    cfg.budget_grid.clear();
    EXPECT_THROW(floor_sweep(cfg), std::domain_error);
}

TEST(FloorSweep, MedianRepsUpperSide) {
    SweepConfig cfg;
    cfg.estimators = {{EstimatorKind::MedianReps, 4}};
    cfg.criterion = Criterion::WorstExpected;
    cfg.q = 1.0;
    cfg.n_grid = {256};
    cfg.budget_grid = {8, 16, 32, 64, 128};
    cfg.enforce_small_T = false;
    const auto res = floor_sweep(cfg);
    ASSERT_EQ(res.rows.size(), 5u);
    // value * M stays bounded: compare the largest and smallest budgets
    const double first = res.rows.front().value * 8;
    const double last = res.rows.back().value * 128;
    EXPECT_LT(last, 4 * first);
}
