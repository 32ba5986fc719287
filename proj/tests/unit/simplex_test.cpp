#include <gmpxx.h>
#include <gtest/gtest.h>

#include "qmean/simplex.hpp"

using namespace qmean;

TEST(FeasibilitySimplex, FindsPointInBox) {
    // 1 <= x <= 2, 0 <= y <= 3, x + y >= 4
    const std::vector<std::vector<mpq_class>> A = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {-1, -1}};
    const std::vector<mpq_class> b = {2, -1, 3, 0, -4};
    const auto s = lp::feasible_point(A, b);
    ASSERT_TRUE(s.feasible);
    for (std::size_t i = 0; i < A.size(); ++i) {
        mpq_class lhs = A[i][0] * s.x[0] + A[i][1] * s.x[1];
        EXPECT_LE(lhs, b[i]);
    }
}

TEST(FeasibilitySimplex, DetectsInfeasibility) {
    // x <= 1 and x >= 1 + 1/3
    const std::vector<std::vector<mpq_class>> A = {{1}, {-1}};
    const std::vector<mpq_class> b = {1, mpq_class(-4, 3)};
    EXPECT_FALSE(lp::feasible_point(A, b).feasible);
}

TEST(FeasibilitySimplex, ExactBoundaryIsFeasible) {
    // x <= 1/3 and x >= 1/3: a single point, found exactly.
    const std::vector<std::vector<mpq_class>> A = {{1}, {-1}};
    const std::vector<mpq_class> b = {mpq_class(1, 3), mpq_class(-1, 3)};
    const auto s = lp::feasible_point(A, b);
    ASSERT_TRUE(s.feasible);
    EXPECT_EQ(s.x[0], mpq_class(1, 3));
}

TEST(FeasibilitySimplex, DegenerateSystemTerminates) {
    // Many redundant constraints through the origin.
    std::vector<std::vector<double>> A;
    std::vector<double> b;
    for (int i = 0; i < 30; ++i) {
        A.push_back({static_cast<double>(i % 5) - 2.0, static_cast<double>(i % 7) - 3.0, 1.0});
        b.push_back(0.0);
    }
    A.push_back({0, 0, -1});
    b.push_back(-1);
    const auto s = lp::feasible_point(A, b);
    if (s.feasible) {
        for (std::size_t i = 0; i < A.size(); ++i) {
            double lhs = 0;
            for (int j = 0; j < 3; ++j) lhs += A[i][j] * s.x[j];
            EXPECT_LE(lhs, b[i] + 1e-9);
        }
    }
}

TEST(FeasibilitySimplex, FloatingAndExactAgreeOnRandomSystems) {
    unsigned seed = 3;
    auto next = [&seed] {
        seed = seed * 1103515245u + 12345u;
        return static_cast<int>((seed >> 16) % 11) - 5;
    };
    for (int trial = 0; trial < 60; ++trial) {
        std::vector<std::vector<mpq_class>> Aq;
        std::vector<std::vector<double>> Ad;
        std::vector<mpq_class> bq;
        std::vector<double> bd;
        for (int i = 0; i < 8; ++i) {
            std::vector<mpq_class> rq;
            std::vector<double> rd;
            for (int j = 0; j < 3; ++j) {
                const int v = next();
                rq.emplace_back(v);
                rd.push_back(v);
            }
            const int rhs = next();
            Aq.push_back(rq);
            Ad.push_back(rd);
            bq.emplace_back(rhs);
            bd.push_back(rhs);
        }
        EXPECT_EQ(lp::feasible_point(Aq, bq).feasible, lp::feasible_point(Ad, bd).feasible) << trial;
    }
}
