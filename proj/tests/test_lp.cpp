#include <gtest/gtest.h>

#include "relfit/lp.hpp"

using namespace relfit;

namespace {

LinearConstraint row(RationalVector c, Relation r, Rational rhs) { return {std::move(c), r, std::move(rhs)}; }

} // namespace

TEST(Simplex, TextbookMaximum)
{
    // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
    LinearProgram lp;
    lp.objective = {3, 5};
    lp.constraints = {row({1, 0}, Relation::less_equal, 4), row({0, 2}, Relation::less_equal, 12),
                      row({3, 2}, Relation::less_equal, 18)};
    const auto r = lp_solve(lp);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_EQ(r.optimum, 36);
    EXPECT_EQ(r.solution, (RationalVector{2, 6}));
}

TEST(Simplex, ExactFractionalOptimum)
{
    // max x + y, 3x + y <= 2, x + 3y <= 2  ->  1 at (1/2, 1/2)
    LinearProgram lp;
    lp.objective = {1, 1};
    lp.constraints = {row({3, 1}, Relation::less_equal, 2), row({1, 3}, Relation::less_equal, 2)};
    const auto r = lp_solve(lp);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_EQ(r.optimum, 1);
    EXPECT_EQ(r.solution, (RationalVector{Rational(1, 2), Rational(1, 2)}));
}

TEST(Simplex, DetectsInfeasibility)
{
    LinearProgram lp;
    lp.objective = {1, 0};
    lp.constraints = {row({1, 1}, Relation::less_equal, 1), row({1, 1}, Relation::greater_equal, 2)};
    EXPECT_EQ(lp_solve(lp).status, LPStatus::infeasible);
}

TEST(Simplex, DetectsUnboundedness)
{
    LinearProgram lp;
    lp.objective = {1, 1};
    lp.constraints = {row({1, -1}, Relation::less_equal, 1)};
    EXPECT_EQ(lp_solve(lp).status, LPStatus::unbounded);
}

TEST(Simplex, RedundantEqualitiesAndNegativeRightHandSides)
{
    // x + y = 2 stated twice, -x <= -1, maximize -x - 2y  ->  -2 at (2, 0)
    LinearProgram lp;
    lp.objective = {-1, -2};
    lp.constraints = {row({1, 1}, Relation::equal, 2), row({2, 2}, Relation::equal, 4),
                      row({-1, 0}, Relation::less_equal, -1)};
    const auto r = lp_solve(lp);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_EQ(r.optimum, -2);
    EXPECT_EQ(r.solution, (RationalVector{2, 0}));
}

TEST(Simplex, FreeAndBoxedVariables)
{
    // max x - y with x free, y in [-3, 5], x - y <= 7, x <= 1  ->  7
    LinearProgram lp;
    lp.objective = {1, -1};
    lp.constraints = {row({1, -1}, Relation::less_equal, 7), row({1, 0}, Relation::less_equal, 1)};
    lp.bounds = {VariableBounds::free(), VariableBounds::between(-3, 5)};
    const auto r = lp_solve(lp);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_EQ(r.optimum, 4);
    EXPECT_EQ(r.solution[0] - r.solution[1], 4);

    lp.constraints.pop_back();
    lp.constraints.push_back(row({1, 0}, Relation::greater_equal, -10));
    const auto s = lp_solve(lp);
    ASSERT_EQ(s.status, LPStatus::optimal);
    EXPECT_EQ(s.optimum, 7);
    EXPECT_LE(s.solution[1], 5);
    EXPECT_GE(s.solution[1], -3);
}

TEST(Simplex, BlandRuleTerminatesOnCyclingExample)
{
    // Beale's example cycles under the largest-coefficient rule.
    LinearProgram lp;
    lp.objective = {Rational(3, 4), -150, Rational(1, 50), -6};
    lp.constraints = {
        row({Rational(1, 4), -60, Rational(-1, 25), 9}, Relation::less_equal, 0),
        row({Rational(1, 2), -90, Rational(-1, 50), 3}, Relation::less_equal, 0),
        row({0, 0, 1, 0}, Relation::less_equal, 1),
    };
    const auto r = lp_solve(lp);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_EQ(r.optimum, Rational(1, 20));
}

TEST(Simplex, ZeroObjectiveFeasibilityProblem)
{
    LinearProgram lp;
    lp.objective = {0, 0, 0};
    lp.constraints = {row({1, 1, 1}, Relation::equal, 1), row({1, -1, 0}, Relation::equal, 0)};
    const auto r = lp_solve(lp);
    ASSERT_EQ(r.status, LPStatus::optimal);
    EXPECT_EQ(r.solution[0] + r.solution[1] + r.solution[2], 1);
    EXPECT_EQ(r.solution[0], r.solution[1]);
}
