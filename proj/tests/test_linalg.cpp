#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "relfit/linalg.hpp"

using namespace relfit;

namespace {

ErrorCode code_of(const std::vector<std::vector<long long>>& rows)
{
    try {
        validate_model_matrix(rows);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "matrix was accepted";
    return ErrorCode::IoError;
}

} // namespace

TEST(ExactRank, MatchesHandComputedValues)
{
    EXPECT_EQ(exact_rank(fixtures::rational_rows(fixtures::fno_rows)), 3u);
    EXPECT_EQ(exact_rank(fixtures::rational_rows({{1, 2}, {2, 4}})), 1u);
    EXPECT_EQ(exact_rank(fixtures::rational_rows({{0, 0}, {0, 0}})), 0u);
    EXPECT_EQ(exact_rank(fixtures::rational_rows(fixtures::d1_rows)), 4u);
    RationalMatrix frac(2, 2);
    frac(0, 0) = Rational(1, 3);
    frac(0, 1) = Rational(1, 2);
    frac(1, 0) = Rational(2, 3);
    frac(1, 1) = 1;
    EXPECT_EQ(exact_rank(frac), 1u);
}

TEST(ReducedRowEchelon, PivotsAndEntries)
{
    const auto [rref, pivots] = reduced_row_echelon(fixtures::rational_rows({{2, 4, 2}, {1, 2, 3}}));
    EXPECT_EQ(pivots, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(rref(0, 0), 1);
    EXPECT_EQ(rref(0, 1), 2);
    EXPECT_EQ(rref(0, 2), 0);
    EXPECT_EQ(rref(1, 2), 1);
}

TEST(IndependentRows, GreedyInOrder)
{
    EXPECT_EQ(independent_rows(fixtures::rational_rows({{1, 1, 0}, {2, 2, 0}, {0, 1, 1}, {1, 2, 1}})),
              (std::vector<std::size_t>{0, 2}));
}

TEST(ValidateModelMatrix, AcceptsPaperMatrices)
{
    const auto a = fixtures::fno_matrix();
    EXPECT_EQ(a.num_rows(), 3u);
    EXPECT_EQ(a.num_cells(), 7u);
    EXPECT_EQ(a.row_cells(0), (std::vector<std::size_t>{0, 3, 4, 6}));
    EXPECT_TRUE(a.contains(2, 6));
    EXPECT_FALSE(a.contains(2, 0));
    EXPECT_NO_THROW(fixtures::sparse_matrix());
    EXPECT_NO_THROW(fixtures::a1_matrix());
}

TEST(ValidateModelMatrix, ReportsEachStructuralError)
{
    EXPECT_EQ(code_of({{1, 2}, {0, 1}}), ErrorCode::NonBinaryEntry);
    EXPECT_EQ(code_of({{1, -1}}), ErrorCode::NonBinaryEntry);
    EXPECT_EQ(code_of({{1, 0, 0}, {0, 1, 0}}), ErrorCode::ZeroColumn);
    EXPECT_EQ(code_of({{1, 1, 0}, {1, 1, 0}, {0, 0, 1}}), ErrorCode::RankDeficient);
    EXPECT_EQ(code_of({{1, 0}, {0, 1}, {1, 1}}), ErrorCode::RankDeficient);
    EXPECT_EQ(code_of({}), ErrorCode::DimensionMismatch);
}

TEST(ValidateModelMatrix, NonBinaryMessageCarriesOneBasedCoordinates)
{
    try {
        validate_model_matrix({{1, 0, 1}, {0, 3, 1}});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("row 2, column 2"), std::string::npos) << e.what();
    }
}

TEST(KernelBasis, ComputedBasisForThreeSubsetsIsTheOddsRatioBasis)
{
    const auto basis = kernel_basis(fixtures::fno_matrix());
    EXPECT_EQ(basis.size(), 4u);
    EXPECT_EQ(basis.rows(), fixtures::rational_rows(fixtures::d1_rows));
}

TEST(KernelBasis, EveryVectorIsInTheKernelAndHasFullRank)
{
    for (const auto& rows : {fixtures::fno_rows, fixtures::sparse_rows, fixtures::a1_rows}) {
        const auto a = validate_model_matrix(rows);
        const auto basis = kernel_basis(a);
        ASSERT_EQ(basis.size(), a.num_cells() - a.num_rows());
        for (std::size_t k = 0; k < basis.size(); ++k) {
            const auto d = basis.row(k);
            for (std::size_t j = 0; j < a.num_rows(); ++j) {
                Rational s = 0;
                for (auto i : a.row_cells(j))
                    s += d[i];
                EXPECT_EQ(s, 0);
            }
            const auto first = std::find_if(d.begin(), d.end(), [](const Rational& x) { return x != 0; });
            ASSERT_NE(first, d.end());
            EXPECT_GT(*first, 0);
            EXPECT_EQ(primitive_integer_vector(d), d);
        }
        EXPECT_EQ(exact_rank(basis.rows()), basis.size());
    }
}

TEST(KernelBasis, SameKernelForMatricesWithTheSameRowSpace)
{
    EXPECT_EQ(kernel_basis(fixtures::sparse_matrix()).rows(), kernel_basis(fixtures::a1_matrix()).rows());
}

TEST(KernelBasis, IdentityHasEmptyKernel)
{
    const auto basis = kernel_basis(validate_model_matrix({{1, 0}, {0, 1}}));
    EXPECT_EQ(basis.size(), 0u);
    EXPECT_EQ(basis.num_cells(), 2u);
}

TEST(KernelBasis, FromRowsAcceptsAnAlternativeBasisAndRejectsBadOnes)
{
    const auto a = fixtures::fno_matrix();
    EXPECT_NO_THROW(KernelBasis::from_rows(a, fixtures::rational_rows(fixtures::d2_rows)));

    auto dependent = fixtures::d2_rows;
    dependent[3] = {0, 0, 2, 2, 0, 0, -2};
    EXPECT_THROW(KernelBasis::from_rows(a, fixtures::rational_rows(dependent)), Error);

    auto outside = fixtures::d2_rows;
    outside[0] = {1, 0, 0, 0, 0, 0, 0};
    EXPECT_THROW(KernelBasis::from_rows(a, fixtures::rational_rows(outside)), Error);

    auto too_few = fixtures::d2_rows;
    too_few.pop_back();
    EXPECT_THROW(KernelBasis::from_rows(a, fixtures::rational_rows(too_few)), Error);
}

TEST(RowSpace, OverallEffect)
{
    EXPECT_FALSE(has_overall_effect(fixtures::fno_matrix()));
    EXPECT_FALSE(has_overall_effect(fixtures::sparse_matrix()));
    EXPECT_FALSE(has_overall_effect(fixtures::a1_matrix()));
    EXPECT_TRUE(has_overall_effect(validate_model_matrix({{1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}})));
}

TEST(RowSpace, CoefficientsReproduceTheVector)
{
    const auto a = fixtures::fno_matrix();
    const RationalVector v{1, 2, 3, 3, 4, 5, 6};
    const auto m = row_space_contains(a, v);
    ASSERT_TRUE(m.contains);
    ASSERT_TRUE(m.coefficients);
    EXPECT_EQ(*m.coefficients, (RationalVector{1, 2, 3}));
    EXPECT_FALSE(row_space_contains(a, RationalVector{1, 0, 0, 0, 0, 0, 0}).contains);
    EXPECT_THROW(row_space_contains(a, RationalVector{1, 2}), Error);
}

TEST(RestrictToCells, DropsZeroAndDependentRows)
{
    const auto a = fixtures::fno_matrix();
    const auto r = restrict_to_cells(a, {1, 2, 5});
    EXPECT_EQ(r.matrix.num_rows(), 2u);
    EXPECT_EQ(r.rows, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(r.cells, (std::vector<std::size_t>{1, 2, 5}));

    const auto e = restrict_to_cells(fixtures::sparse_matrix(), {0, 1, 3, 4});
    EXPECT_EQ(e.matrix.num_rows(), 2u);
    EXPECT_EQ(e.rows, (std::vector<std::size_t>{0, 2}));

    EXPECT_THROW(restrict_to_cells(a, {}), Error);
}
