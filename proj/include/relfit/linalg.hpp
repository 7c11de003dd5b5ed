#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/rational.hpp"

namespace relfit {

class ModelMatrix;
class KernelBasis;
inline ModelMatrix validate_model_matrix(const Matrix<long long>& raw);
inline KernelBasis kernel_basis(const ModelMatrix& a);

/**
 * Validated 0-1 model matrix: rows are generating subsets, columns are cells.
 * Every instance has binary entries, no zero column and full row rank.
 * Construct through validate_model_matrix().
 */
class ModelMatrix
{
public:
    std::size_t num_rows() const noexcept { return entries_.rows(); }
    std::size_t num_cells() const noexcept { return entries_.cols(); }

    bool contains(std::size_t row, std::size_t cell) const { return entries_(row, cell) != 0; }
    int operator()(std::size_t row, std::size_t cell) const { return entries_(row, cell); }

    const Matrix<int>& entries() const noexcept { return entries_; }

    /** Cells belonging to generating subset `row`, ascending. */
    const std::vector<std::size_t>& row_cells(std::size_t row) const { return row_cells_[row]; }

    RationalMatrix rational() const
    {
        RationalMatrix m(num_rows(), num_cells());
        for (std::size_t j = 0; j < num_rows(); ++j)
            for (std::size_t i = 0; i < num_cells(); ++i)
                m(j, i) = entries_(j, i);
        return m;
    }

    friend bool operator==(const ModelMatrix& a, const ModelMatrix& b) { return a.entries_ == b.entries_; }

private:
    explicit ModelMatrix(Matrix<int> entries) : entries_(std::move(entries))
    {
        row_cells_.resize(entries_.rows());
        for (std::size_t j = 0; j < entries_.rows(); ++j)
            for (std::size_t i = 0; i < entries_.cols(); ++i)
                if (entries_(j, i) != 0)
                    row_cells_[j].push_back(i);
    }

    friend ModelMatrix validate_model_matrix(const Matrix<long long>& raw);

    Matrix<int> entries_;
    std::vector<std::vector<std::size_t>> row_cells_;
};

// ---------------------------------------------------------------------------
// Exact elimination
// ---------------------------------------------------------------------------

/**
 * Rank over the rationals. Each row is first scaled to integers (which does
 * not change the rank), then Bareiss fraction-free elimination runs on the
 * integer matrix so that every intermediate entry stays a minor of the input.
 */
inline std::size_t exact_rank(const RationalMatrix& m)
{
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    Matrix<Integer> work(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        Integer den_lcm = 1;
        for (std::size_t c = 0; c < cols; ++c)
            if (m(r, c) != 0)
                den_lcm = boost::multiprecision::lcm(den_lcm, denominator_of(m(r, c)));
        for (std::size_t c = 0; c < cols; ++c)
            work(r, c) = numerator_of(m(r, c)) * (den_lcm / denominator_of(m(r, c)));
    }

    std::size_t rank = 0;
    Integer previous_pivot = 1;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && work(pivot, c) == 0)
            ++pivot;
        if (pivot == rows)
            continue;
        work.swap_rows(rank, pivot);
        for (std::size_t r = rank + 1; r < rows; ++r) {
            for (std::size_t k = c + 1; k < cols; ++k)
                work(r, k) = (work(rank, c) * work(r, k) - work(r, c) * work(rank, k)) / previous_pivot;
            work(r, c) = 0;
        }
        previous_pivot = work(rank, c);
        ++rank;
    }
    return rank;
}

struct RowEchelon
{
    RationalMatrix reduced;             ///< reduced row echelon form
    std::vector<std::size_t> pivots;    ///< pivot column of each nonzero row
};

/** Gauss-Jordan to reduced row echelon form, first nonzero entry as pivot. */
inline RowEchelon reduced_row_echelon(RationalMatrix m)
{
    std::vector<std::size_t> pivots;
    std::size_t lead_row = 0;
    for (std::size_t c = 0; c < m.cols() && lead_row < m.rows(); ++c) {
        std::size_t p = lead_row;
        while (p < m.rows() && m(p, c) == 0)
            ++p;
        if (p == m.rows())
            continue;
        m.swap_rows(lead_row, p);
        const Rational inv = 1 / m(lead_row, c);
        for (std::size_t k = c; k < m.cols(); ++k)
            m(lead_row, k) *= inv;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == lead_row || m(r, c) == 0)
                continue;
            const Rational factor = m(r, c);
            for (std::size_t k = c; k < m.cols(); ++k)
                m(r, k) -= factor * m(lead_row, k);
        }
        pivots.push_back(c);
        ++lead_row;
    }
    return {std::move(m), std::move(pivots)};
}

/** Indices of a maximal linearly independent subset of rows, chosen greedily in order. */
inline std::vector<std::size_t> independent_rows(const RationalMatrix& m)
{
    std::vector<std::size_t> kept;
    RationalMatrix stack;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        RationalMatrix candidate = stack;
        candidate.append_row(m.row(r));
        if (exact_rank(candidate) == kept.size() + 1) {
            kept.push_back(r);
            stack = std::move(candidate);
        }
    }
    return kept;
}

// ---------------------------------------------------------------------------
// Model matrix validation
// ---------------------------------------------------------------------------

inline ModelMatrix validate_model_matrix(const Matrix<long long>& raw)
{
    if (raw.rows() == 0 || raw.cols() == 0)
        throw Error(ErrorCode::DimensionMismatch, "model matrix must have at least one row and one column");
    Matrix<int> entries(raw.rows(), raw.cols());
    for (std::size_t j = 0; j < raw.rows(); ++j) {
        for (std::size_t i = 0; i < raw.cols(); ++i) {
            const long long v = raw(j, i);
            if (v != 0 && v != 1)
                throw Error(ErrorCode::NonBinaryEntry,
                            "entry " + std::to_string(v) + " at row " + std::to_string(j + 1) +
                                ", column " + std::to_string(i + 1) + " is not 0 or 1");
            entries(j, i) = static_cast<int>(v);
        }
    }
    for (std::size_t i = 0; i < raw.cols(); ++i) {
        bool any = false;
        for (std::size_t j = 0; j < raw.rows(); ++j)
            any = any || entries(j, i) != 0;
        if (!any)
            throw Error(ErrorCode::ZeroColumn, "column " + std::to_string(i + 1) + " is all zeros");
    }
    RationalMatrix q(raw.rows(), raw.cols());
    for (std::size_t j = 0; j < raw.rows(); ++j)
        for (std::size_t i = 0; i < raw.cols(); ++i)
            q(j, i) = entries(j, i);
    const std::size_t rank = exact_rank(q);
    if (rank < raw.rows())
        throw Error(ErrorCode::RankDeficient,
                    "model matrix has rank " + std::to_string(rank) + " but " +
                        std::to_string(raw.rows()) + " rows");
    return ModelMatrix(std::move(entries));
}

inline ModelMatrix validate_model_matrix(const std::vector<std::vector<long long>>& rows)
{
    return validate_model_matrix(Matrix<long long>::from_rows(rows));
}

// ---------------------------------------------------------------------------
// Kernel
// ---------------------------------------------------------------------------

/**
 * Rows spanning Ker(A). Rows produced by kernel_basis() are integer vectors
 * with content 1 and positive leading entry; from_rows() accepts any basis,
 * such as a hand-written one, after checking it.
 */
class KernelBasis
{
public:
    const RationalMatrix& rows() const noexcept { return rows_; }
    std::size_t size() const noexcept { return rows_.rows(); }
    std::size_t num_cells() const noexcept { return num_cells_; }
    RationalVector row(std::size_t k) const { return rows_.row(k); }

    static KernelBasis from_rows(const ModelMatrix& a, const RationalMatrix& rows)
    {
        if (rows.rows() != 0 && rows.cols() != a.num_cells())
            throw Error(ErrorCode::DimensionMismatch, "kernel rows must have one entry per cell");
        if (rows.rows() != a.num_cells() - a.num_rows())
            throw Error(ErrorCode::DimensionMismatch,
                        "kernel basis needs " + std::to_string(a.num_cells() - a.num_rows()) + " rows");
        for (std::size_t k = 0; k < rows.rows(); ++k)
            for (std::size_t j = 0; j < a.num_rows(); ++j) {
                Rational s = 0;
                for (std::size_t i : a.row_cells(j))
                    s += rows(k, i);
                if (s != 0)
                    throw Error(ErrorCode::DimensionMismatch,
                                "row " + std::to_string(k + 1) + " is not in Ker(A)");
            }
        if (exact_rank(rows) != rows.rows())
            throw Error(ErrorCode::RankDeficient, "kernel rows are linearly dependent");
        KernelBasis b;
        b.rows_ = rows;
        b.num_cells_ = a.num_cells();
        return b;
    }

private:
    friend KernelBasis kernel_basis(const ModelMatrix& a);

    RationalMatrix rows_;
    std::size_t num_cells_ = 0;
};

/**
 * Deterministic kernel basis: one vector per free column of the reduced row
 * echelon form, free columns in ascending order.
 */
inline KernelBasis kernel_basis(const ModelMatrix& a)
{
    const auto [rref, pivots] = reduced_row_echelon(a.rational());
    const std::size_t n = a.num_cells();
    std::vector<bool> is_pivot(n, false);
    for (auto p : pivots)
        is_pivot[p] = true;

    KernelBasis basis;
    basis.num_cells_ = n;
    basis.rows_ = RationalMatrix(0, n);
    for (std::size_t f = 0; f < n; ++f) {
        if (is_pivot[f])
            continue;
        RationalVector v(n, Rational(0));
        v[f] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -rref(r, f);
        basis.rows_.append_row(primitive_integer_vector(v));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Row space
// ---------------------------------------------------------------------------

struct RowSpaceMembership
{
    bool contains = false;
    std::optional<RationalVector> coefficients;  ///< k with k'A = v' when contained
};

inline RowSpaceMembership row_space_contains(const ModelMatrix& a, const RationalVector& v)
{
    if (v.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch,
                    "vector has " + std::to_string(v.size()) + " entries, model has " +
                        std::to_string(a.num_cells()) + " cells");
    const std::size_t rows = a.num_rows();
    // Solve A' k = v through the augmented system [A' | v].
    RationalMatrix system(a.num_cells(), rows + 1);
    for (std::size_t i = 0; i < a.num_cells(); ++i) {
        for (std::size_t j = 0; j < rows; ++j)
            system(i, j) = a(j, i);
        system(i, rows) = v[i];
    }
    const auto [rref, pivots] = reduced_row_echelon(std::move(system));
    if (!pivots.empty() && pivots.back() == rows)
        return {};
    RationalVector k(rows, Rational(0));
    for (std::size_t r = 0; r < pivots.size(); ++r)
        k[pivots[r]] = rref(r, rows);
    return {true, std::move(k)};
}

inline bool has_overall_effect(const ModelMatrix& a)
{
    return row_space_contains(a, RationalVector(a.num_cells(), Rational(1))).contains;
}

// ---------------------------------------------------------------------------
// Restriction to a subset of cells
// ---------------------------------------------------------------------------

struct RestrictedModel
{
    ModelMatrix matrix;
    std::vector<std::size_t> cells;  ///< original indices of the kept columns
    std::vector<std::size_t> rows;   ///< original indices of the kept rows
};

/**
 * A_F for a cell subset F, turned back into a valid model matrix: zero rows
 * are dropped, then linearly dependent rows. The row space, and with it the
 * model on F, is unchanged.
 */
inline RestrictedModel restrict_to_cells(const ModelMatrix& a, const std::vector<std::size_t>& cells)
{
    if (cells.empty())
        throw Error(ErrorCode::EmptySet, "cannot restrict a model to an empty set of cells");
    RationalMatrix sub(0, cells.size());
    std::vector<std::size_t> nonzero_rows;
    for (std::size_t j = 0; j < a.num_rows(); ++j) {
        RationalVector r(cells.size());
        bool any = false;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            r[c] = a(j, cells[c]);
            any = any || a(j, cells[c]) != 0;
        }
        if (any) {
            sub.append_row(r);
            nonzero_rows.push_back(j);
        }
    }
    const auto independent = independent_rows(sub);
    Matrix<long long> raw(independent.size(), cells.size());
    std::vector<std::size_t> kept_rows;
    for (std::size_t r = 0; r < independent.size(); ++r) {
        kept_rows.push_back(nonzero_rows[independent[r]]);
        for (std::size_t c = 0; c < cells.size(); ++c)
            raw(r, c) = a(kept_rows.back(), cells[c]);
    }
    return {validate_model_matrix(raw), cells, std::move(kept_rows)};
}

} // namespace relfit
