#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/rational.hpp"

namespace relfit {

enum class Relation { less_equal, equal, greater_equal };

struct LinearConstraint
{
    RationalVector coefficients;
    Relation relation = Relation::less_equal;
    Rational rhs = 0;
};

struct VariableBounds
{
    std::optional<Rational> lower = Rational(0);
    std::optional<Rational> upper;

    static VariableBounds free() { return {std::nullopt, std::nullopt}; }
    static VariableBounds between(Rational lo, Rational hi) { return {std::move(lo), std::move(hi)}; }
};

/** maximize objective'x subject to the constraints and per-variable bounds. */
struct LinearProgram
{
    RationalVector objective;
    std::vector<LinearConstraint> constraints;
    std::vector<VariableBounds> bounds;  ///< empty means x >= 0 for every variable
};

enum class LPStatus { optimal, infeasible, unbounded };

struct LPResult
{
    LPStatus status = LPStatus::infeasible;
    Rational optimum = 0;
    RationalVector solution;  ///< populated when status == optimal
};

namespace detail {

/** Dense simplex tableau with Bland's anti-cycling rule, exact arithmetic. */
class SimplexTableau
{
public:
    SimplexTableau(std::size_t num_columns) : width_(num_columns + 1) {}

    void add_row(RationalVector row, std::size_t basic)
    {
        rows_.push_back(std::move(row));
        basis_.push_back(basic);
    }

    void set_objective(const RationalVector& costs)
    {
        objective_.assign(width_, Rational(0));
        for (std::size_t j = 0; j + 1 < width_; ++j)
            objective_[j] = costs[j];
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const Rational cb = objective_[basis_[r]];
            if (cb == 0)
                continue;
            for (std::size_t j = 0; j < width_; ++j)
                if (rows_[r][j] != 0)
                    objective_[j] -= cb * rows_[r][j];
        }
    }

    /** Returns false when the objective is unbounded above. */
    bool maximize(const std::vector<bool>& may_enter)
    {
        for (;;) {
            std::size_t entering = width_;
            for (std::size_t j = 0; j + 1 < width_; ++j)
                if (may_enter[j] && objective_[j] > 0) {
                    entering = j;
                    break;
                }
            if (entering == width_)
                return true;

            std::size_t leaving = rows_.size();
            Rational best_ratio;
            for (std::size_t r = 0; r < rows_.size(); ++r) {
                if (rows_[r][entering] <= 0)
                    continue;
                Rational ratio = rows_[r][width_ - 1] / rows_[r][entering];
                if (leaving == rows_.size() || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[leaving])) {
                    leaving = r;
                    best_ratio = std::move(ratio);
                }
            }
            if (leaving == rows_.size())
                return false;
            pivot(leaving, entering);
        }
    }

    void pivot(std::size_t r, std::size_t c)
    {
        const Rational inv = 1 / rows_[r][c];
        for (auto& x : rows_[r])
            if (x != 0)
                x *= inv;
        auto eliminate = [&](RationalVector& target) {
            if (target[c] == 0)
                return;
            const Rational factor = target[c];
            for (std::size_t j = 0; j < width_; ++j)
                if (rows_[r][j] != 0)
                    target[j] -= factor * rows_[r][j];
        };
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (i != r)
                eliminate(rows_[i]);
        eliminate(objective_);
        basis_[r] = c;
    }

    void remove_row(std::size_t r)
    {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    }

    Rational value() const { return -objective_[width_ - 1]; }
    std::size_t num_rows() const { return rows_.size(); }
    std::size_t basic(std::size_t r) const { return basis_[r]; }
    const Rational& entry(std::size_t r, std::size_t c) const { return rows_[r][c]; }
    const Rational& rhs(std::size_t r) const { return rows_[r][width_ - 1]; }

private:
    std::size_t width_;
    std::vector<RationalVector> rows_;
    std::vector<std::size_t> basis_;
    RationalVector objective_;
};

} // namespace detail

/**
 * Exact two-phase primal simplex. Bounds are folded into a standard form
 * with nonnegative columns (shift by the lower bound, reflect variables with
 * only an upper bound, split free variables); Bland's rule picks both the
 * entering and the leaving column, which guarantees termination.
 */
inline LPResult lp_solve(const LinearProgram& lp)
{
    const std::size_t n = lp.objective.size();
    if (!lp.bounds.empty() && lp.bounds.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "bounds must be given for every variable or none");
    for (const auto& con : lp.constraints)
        if (con.coefficients.size() != n)
            throw Error(ErrorCode::DimensionMismatch,
                        "constraint has " + std::to_string(con.coefficients.size()) +
                            " coefficients for " + std::to_string(n) + " variables");

    // x_v = offset_v + sum of sign * y_col over the columns owned by v.
    struct Column { std::size_t var; int sign; };
    std::vector<Column> columns;
    RationalVector offset(n, Rational(0));
    std::vector<LinearConstraint> constraints = lp.constraints;

    for (std::size_t v = 0; v < n; ++v) {
        const VariableBounds b = lp.bounds.empty() ? VariableBounds{} : lp.bounds[v];
        if (b.lower && b.upper && *b.upper < *b.lower)
            return {LPStatus::infeasible, 0, {}};
        if (b.lower) {
            offset[v] = *b.lower;
            columns.push_back({v, +1});
            if (b.upper) {
                RationalVector coeffs(n, Rational(0));
                coeffs[v] = 1;
                constraints.push_back({std::move(coeffs), Relation::less_equal, *b.upper});
            }
        } else if (b.upper) {
            offset[v] = *b.upper;
            columns.push_back({v, -1});
        } else {
            columns.push_back({v, +1});
            columns.push_back({v, -1});
        }
    }

    const std::size_t ny = columns.size();
    const std::size_t m = constraints.size();

    // Standard-form rows with nonnegative right-hand sides.
    std::vector<RationalVector> body(m, RationalVector(ny, Rational(0)));
    std::vector<Rational> rhs(m);
    std::vector<Relation> rel(m);
    std::size_t num_slack = 0;
    std::size_t num_artificial = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& con = constraints[i];
        Rational b = con.rhs;
        for (std::size_t v = 0; v < n; ++v)
            if (con.coefficients[v] != 0)
                b -= con.coefficients[v] * offset[v];
        for (std::size_t k = 0; k < ny; ++k)
            body[i][k] = con.coefficients[columns[k].var] * columns[k].sign;
        rel[i] = con.relation;
        if (b < 0) {
            b = -b;
            for (auto& x : body[i])
                x = -x;
            if (rel[i] == Relation::less_equal)
                rel[i] = Relation::greater_equal;
            else if (rel[i] == Relation::greater_equal)
                rel[i] = Relation::less_equal;
        }
        rhs[i] = b;
        if (rel[i] != Relation::equal)
            ++num_slack;
        if (rel[i] != Relation::less_equal)
            ++num_artificial;
    }

    const std::size_t total = ny + num_slack + num_artificial;
    detail::SimplexTableau tableau(total);
    std::size_t next_slack = ny;
    std::size_t next_artificial = ny + num_slack;
    for (std::size_t i = 0; i < m; ++i) {
        RationalVector row(total + 1, Rational(0));
        std::copy(body[i].begin(), body[i].end(), row.begin());
        row[total] = rhs[i];
        std::size_t basic = 0;
        if (rel[i] == Relation::less_equal) {
            row[next_slack] = 1;
            basic = next_slack++;
        } else {
            if (rel[i] == Relation::greater_equal)
                row[next_slack++] = -1;
            row[next_artificial] = 1;
            basic = next_artificial++;
        }
        tableau.add_row(std::move(row), basic);
    }

    auto is_artificial = [&](std::size_t j) { return j >= ny + num_slack; };

    if (num_artificial > 0) {
        RationalVector phase_one(total, Rational(0));
        for (std::size_t j = ny + num_slack; j < total; ++j)
            phase_one[j] = -1;
        tableau.set_objective(phase_one);
        tableau.maximize(std::vector<bool>(total, true));
        if (tableau.value() < 0)
            return {LPStatus::infeasible, 0, {}};
        // Drive zero-valued artificials out of the basis; drop redundant rows.
        for (std::size_t r = 0; r < tableau.num_rows();) {
            if (!is_artificial(tableau.basic(r))) {
                ++r;
                continue;
            }
            std::size_t replacement = total;
            for (std::size_t j = 0; j < ny + num_slack; ++j)
                if (tableau.entry(r, j) != 0) {
                    replacement = j;
                    break;
                }
            if (replacement == total) {
                tableau.remove_row(r);
            } else {
                tableau.pivot(r, replacement);
                ++r;
            }
        }
    }

    RationalVector costs(total, Rational(0));
    Rational constant = 0;
    for (std::size_t v = 0; v < n; ++v)
        constant += lp.objective[v] * offset[v];
    for (std::size_t k = 0; k < ny; ++k)
        costs[k] = lp.objective[columns[k].var] * columns[k].sign;
    tableau.set_objective(costs);
    std::vector<bool> may_enter(total, true);
    for (std::size_t j = ny + num_slack; j < total; ++j)
        may_enter[j] = false;
    if (!tableau.maximize(may_enter))
        return {LPStatus::unbounded, 0, {}};

    RationalVector y(total, Rational(0));
    for (std::size_t r = 0; r < tableau.num_rows(); ++r)
        y[tableau.basic(r)] = tableau.rhs(r);
    RationalVector x = offset;
    for (std::size_t k = 0; k < ny; ++k)
        if (y[k] != 0)
            x[columns[k].var] += columns[k].sign * y[k];
    return {LPStatus::optimal, tableau.value() + constant, std::move(x)};
}

} // namespace relfit
