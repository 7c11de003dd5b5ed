#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/linalg.hpp"
#include "relfit/lp.hpp"
#include "relfit/rational.hpp"

namespace relfit {

/**
 * Cells lying on a proper face of the marginal cone C_A (the nonnegative hull
 * of the columns of A), together with a certificate c: c'a_i = 0 for every
 * i in `indices` and c'a_i > 0 for every other cell.
 */
struct FacialSet
{
    std::vector<std::size_t> indices;  ///< sorted, 0-based
    RationalVector certificate;        ///< length J

    friend bool operator==(const FacialSet&, const FacialSet&) = default;
};

struct PositivePreimage
{
    bool exists = false;
    std::optional<RationalVector> witness;  ///< z > 0 with Az = Aq
};

namespace detail {

inline void check_data_vector(const ModelMatrix& a, const RationalVector& q)
{
    if (q.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch,
                    "data vector has " + std::to_string(q.size()) + " entries, model has " +
                        std::to_string(a.num_cells()) + " cells");
    bool any = false;
    for (const auto& x : q) {
        if (x < 0)
            throw Error(ErrorCode::NegativeCount, "data vector has a negative entry");
        any = any || x != 0;
    }
    if (!any)
        throw Error(ErrorCode::ZeroData, "data vector is identically zero");
}

inline RationalVector margins(const ModelMatrix& a, const RationalVector& q)
{
    RationalVector t(a.num_rows(), Rational(0));
    for (std::size_t j = 0; j < a.num_rows(); ++j)
        for (std::size_t i : a.row_cells(j))
            t[j] += q[i];
    return t;
}

/** Equality rows Ax = t over the first num_cells variables of a wider LP. */
inline void add_margin_constraints(LinearProgram& lp, const ModelMatrix& a, const RationalVector& t,
                                   std::size_t num_vars)
{
    for (std::size_t j = 0; j < a.num_rows(); ++j) {
        RationalVector coeffs(num_vars, Rational(0));
        for (std::size_t i : a.row_cells(j))
            coeffs[i] = 1;
        lp.constraints.push_back({std::move(coeffs), Relation::equal, t[j]});
    }
}

inline std::vector<std::size_t> checked_index_set(const ModelMatrix& a, std::vector<std::size_t> cells)
{
    std::sort(cells.begin(), cells.end());
    if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
        throw Error(ErrorCode::DimensionMismatch, "index set has duplicate entries");
    if (!cells.empty() && cells.back() >= a.num_cells())
        throw Error(ErrorCode::DimensionMismatch,
                    "cell index " + std::to_string(cells.back() + 1) + " is out of range");
    return cells;
}

} // namespace detail

/**
 * Decides whether some z > 0 has the same margins as q by the LP
 *   maximize eps  s.t.  Az = Aq,  z_i - eps >= 0,  0 <= eps <= 1.
 * The answer is yes exactly when the optimum is positive.
 */
inline PositivePreimage has_positive_preimage(const ModelMatrix& a, const RationalVector& q)
{
    detail::check_data_vector(a, q);
    const std::size_t n = a.num_cells();
    if (std::all_of(q.begin(), q.end(), [](const Rational& x) { return x > 0; }))
        return {true, q};

    LinearProgram lp;
    lp.objective.assign(n + 1, Rational(0));
    lp.objective[n] = 1;
    detail::add_margin_constraints(lp, a, detail::margins(a, q), n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        RationalVector coeffs(n + 1, Rational(0));
        coeffs[i] = 1;
        coeffs[n] = -1;
        lp.constraints.push_back({std::move(coeffs), Relation::greater_equal, 0});
    }
    lp.bounds.assign(n + 1, VariableBounds{});
    lp.bounds[n] = VariableBounds::between(0, 1);

    const LPResult res = lp_solve(lp);
    if (res.status != LPStatus::optimal || res.optimum <= 0)
        return {false, std::nullopt};
    return {true, RationalVector(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(n))};
}

inline bool verify_certificate(const ModelMatrix& a, const std::vector<std::size_t>& cells,
                               const RationalVector& c)
{
    if (c.size() != a.num_rows())
        return false;
    std::vector<bool> in_face(a.num_cells(), false);
    for (auto i : cells)
        in_face[i] = true;
    for (std::size_t i = 0; i < a.num_cells(); ++i) {
        Rational s = 0;
        for (std::size_t j = 0; j < a.num_rows(); ++j)
            if (a.contains(j, i))
                s += c[j];
        if (in_face[i] ? s != 0 : s <= 0)
            return false;
    }
    return true;
}

/**
 * Certificate that `cells` is facial, or nullopt. Solves
 *   maximize eps  s.t.  c'a_i = 0 (i in F),  c'a_i >= eps (i not in F),  eps <= 1
 * with c free, and rescales the optimal c to a primitive integer vector.
 */
inline std::optional<RationalVector> facial_certificate(const ModelMatrix& a, std::vector<std::size_t> cells)
{
    cells = detail::checked_index_set(a, std::move(cells));
    if (cells.empty())
        throw Error(ErrorCode::EmptySet, "facial sets are nonempty");
    if (cells.size() == a.num_cells())
        throw Error(ErrorCode::FullSet, "the full cell set is not a proper face");

    const std::size_t rows = a.num_rows();
    std::vector<bool> in_face(a.num_cells(), false);
    for (auto i : cells)
        in_face[i] = true;

    LinearProgram lp;
    lp.objective.assign(rows + 1, Rational(0));
    lp.objective[rows] = 1;
    for (std::size_t i = 0; i < a.num_cells(); ++i) {
        RationalVector coeffs(rows + 1, Rational(0));
        for (std::size_t j = 0; j < rows; ++j)
            coeffs[j] = a(j, i);
        if (in_face[i]) {
            lp.constraints.push_back({std::move(coeffs), Relation::equal, 0});
        } else {
            coeffs[rows] = -1;
            lp.constraints.push_back({std::move(coeffs), Relation::greater_equal, 0});
        }
    }
    lp.bounds.assign(rows + 1, VariableBounds::free());
    lp.bounds[rows] = VariableBounds::between(0, 1);

    const LPResult res = lp_solve(lp);
    if (res.status != LPStatus::optimal || res.optimum <= 0)
        return std::nullopt;
    RationalVector c(res.solution.begin(), res.solution.begin() + static_cast<std::ptrdiff_t>(rows));
    return primitive_integer_vector(c, /*keep_sign=*/true);
}

/**
 * Smallest facial set containing supp(q): the cells i for which some x >= 0
 * with Ax = Aq has x_i > 0. One LP per undecided cell,
 *   maximize x_i  s.t.  Ax = Aq,  x >= 0,  x_i <= 1,
 * and every positive coordinate of an optimal x is settled at once.
 * Returns nullopt when that set is every cell, i.e. Aq is in the relative
 * interior of C_A.
 */
inline std::optional<FacialSet> minimal_facial_set(const ModelMatrix& a, const RationalVector& q)
{
    detail::check_data_vector(a, q);
    const std::size_t n = a.num_cells();
    const RationalVector t = detail::margins(a, q);

    std::vector<bool> reachable(n, false);
    for (std::size_t i = 0; i < n; ++i)
        reachable[i] = q[i] > 0;

    for (std::size_t i = 0; i < n; ++i) {
        if (reachable[i])
            continue;
        LinearProgram lp;
        lp.objective.assign(n, Rational(0));
        lp.objective[i] = 1;
        detail::add_margin_constraints(lp, a, t, n);
        lp.bounds.assign(n, VariableBounds{});
        lp.bounds[i] = VariableBounds::between(0, 1);
        const LPResult res = lp_solve(lp);
        if (res.status == LPStatus::optimal && res.optimum > 0)
            for (std::size_t k = 0; k < n; ++k)
                if (res.solution[k] > 0)
                    reachable[k] = true;
    }

    std::vector<std::size_t> face;
    for (std::size_t i = 0; i < n; ++i)
        if (reachable[i])
            face.push_back(i);
    if (face.size() == n)
        return std::nullopt;

    auto certificate = facial_certificate(a, face);
    if (!certificate)
        throw std::logic_error("minimal face of the data has no facial certificate");
    return FacialSet{std::move(face), std::move(*certificate)};
}

/** minimal_facial_set for the indicator vector of `support`. */
inline std::optional<FacialSet> minimal_facial_set_of_support(const ModelMatrix& a,
                                                              const std::vector<std::size_t>& support)
{
    RationalVector indicator(a.num_cells(), Rational(0));
    for (auto i : detail::checked_index_set(a, support))
        indicator[i] = 1;
    return minimal_facial_set(a, indicator);
}

/**
 * All proper facial sets, ordered by size then lexicographically.
 *
 * The minimal-face map S -> F*(S) is a closure operator whose non-full
 * images are exactly the facial sets. Starting from the closures of single
 * cells and repeatedly closing F + {i}, every face is reached while only
 * O(|faces| * |I|) closures are computed; closures are memoized by support.
 */
inline std::vector<FacialSet> enumerate_facial_sets(const ModelMatrix& a, std::size_t max_cells = 20)
{
    const std::size_t n = a.num_cells();
    if (n > max_cells)
        throw Error(ErrorCode::TooLarge,
                    "face enumeration is capped at " + std::to_string(max_cells) + " cells, model has " +
                        std::to_string(n));

    std::set<std::vector<std::size_t>> visited_supports;
    std::set<std::vector<std::size_t>> seen_faces;
    std::vector<FacialSet> faces;
    std::deque<std::vector<std::size_t>> pending;

    auto close = [&](const std::vector<std::size_t>& support) {
        if (!visited_supports.insert(support).second)
            return;
        auto face = minimal_facial_set_of_support(a, support);
        if (face && seen_faces.insert(face->indices).second) {
            pending.push_back(face->indices);
            faces.push_back(std::move(*face));
        }
    };

    for (std::size_t i = 0; i < n; ++i)
        close({i});
    while (!pending.empty()) {
        const auto face = pending.front();
        pending.pop_front();
        for (std::size_t i = 0; i < n; ++i) {
            if (std::binary_search(face.begin(), face.end(), i))
                continue;
            auto grown = face;
            grown.insert(std::upper_bound(grown.begin(), grown.end(), i), i);
            close(grown);
        }
    }

    std::sort(faces.begin(), faces.end(), [](const FacialSet& x, const FacialSet& y) {
        if (x.indices.size() != y.indices.size())
            return x.indices.size() < y.indices.size();
        return x.indices < y.indices;
    });
    return faces;
}

} // namespace relfit
