#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/geometry.hpp"
#include "relfit/linalg.hpp"
#include "relfit/model.hpp"
#include "relfit/rational.hpp"

namespace relfit {

struct FitConfig
{
    double margin_tol = 1e-10;             ///< relative tolerance on each margin after a full cycle
    double bisection_tol = 1e-9;           ///< tolerance on |sum(delta) - 1|
    std::size_t max_inner_iters = 1000000; ///< full cycles over the J subsets per IPF call
    std::size_t max_bisection_steps = 200;

    void validate() const
    {
        if (!(margin_tol > 0) || !(bisection_tol > 0))
            throw Error(ErrorCode::InvalidConfig, "tolerances must be positive");
        if (max_inner_iters < 1 || max_bisection_steps < 1)
            throw Error(ErrorCode::InvalidConfig, "iteration caps must be at least 1");
    }
};

enum class FitStatus { interior_mle, extended_mle };

inline std::string_view to_string(FitStatus s)
{
    return s == FitStatus::interior_mle ? "interior_mle" : "extended_mle";
}

struct FitDiagnostics
{
    std::vector<std::size_t> inner_iterations;  ///< cycles used by each IPF call, in call order
    std::size_t bisection_steps = 0;
    double margin_residual = 0;                 ///< ||A delta - gamma A q||_inf
    std::optional<double> divergence;           ///< D(q || delta), Poisson only
    std::vector<std::size_t> removed_cells;     ///< cells under a zero observed margin
    std::vector<std::size_t> removed_rows;      ///< subsets with zero observed margin
    bool threshold_agrees = true;               ///< numeric zero test matched the exact face
};

struct FitResult
{
    Distribution delta = Distribution::intensity({});
    double gamma = 1.0;
    FitStatus status = FitStatus::interior_mle;
    std::vector<std::size_t> support;
    std::optional<FacialSet> minimal_face;
    std::optional<ModelParameters> theta;
    FitDiagnostics diagnostics;
};

struct IpfOutcome
{
    std::vector<double> delta;
    std::size_t iterations = 0;
    double residual = 0;
};

namespace detail {

inline std::vector<double> margins(const ModelMatrix& a, std::span<const double> v)
{
    std::vector<double> t(a.num_rows(), 0.0);
    for (std::size_t j = 0; j < a.num_rows(); ++j)
        for (auto i : a.row_cells(j))
            t[j] += v[i];
    return t;
}

inline double relative_margin_residual(const ModelMatrix& a, std::span<const double> delta,
                                       std::span<const double> target)
{
    double worst = 0;
    for (std::size_t j = 0; j < a.num_rows(); ++j) {
        double s = 0;
        for (auto i : a.row_cells(j))
            s += delta[i];
        worst = std::max(worst, std::abs(target[j] - s) / std::max(1.0, target[j]));
    }
    return worst;
}

inline double total(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

} // namespace detail

/**
 * IPF(gamma): starting from the all-ones vector, cycle through the subsets
 * j = 1..J and rescale the cells of subset j by gamma A_j q / A_j delta.
 * Stops once every margin is within margin_tol * max(1, gamma A_j q) of its
 * target after a full cycle. Small entries are never truncated.
 */
inline IpfOutcome ipf_gamma(const ModelMatrix& a, std::span<const double> q, double gamma, const FitConfig& cfg)
{
    cfg.validate();
    if (q.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch, "data vector length differs from the number of cells");
    if (!(gamma > 0) || !std::isfinite(gamma))
        throw Error(ErrorCode::InvalidGamma, "adjustment factor must be positive, got " + std::to_string(gamma));
    for (double x : q)
        if (x < 0)
            throw Error(ErrorCode::NegativeCount, "data vector has a negative entry");

    std::vector<double> target = detail::margins(a, q);
    for (std::size_t j = 0; j < target.size(); ++j) {
        if (target[j] <= 0)
            throw Error(ErrorCode::ZeroMargin,
                        "observed margin of subset " + std::to_string(j + 1) + " is zero; reduce the model first");
        target[j] *= gamma;
    }

    std::vector<double> delta(a.num_cells(), 1.0);
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t cycle = 1; cycle <= cfg.max_inner_iters; ++cycle) {
        for (std::size_t j = 0; j < a.num_rows(); ++j) {
            double current = 0;
            for (auto i : a.row_cells(j))
                current += delta[i];
            const double factor = target[j] / current;
            for (auto i : a.row_cells(j))
                delta[i] *= factor;
        }
        residual = detail::relative_margin_residual(a, delta, target);
        if (residual <= cfg.margin_tol)
            return {std::move(delta), cycle, residual};
    }
    throw ConvergenceError(ErrorCode::MaxItersExceeded,
                           "IPF(" + std::to_string(gamma) + ") did not converge in " +
                               std::to_string(cfg.max_inner_iters) + " cycles, residual " + std::to_string(residual),
                           std::move(delta), residual);
}

/**
 * G-IPF. Poisson data and multinomial data whose IPF(1) limit already sums
 * to one are done after IPF(1). Otherwise gamma is bisected on
 * [1 / 1'Aq, min_j 1 / A_j q], raising the left end when the IPF(gamma) limit
 * sums to less than one. The status comes from the exact existence test; the
 * numeric threshold on small cells is reported alongside for comparison.
 */
inline FitResult g_ipf(const ModelMatrix& a, const ObservedTable& table, const FitConfig& cfg)
{
    cfg.validate();
    if (table.size() != a.num_cells())
        throw Error(ErrorCode::LengthMismatch,
                    "table has " + std::to_string(table.size()) + " cells, model has " +
                        std::to_string(a.num_cells()));
    const RationalVector q_exact = derive_q(table);
    const std::vector<double> q = to_double(q_exact);
    const std::vector<double> t = detail::margins(a, q);

    FitConfig inner = cfg;
    FitDiagnostics diag;
    auto run = [&](double gamma) {
        auto out = ipf_gamma(a, q, gamma, inner);
        diag.inner_iterations.push_back(out.iterations);
        return out;
    };

    IpfOutcome fit;
    double gamma = 1.0;
    if (table.sampling() == Sampling::poisson) {
        fit = run(1.0);
    } else {
        inner.margin_tol = std::min(cfg.margin_tol, cfg.bisection_tol / 10);
        fit = run(1.0);
        const double tol = cfg.bisection_tol;
        if (std::abs(detail::total(fit.delta) - 1.0) > tol) {
            double left = 1.0 / detail::total(t);
            double right = std::numeric_limits<double>::infinity();
            for (double x : t)
                right = std::min(right, 1.0 / x);

            IpfOutcome lo = run(left);
            IpfOutcome hi = run(right);
            double f_lo = detail::total(lo.delta) - 1.0;
            double f_hi = detail::total(hi.delta) - 1.0;
            for (int widen = 0; widen < 8 && f_hi < 0; ++widen) {
                right *= 2;
                hi = run(right);
                f_hi = detail::total(hi.delta) - 1.0;
            }
            for (int widen = 0; widen < 8 && f_lo > 0; ++widen) {
                left /= 2;
                lo = run(left);
                f_lo = detail::total(lo.delta) - 1.0;
            }
            if (f_lo > 0 || f_hi < 0) {
                std::ostringstream msg;
                msg << "cannot bracket the adjustment factor: sum at gamma_L=" << left << " is " << (f_lo + 1)
                    << ", at gamma_R=" << right << " is " << (f_hi + 1);
                throw ConvergenceError(ErrorCode::BracketFailure, msg.str(), hi.delta, f_hi);
            }

            if (std::abs(f_lo) <= tol) {
                fit = std::move(lo);
                gamma = left;
            } else if (std::abs(f_hi) <= tol) {
                fit = std::move(hi);
                gamma = right;
            } else {
                for (;;) {
                    if (diag.bisection_steps >= cfg.max_bisection_steps)
                        throw ConvergenceError(ErrorCode::MaxItersExceeded,
                                               "bisection on the adjustment factor did not converge",
                                               fit.delta, detail::total(fit.delta) - 1.0);
                    const double mid = 0.5 * (left + right);
                    fit = run(mid);
                    ++diag.bisection_steps;
                    const double f_mid = detail::total(fit.delta) - 1.0;
                    gamma = mid;
                    if (std::abs(f_mid) <= tol)
                        break;
                    if (mid <= left || mid >= right)
                        throw ConvergenceError(ErrorCode::MaxItersExceeded,
                                               "bisection interval collapsed before the sum reached 1",
                                               fit.delta, f_mid);
                    (f_mid < 0 ? left : right) = mid;
                }
            }
        }
    }

    FitResult result;
    result.gamma = gamma;
    const double threshold = std::sqrt(cfg.margin_tol) * detail::total(fit.delta) / static_cast<double>(a.num_cells());
    std::vector<bool> numeric_zero(a.num_cells());
    for (std::size_t i = 0; i < a.num_cells(); ++i)
        numeric_zero[i] = fit.delta[i] < threshold;

    if (has_positive_preimage(a, q_exact).exists) {
        result.status = FitStatus::interior_mle;
        result.support.resize(a.num_cells());
        std::iota(result.support.begin(), result.support.end(), std::size_t{0});
        diag.threshold_agrees = std::none_of(numeric_zero.begin(), numeric_zero.end(), [](bool z) { return z; });
    } else {
        result.status = FitStatus::extended_mle;
        result.minimal_face = minimal_facial_set(a, q_exact);
        result.support = result.minimal_face->indices;
        std::vector<bool> on_face(a.num_cells(), false);
        for (auto i : result.support)
            on_face[i] = true;
        for (std::size_t i = 0; i < a.num_cells(); ++i) {
            if (numeric_zero[i] == on_face[i])
                diag.threshold_agrees = false;
            if (!on_face[i])
                fit.delta[i] = 0.0;
        }
    }

    std::vector<double> target = t;
    for (auto& x : target)
        x *= gamma;
    const auto fitted = detail::margins(a, fit.delta);
    for (std::size_t j = 0; j < target.size(); ++j)
        diag.margin_residual = std::max(diag.margin_residual, std::abs(fitted[j] - target[j]));
    if (table.sampling() == Sampling::poisson)
        diag.divergence = bregman_divergence(q, fit.delta);

    result.delta = table.sampling() == Sampling::poisson
                       ? Distribution::intensity(std::move(fit.delta))
                       : Distribution::probability(std::move(fit.delta), cfg.bisection_tol);
    result.diagnostics = std::move(diag);
    return result;
}

// ---------------------------------------------------------------------------

struct ZeroMarginReduction
{
    ModelMatrix matrix;                    ///< A_*: columns I_* and nonzero rows
    std::vector<double> q;                 ///< q_*
    std::vector<std::size_t> kept_cells;   ///< I_* = I minus I_0
    std::vector<std::size_t> kept_rows;
    std::vector<std::size_t> removed_cells;  ///< I_0
    std::vector<std::size_t> removed_rows;   ///< J_0 plus rows that became zero
};

namespace detail {

struct ZeroMarginSets
{
    std::vector<std::size_t> zero_rows;    ///< J_0
    std::vector<std::size_t> zero_cells;   ///< I_0
};

inline ZeroMarginSets zero_margin_sets(const ModelMatrix& a, std::span<const double> q)
{
    ZeroMarginSets sets;
    std::vector<bool> removed(a.num_cells(), false);
    const auto t = margins(a, q);
    for (std::size_t j = 0; j < a.num_rows(); ++j) {
        if (t[j] != 0)
            continue;
        sets.zero_rows.push_back(j);
        for (auto i : a.row_cells(j))
            removed[i] = true;
    }
    for (std::size_t i = 0; i < a.num_cells(); ++i)
        if (removed[i])
            sets.zero_cells.push_back(i);
    return sets;
}

} // namespace detail

/**
 * Drops every cell covered by a subset with zero observed margin, then the
 * rows left without cells. The reduced model must still have full row rank.
 */
inline ZeroMarginReduction preprocess_zero_margins(const ModelMatrix& a, std::span<const double> q)
{
    if (q.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch, "data vector length differs from the number of cells");
    if (std::all_of(q.begin(), q.end(), [](double x) { return x == 0; }))
        throw Error(ErrorCode::ZeroData, "data vector is identically zero");

    const auto sets = detail::zero_margin_sets(a, q);
    std::vector<bool> removed(a.num_cells(), false);
    for (auto i : sets.zero_cells)
        removed[i] = true;

    ZeroMarginReduction out{a, {}, {}, {}, sets.zero_cells, {}};
    for (std::size_t i = 0; i < a.num_cells(); ++i)
        if (!removed[i]) {
            out.kept_cells.push_back(i);
            out.q.push_back(q[i]);
        }
    if (out.kept_cells.empty())
        throw Error(ErrorCode::EmptyReducedModel, "every cell lies under a zero margin");

    for (std::size_t j = 0; j < a.num_rows(); ++j) {
        bool any = false;
        for (auto i : a.row_cells(j))
            any = any || !removed[i];
        (any ? out.kept_rows : out.removed_rows).push_back(j);
    }
    Matrix<long long> raw(out.kept_rows.size(), out.kept_cells.size());
    for (std::size_t r = 0; r < out.kept_rows.size(); ++r)
        for (std::size_t c = 0; c < out.kept_cells.size(); ++c)
            raw(r, c) = a(out.kept_rows[r], out.kept_cells[c]);
    try {
        out.matrix = validate_model_matrix(raw);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::RankDeficient)
            throw;
        std::string rows;
        for (auto j : out.kept_rows)
            rows += (rows.empty() ? "" : ",") + std::to_string(j + 1);
        throw Error(ErrorCode::RankDeficientReduced,
                    "reduced model on rows {" + rows + "} loses full row rank: " + e.what());
    }
    return out;
}

struct ExistenceReport
{
    bool exists = false;
    std::optional<RationalVector> witness;  ///< positive z with Az = Aq
    std::optional<FacialSet> minimal_face;  ///< smallest face containing supp(q) when the MLE does not exist
};

/** The MLE exists iff some z > 0 has the observed margins; otherwise report the face. */
inline ExistenceReport mle_exists(const ModelMatrix& a, const ObservedTable& table)
{
    if (table.size() != a.num_cells())
        throw Error(ErrorCode::LengthMismatch, "table length differs from the number of cells");
    const auto q = derive_q(table);
    auto preimage = has_positive_preimage(a, q);
    if (preimage.exists)
        return {true, std::move(preimage.witness), std::nullopt};
    return {false, std::nullopt, minimal_facial_set(a, q)};
}

/**
 * Extended MLE: the unique point of the closure of the model that satisfies
 * A delta = gamma A q (and sums to one for probabilities).
 *
 * When the ordinary MLE does not exist the fit runs on the smallest face F
 * containing supp(q), where it does exist, and the cells off F are padded
 * with exact zeros. The result is checked against the margin equations and
 * the variety before it is returned.
 */
inline FitResult extended_mle(const ModelMatrix& a, const ObservedTable& table, const FitConfig& cfg = {})
{
    cfg.validate();
    if (table.size() != a.num_cells())
        throw Error(ErrorCode::LengthMismatch,
                    "table has " + std::to_string(table.size()) + " cells, model has " +
                        std::to_string(a.num_cells()));
    const std::vector<double> q = to_double(derive_q(table));
    const auto zero_sets = detail::zero_margin_sets(a, q);
    const auto existence = mle_exists(a, table);

    FitResult result;
    if (existence.exists) {
        result = g_ipf(a, table, cfg);
    } else {
        const auto& face = existence.minimal_face->indices;
        const auto restricted = restrict_to_cells(a, face);
        FitResult inner = g_ipf(restricted.matrix, table.restricted_to(face), cfg);
        std::vector<double> padded(a.num_cells(), 0.0);
        for (std::size_t c = 0; c < face.size(); ++c)
            padded[face[c]] = inner.delta[c];
        result.delta = table.sampling() == Sampling::poisson
                           ? Distribution::intensity(std::move(padded))
                           : Distribution::probability(std::move(padded), cfg.bisection_tol);
        result.gamma = inner.gamma;
        result.status = FitStatus::extended_mle;
        result.support = face;
        result.minimal_face = existence.minimal_face;
        result.diagnostics = std::move(inner.diagnostics);
        if (inner.status != FitStatus::interior_mle)
            throw std::logic_error("fit restricted to the minimal face is not interior");
    }
    result.diagnostics.removed_cells = zero_sets.zero_cells;
    result.diagnostics.removed_rows = zero_sets.zero_rows;

    std::vector<double> target = detail::margins(a, q);
    double scale = 1.0;
    for (auto& x : target) {
        x *= result.gamma;
        scale = std::max(scale, x);
    }
    const auto fitted = detail::margins(a, result.delta.values());
    double residual = 0;
    for (std::size_t j = 0; j < target.size(); ++j)
        residual = std::max(residual, std::abs(fitted[j] - target[j]));
    result.diagnostics.margin_residual = residual;
    if (table.sampling() == Sampling::poisson)
        result.diagnostics.divergence = bregman_divergence(q, result.delta.values());

    if (residual > 1e3 * cfg.margin_tol * scale)
        throw ConvergenceError(ErrorCode::MaxItersExceeded,
                               "fitted margins miss gamma A q by " + std::to_string(residual),
                               result.delta.values(), residual);
    if (!variety_member(result.delta, a, 1e-6))
        throw Error(ErrorCode::NotInVariety, "fitted distribution is not in the extended model");

    result.theta = factor_parameters(result.delta, a);
    return result;
}

} // namespace relfit
