#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relfit/error.hpp"
#include "relfit/geometry.hpp"
#include "relfit/linalg.hpp"
#include "relfit/rational.hpp"

namespace relfit {

enum class DistributionKind { probability, intensity };
enum class Sampling { poisson, multinomial };

/** Nonnegative cell parameters: probabilities or intensities. */
class Distribution
{
public:
    static Distribution intensity(std::vector<double> values)
    {
        check_nonnegative(values);
        return Distribution(std::move(values), DistributionKind::intensity);
    }

    /** sum_tol bounds |sum - 1|; fitted distributions pass their bisection tolerance. */
    static Distribution probability(std::vector<double> values, double sum_tol = 1e-12)
    {
        check_nonnegative(values);
        const double total = std::accumulate(values.begin(), values.end(), 0.0);
        if (std::abs(total - 1.0) > sum_tol)
            throw Error(ErrorCode::NotNormalized,
                        "probabilities sum to " + std::to_string(total) + ", not 1");
        return Distribution(std::move(values), DistributionKind::probability);
    }

    const std::vector<double>& values() const noexcept { return values_; }
    DistributionKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }

    std::vector<std::size_t> support() const
    {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] > 0)
                s.push_back(i);
        return s;
    }

private:
    Distribution(std::vector<double> values, DistributionKind kind)
        : values_(std::move(values)), kind_(kind) {}

    static void check_nonnegative(const std::vector<double>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i)
            if (!(values[i] >= 0) || !std::isfinite(values[i]))
                throw Error(ErrorCode::NegativeCount,
                            "cell " + std::to_string(i + 1) + " has a negative or non-finite value");
    }

    std::vector<double> values_;
    DistributionKind kind_;
};

/** Observed counts y with their sampling scheme. */
class ObservedTable
{
public:
    ObservedTable(std::vector<std::uint64_t> counts, Sampling sampling)
        : counts_(std::move(counts)), sampling_(sampling)
    {
        if (counts_.empty())
            throw Error(ErrorCode::LengthMismatch, "table has no cells");
        total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
        if (total_ == 0)
            throw Error(ErrorCode::AllZero, "every observed count is zero");
    }

    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    Sampling sampling() const noexcept { return sampling_; }
    std::uint64_t total() const noexcept { return total_; }
    std::size_t size() const noexcept { return counts_.size(); }

    ObservedTable restricted_to(const std::vector<std::size_t>& cells) const
    {
        std::vector<std::uint64_t> sub;
        sub.reserve(cells.size());
        for (auto i : cells)
            sub.push_back(counts_.at(i));
        return ObservedTable(std::move(sub), sampling_);
    }

private:
    std::vector<std::uint64_t> counts_;
    Sampling sampling_;
    std::uint64_t total_ = 0;
};

/** Multiplicative parameters theta and beta = log theta, one per generating subset. */
struct ModelParameters
{
    std::vector<double> theta;
    std::vector<double> beta;          ///< -inf where theta is zero
    std::vector<bool> zero_by_convention;  ///< subsets made only of zero cells
    bool unique = true;                ///< false when beta is a minimum-norm representative
};

struct DualReportRow
{
    double positive_monomial = 0;  ///< delta^{d+}
    double negative_monomial = 0;  ///< delta^{d-}
    std::optional<double> odds_ratio;  ///< undefined when delta^{d-} == 0
    double difference = 0;         ///< delta^{d+} - delta^{d-}
};

struct DualReport
{
    std::vector<DualReportRow> rows;

    bool all_differences_zero(double tol) const
    {
        return std::all_of(rows.begin(), rows.end(),
                           [&](const DualReportRow& r) { return std::abs(r.difference) <= tol; });
    }
};

// ---------------------------------------------------------------------------

/** q = y under Poisson sampling, y / N under multinomial sampling. */
inline RationalVector derive_q(const ObservedTable& table)
{
    RationalVector q;
    q.reserve(table.size());
    const bool scale = table.sampling() == Sampling::multinomial;
    for (auto y : table.counts())
        q.push_back(scale ? Rational(Integer(y), Integer(table.total())) : Rational(Integer(y)));
    return q;
}

/**
 * D(t||u) = sum t_i log(t_i/u_i) + (sum u - sum t), with 0 log 0 = 0.
 * Defined when supp(t) is inside supp(u).
 */
inline double bregman_divergence(std::span<const double> t, std::span<const double> u)
{
    if (t.size() != u.size())
        throw Error(ErrorCode::DimensionMismatch, "divergence of vectors with different lengths");
    double sum = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0 || u[i] < 0)
            throw Error(ErrorCode::NegativeCount, "divergence needs nonnegative vectors");
        if (t[i] > 0) {
            if (u[i] == 0)
                throw Error(ErrorCode::SupportViolation,
                            "t is positive at cell " + std::to_string(i + 1) + " where u is zero");
            sum += t[i] * std::log(t[i] / u[i]);
        }
        sum += u[i] - t[i];
    }
    return std::max(sum, 0.0);
}

/** delta_i = prod_j theta_j^{a_ji}. */
inline std::vector<double> distribution_from_parameters(const ModelMatrix& a, std::span<const double> theta)
{
    if (theta.size() != a.num_rows())
        throw Error(ErrorCode::DimensionMismatch, "need one parameter per generating subset");
    std::vector<double> delta(a.num_cells(), 1.0);
    for (std::size_t j = 0; j < a.num_rows(); ++j)
        for (auto i : a.row_cells(j))
            delta[i] *= theta[j];
    return delta;
}

/**
 * Membership in the variety X_A, independent of any kernel basis.
 *
 * Positive delta: D log delta = 0 for one basis D (any basis gives the same
 * answer). Otherwise supp(delta) must be facial, and delta restricted to the
 * face must lie in the variety of A_F.
 */
inline bool variety_member(const Distribution& delta, const ModelMatrix& a, double tol = 1e-8)
{
    if (delta.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch, "distribution length differs from the number of cells");
    const auto support = delta.support();
    if (support.empty())
        return true;  // apex of the cone
    if (support.size() < a.num_cells()) {
        if (!facial_certificate(a, support))
            return false;
        const auto restricted = restrict_to_cells(a, support);
        std::vector<double> sub;
        for (auto i : support)
            sub.push_back(delta[i]);
        return variety_member(Distribution::intensity(std::move(sub)), restricted.matrix, tol);
    }
    const auto basis = kernel_basis(a);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        double s = 0;
        for (std::size_t i = 0; i < a.num_cells(); ++i)
            if (basis.rows()(k, i) != 0)
                s += to_double(basis.rows()(k, i)) * std::log(delta[i]);
        if (std::abs(s) > tol)
            return false;
    }
    return true;
}

/** Exact counterpart of variety_member for rational delta. */
inline bool variety_member_exact(const RationalVector& delta, const ModelMatrix& a)
{
    if (delta.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch, "distribution length differs from the number of cells");
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (delta[i] < 0)
            throw Error(ErrorCode::NegativeCount, "distribution has a negative entry");
        if (delta[i] > 0)
            support.push_back(i);
    }
    if (support.empty())
        return true;
    if (support.size() < a.num_cells()) {
        if (!facial_certificate(a, support))
            return false;
        const auto restricted = restrict_to_cells(a, support);
        RationalVector sub;
        for (auto i : support)
            sub.push_back(delta[i]);
        return variety_member_exact(sub, restricted.matrix);
    }
    const auto basis = kernel_basis(a);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        Rational plus = 1;
        Rational minus = 1;
        for (std::size_t i = 0; i < a.num_cells(); ++i) {
            const Rational& d = basis.rows()(k, i);
            const auto e = numerator_of(d).convert_to<long>();
            for (long p = 0; p < std::abs(e); ++p)
                (e > 0 ? plus : minus) *= delta[i];
        }
        if (plus != minus)
            return false;
    }
    return true;
}

/**
 * Generalized odds ratios and cross-product differences for each row of the
 * given basis, with 0^0 = 1. Unlike variety_member this depends on the basis.
 */
inline DualReport dual_report(const Distribution& delta, const KernelBasis& basis)
{
    if (delta.size() != basis.num_cells())
        throw Error(ErrorCode::DimensionMismatch, "distribution length differs from the kernel width");
    DualReport report;
    for (std::size_t k = 0; k < basis.size(); ++k) {
        DualReportRow row;
        row.positive_monomial = 1;
        row.negative_monomial = 1;
        for (std::size_t i = 0; i < delta.size(); ++i) {
            const double d = to_double(basis.rows()(k, i));
            if (d > 0)
                row.positive_monomial *= std::pow(delta[i], d);
            else if (d < 0)
                row.negative_monomial *= std::pow(delta[i], -d);
        }
        if (row.negative_monomial != 0)
            row.odds_ratio = row.positive_monomial / row.negative_monomial;
        row.difference = row.positive_monomial - row.negative_monomial;
        report.rows.push_back(row);
    }
    return report;
}

/**
 * True iff every cell outside `support` lies in some generating subset that
 * contains no cell of `support`.
 */
inline bool a_feasible(const std::vector<std::size_t>& support, const ModelMatrix& a)
{
    std::vector<bool> in_support(a.num_cells(), false);
    for (auto i : support) {
        if (i >= a.num_cells())
            throw Error(ErrorCode::DimensionMismatch, "support index out of range");
        in_support[i] = true;
    }
    std::vector<bool> disjoint(a.num_rows(), true);
    for (std::size_t j = 0; j < a.num_rows(); ++j)
        for (auto i : a.row_cells(j))
            if (in_support[i])
                disjoint[j] = false;
    for (std::size_t i0 = 0; i0 < a.num_cells(); ++i0) {
        if (in_support[i0])
            continue;
        bool covered = false;
        for (std::size_t j = 0; j < a.num_rows() && !covered; ++j)
            covered = disjoint[j] && a.contains(j, i0);
        if (!covered)
            return false;
    }
    return true;
}

/**
 * Multiplicative parameters of delta, or nullopt when supp(delta) is not
 * A-feasible. Subsets made only of zero cells get theta = 0 and are flagged;
 * the others solve log delta_i = sum_j a_ji beta_j on the support in the
 * minimum-norm least-squares sense. Throws NotInVariety when that system is
 * inconsistent beyond 1e-8.
 */
inline std::optional<ModelParameters> factor_parameters(const Distribution& delta, const ModelMatrix& a)
{
    if (delta.size() != a.num_cells())
        throw Error(ErrorCode::DimensionMismatch, "distribution length differs from the number of cells");
    const auto support = delta.support();
    if (!a_feasible(support, a))
        return std::nullopt;

    std::vector<bool> in_support(a.num_cells(), false);
    for (auto i : support)
        in_support[i] = true;

    ModelParameters params;
    params.theta.assign(a.num_rows(), 0.0);
    params.beta.assign(a.num_rows(), -std::numeric_limits<double>::infinity());
    params.zero_by_convention.assign(a.num_rows(), true);
    std::vector<std::size_t> active;
    for (std::size_t j = 0; j < a.num_rows(); ++j)
        for (auto i : a.row_cells(j))
            if (in_support[i]) {
                active.push_back(j);
                params.zero_by_convention[j] = false;
                break;
            }
    if (active.empty())
        return params;

    Eigen::MatrixXd m(static_cast<Eigen::Index>(support.size()), static_cast<Eigen::Index>(active.size()));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(support.size()));
    for (std::size_t r = 0; r < support.size(); ++r) {
        rhs(static_cast<Eigen::Index>(r)) = std::log(delta[support[r]]);
        for (std::size_t c = 0; c < active.size(); ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = a(active[c], support[r]);
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(m);
    const Eigen::VectorXd beta = cod.solve(rhs);
    const double residual = (m * beta - rhs).lpNorm<Eigen::Infinity>();
    if (residual > 1e-8)
        throw Error(ErrorCode::NotInVariety,
                    "log-linear system on the support is inconsistent (residual " + std::to_string(residual) + ")");
    params.unique = static_cast<std::size_t>(cod.rank()) == active.size();
    for (std::size_t c = 0; c < active.size(); ++c) {
        params.beta[active[c]] = beta(static_cast<Eigen::Index>(c));
        params.theta[active[c]] = std::exp(beta(static_cast<Eigen::Index>(c)));
    }
    return params;
}

} // namespace relfit
