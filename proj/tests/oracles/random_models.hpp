#pragma once

// Seeded generators for randomized tests: full-row-rank 0-1 matrices, count
// vectors and points of the model (positive, and normalized to sum one).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "relfit/linalg.hpp"
#include "relfit/model.hpp"

namespace oracle {

struct RandomModel
{
    std::vector<std::vector<int>> rows;
    relfit::ModelMatrix matrix;
};

/** Rejection sampling until validate_model_matrix() accepts. */
inline RandomModel random_model(std::mt19937_64& rng, std::size_t max_rows, std::size_t max_cells,
                                std::size_t min_cells = 2)
{
    std::uniform_int_distribution<std::size_t> cells_dist(min_cells, max_cells);
    std::bernoulli_distribution bit(0.5);
    for (;;) {
        const std::size_t n = cells_dist(rng);
        std::uniform_int_distribution<std::size_t> rows_dist(1, std::min(max_rows, n));
        const std::size_t j = rows_dist(rng);
        std::vector<std::vector<long long>> raw(j, std::vector<long long>(n));
        for (auto& r : raw)
            for (auto& x : r)
                x = bit(rng) ? 1 : 0;
        try {
            auto m = relfit::validate_model_matrix(raw);
            std::vector<std::vector<int>> rows(j, std::vector<int>(n));
            for (std::size_t r = 0; r < j; ++r)
                for (std::size_t c = 0; c < n; ++c)
                    rows[r][c] = static_cast<int>(raw[r][c]);
            return {std::move(rows), std::move(m)};
        } catch (const relfit::Error&) {
        }
    }
}

inline std::vector<std::uint64_t> random_counts(std::mt19937_64& rng, std::size_t n, std::uint64_t lo,
                                                std::uint64_t hi)
{
    std::uniform_int_distribution<std::uint64_t> dist(lo, hi);
    std::vector<std::uint64_t> y(n);
    for (auto& x : y)
        x = dist(rng);
    return y;
}

/** delta = exp(A' beta) for beta uniform in [-spread, spread]^J. */
inline std::vector<double> random_model_point(std::mt19937_64& rng, const std::vector<std::vector<int>>& a,
                                              double spread = 2.0)
{
    std::uniform_real_distribution<double> dist(-spread, spread);
    std::vector<double> theta(a.size());
    for (auto& t : theta)
        t = std::exp(dist(rng));
    std::vector<double> delta(a.front().size(), 1.0);
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t i = 0; i < delta.size(); ++i)
            if (a[j][i])
                delta[i] *= theta[j];
    return delta;
}

/**
 * A model point that sums to one. Multiplying every theta_j by e^tau scales
 * cell i by e^{tau n_i}, n_i >= 1 being the number of subsets containing i,
 * so the total is increasing in tau and the root is found by bisection.
 */
inline std::vector<double> random_normalized_point(std::mt19937_64& rng, const std::vector<std::vector<int>>& a,
                                                   double spread = 2.0)
{
    auto delta = random_model_point(rng, a, spread);
    std::vector<int> n(delta.size(), 0);
    for (const auto& r : a)
        for (std::size_t i = 0; i < delta.size(); ++i)
            n[i] += r[i];
    auto total = [&](double tau) {
        double s = 0;
        for (std::size_t i = 0; i < delta.size(); ++i)
            s += delta[i] * std::exp(tau * n[i]);
        return s;
    };
    double lo = -50, hi = 50;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < 1 ? lo : hi) = mid;
    }
    const double tau = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < delta.size(); ++i)
        delta[i] *= std::exp(tau * n[i]);
    double s = 0;
    for (double d : delta)
        s += d;
    for (auto& d : delta)
        d /= s;  // removes the last rounding error; stays on the model up to one ulp
    return delta;
}

} // namespace oracle
