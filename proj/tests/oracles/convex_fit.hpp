#pragma once

// Reference maximum likelihood fits computed by convex optimization in the
// log-linear parametrization log(delta) = A' beta. Used only as a check on
// the production fitting code.
//
// Poisson: minimize  f(beta) = sum_i exp((A'beta)_i) - q'A'beta. The
// minimizer satisfies A delta = A q. Two independent methods are provided:
//   newton    damped Newton with Armijo backtracking. The Hessian
//             A diag(delta) A' is positive definite for a full-rank A.
//   gradient  first-order descent with Barzilai-Borwein steps and a
//             nonmonotone Armijo test against the worst of the last few
//             objective values. Slower but shares nothing with the Newton
//             linear algebra.
//
// Multinomial: for a scale g the same minimization on g*q gives delta(g) with
// A delta = g A q; the total of delta(g) is increasing in g, so g is found by
// geometric bisection until the total is one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <stdexcept>
#include <vector>

namespace oracle {

enum class Method { newton, gradient };

struct OracleFit
{
    std::vector<double> delta;
    double gamma = 1;
    std::size_t iterations = 0;
};

namespace detail {

inline std::vector<double> exp_design(const std::vector<std::vector<int>>& a, const std::vector<double>& beta)
{
    const std::size_t n = a.front().size();
    std::vector<double> delta(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (std::size_t j = 0; j < a.size(); ++j)
            s += a[j][i] * beta[j];
        delta[i] = std::exp(s);
    }
    return delta;
}

inline double objective(const std::vector<std::vector<int>>& a, const std::vector<double>& q,
                        const std::vector<double>& beta)
{
    const auto delta = exp_design(a, beta);
    double f = 0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        double eta = 0;
        for (std::size_t j = 0; j < a.size(); ++j)
            eta += a[j][i] * beta[j];
        f += delta[i] - q[i] * eta;
    }
    return f;
}

} // namespace detail

/** Solves the symmetric positive definite system h x = g by Gaussian elimination with partial pivoting. */
inline std::vector<double> solve(std::vector<std::vector<double>> h, std::vector<double> g)
{
    const std::size_t n = g.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t pivot = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(h[r][c]) > std::abs(h[pivot][c]))
                pivot = r;
        if (h[pivot][c] == 0)
            throw std::runtime_error("singular Hessian");
        std::swap(h[c], h[pivot]);
        std::swap(g[c], g[pivot]);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = h[r][c] / h[c][c];
            for (std::size_t k = c; k < n; ++k)
                h[r][k] -= f * h[c][k];
            g[r] -= f * g[c];
        }
    }
    std::vector<double> x(n);
    for (std::size_t c = n; c-- > 0;) {
        double s = g[c];
        for (std::size_t k = c + 1; k < n; ++k)
            s -= h[c][k] * x[k];
        x[c] = s / h[c][c];
    }
    return x;
}

/**
 * Poisson fit by damped Newton. `beta` is used as the starting point and
 * updated in place, which lets callers warm-start a sequence of fits.
 */
inline OracleFit poisson_descent(const std::vector<std::vector<int>>& a, const std::vector<double>& q,
                                 std::vector<double>& beta, double grad_tol = 1e-12, std::size_t max_iters = 500)
{
    const std::size_t rows = a.size();
    double best_norm = INFINITY;
    std::vector<double> best_delta;
    for (std::size_t it = 0; it < max_iters; ++it) {
        const auto delta = detail::exp_design(a, beta);
        std::vector<double> grad(rows, 0.0);
        std::vector<std::vector<double>> hess(rows, std::vector<double>(rows, 0.0));
        double grad_norm = 0, scale = 1;
        for (std::size_t j = 0; j < rows; ++j) {
            double target = 0;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                grad[j] += a[j][i] * (delta[i] - q[i]);
                target += a[j][i] * q[i];
                for (std::size_t k = 0; k < rows; ++k)
                    hess[j][k] += a[j][i] * a[k][i] * delta[i];
            }
            grad_norm = std::max(grad_norm, std::abs(grad[j]));
            scale = std::max(scale, target);
        }
        if (grad_norm <= grad_tol * scale)
            return {delta, 1.0, it};
        if (grad_norm / scale < best_norm) {
            best_norm = grad_norm / scale;
            best_delta = delta;
        }

        const auto dir = solve(hess, grad);
        double slope = 0;
        for (std::size_t j = 0; j < rows; ++j)
            slope += grad[j] * dir[j];
        std::vector<double> trial(rows);
        if (grad_norm <= 1e-6 * scale) {
            // Local quadratic convergence region, where objective differences drown in rounding.
            for (std::size_t j = 0; j < rows; ++j)
                beta[j] -= dir[j];
            continue;
        }
        const double f0 = detail::objective(a, q, beta);
        double step = 1.0;
        for (;;) {
            for (std::size_t j = 0; j < rows; ++j)
                trial[j] = beta[j] - step * dir[j];
            const double f = detail::objective(a, q, trial);
            if (f <= f0 - 0.25 * step * slope)
                break;
            step /= 2;
            if (step < 1e-12) {
                // The objective is flat to rounding here; fall back to a full step.
                step = 1.0;
                for (std::size_t j = 0; j < rows; ++j)
                    trial[j] = beta[j] - dir[j];
                break;
            }
        }
        beta = trial;
    }
    if (best_norm <= 1e3 * grad_tol)
        return {best_delta, 1.0, max_iters};
    throw std::runtime_error("Newton iteration did not converge");
}

/**
 * Poisson fit by gradient descent, warm-started from and updating `beta`.
 */
inline OracleFit poisson_gradient(const std::vector<std::vector<int>>& a, const std::vector<double>& q,
                                  std::vector<double>& beta, double grad_tol = 1e-10,
                                  std::size_t max_iters = 2000000)
{
    const std::size_t rows = a.size();
    auto gradient_at = [&](const std::vector<double>& b, std::vector<double>& delta, double& scale) {
        delta = detail::exp_design(a, b);
        std::vector<double> g(rows, 0.0);
        scale = 1;
        for (std::size_t j = 0; j < rows; ++j) {
            double target = 0;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                g[j] += a[j][i] * (delta[i] - q[i]);
                target += a[j][i] * q[i];
            }
            scale = std::max(scale, target);
        }
        return g;
    };

    std::vector<double> delta;
    double scale = 1;
    auto grad = gradient_at(beta, delta, scale);
    double step = 1e-2;
    std::vector<double> history{detail::objective(a, q, beta)};
    for (std::size_t it = 0; it < max_iters; ++it) {
        double grad_norm = 0, g2 = 0;
        for (double g : grad) {
            grad_norm = std::max(grad_norm, std::abs(g));
            g2 += g * g;
        }
        if (grad_norm <= grad_tol * scale)
            return {delta, 1.0, it};

        const double f_ref = *std::max_element(history.begin(), history.end());
        const double slack = 1e-15 * std::abs(f_ref);
        std::vector<double> trial(rows);
        double f_trial = 0;
        for (;;) {
            for (std::size_t j = 0; j < rows; ++j)
                trial[j] = beta[j] - step * grad[j];
            f_trial = detail::objective(a, q, trial);
            if (f_trial <= f_ref - 1e-4 * step * g2 + slack)
                break;
            step /= 2;
            if (step < 1e-300)
                throw std::runtime_error("gradient line search failed");
        }
        history.push_back(f_trial);
        if (history.size() > 10)
            history.erase(history.begin());
        std::vector<double> next_delta;
        double next_scale = 1;
        const auto next = gradient_at(trial, next_delta, next_scale);

        // Barzilai-Borwein length for the next step.
        double ss = 0, sy = 0;
        for (std::size_t j = 0; j < rows; ++j) {
            const double sj = trial[j] - beta[j];
            ss += sj * sj;
            sy += sj * (next[j] - grad[j]);
        }
        step = sy > 0 ? std::clamp(ss / sy, 1e-10, 1e6) : 1.0;
        beta = trial;
        grad = next;
        delta = std::move(next_delta);
        scale = next_scale;
    }
    throw std::runtime_error("gradient descent did not converge");
}

inline OracleFit poisson_fit(const std::vector<std::vector<int>>& a, const std::vector<double>& q,
                             Method method = Method::newton)
{
    std::vector<double> beta(a.size(), 0.0);
    return method == Method::newton ? poisson_descent(a, q, beta) : poisson_gradient(a, q, beta);
}

inline OracleFit multinomial_fit(const std::vector<std::vector<int>>& a, const std::vector<double>& p,
                                 Method method = Method::newton)
{
    std::vector<double> beta(a.size(), 0.0);
    const double sum_tol = method == Method::newton ? 1e-13 : 1e-11;
    auto total_at = [&](double g, OracleFit& fit) {
        std::vector<double> scaled(p);
        for (auto& x : scaled)
            x *= g;
        fit = method == Method::newton ? poisson_descent(a, scaled, beta, 1e-14)
                                       : poisson_gradient(a, scaled, beta, 1e-12);
        fit.gamma = g;
        double s = 0;
        for (double d : fit.delta)
            s += d;
        return s;
    };

    OracleFit fit;
    double lo = 1e-4, hi = 1e4;
    if (total_at(1.0, fit) == 1.0)
        return fit;
    for (int step = 0; step < 200; ++step) {
        const double mid = std::sqrt(lo * hi);
        const double s = total_at(mid, fit);
        if (std::abs(s - 1) < sum_tol || hi / lo - 1 < 1e-15)
            return fit;
        (s < 1 ? lo : hi) = mid;
    }
    return fit;
}

} // namespace oracle
