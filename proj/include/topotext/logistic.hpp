#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "topotext/errors.hpp"

namespace topotext {

namespace detail {

// Solves A x = b for symmetric positive definite A (row-major, modified in
// place). Plain Cholesky; the ridge term keeps A away from singularity.
inline std::vector<double> cholesky_solve(std::vector<double>& a, std::vector<double> b,
                                          std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
            if (i == j) {
                if (s <= 0.0) throw validation_error("normal matrix is not positive definite");
                a[i * n + i] = std::sqrt(s);
            } else {
                a[i * n + j] = s / a[j * n + j];
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
        b[i] = s / a[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
        b[i] = s / a[i * n + i];
    }
    return b;
}

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

inline double clamp_proba(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

} // namespace detail

struct LogisticConfig {
    double ridge_lambda = 1e-3; // L2 on weights, intercept unpenalized
    std::size_t max_iter = 100;
    double grad_tol = 1e-10;
};

// Binary ridge logistic regression fit by Newton iterations (IRLS) with step
// halving. X is row-major n x k and should already be standardized; returns
// k + 1 coefficients with the intercept first. Fully deterministic.
inline std::vector<double> fit_logistic(std::span<const double> x, std::size_t n, std::size_t k,
                                        std::span<const std::uint8_t> y,
                                        const LogisticConfig& cfg = {}) {
    const std::size_t dim = k + 1;
    std::vector<double> w(dim, 0.0);
    std::vector<double> p(n), z(n);

    auto predict_all = [&](const std::vector<double>& coef) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = coef[0];
            for (std::size_t j = 0; j < k; ++j) acc += coef[j + 1] * x[i * k + j];
            z[i] = acc;
            p[i] = detail::sigmoid(acc);
        }
    };
    auto objective = [&](const std::vector<double>& coef) {
        predict_all(coef);
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pi = detail::clamp_proba(p[i]);
            loss -= y[i] ? std::log(pi) : std::log(1.0 - pi);
        }
        double penalty = 0.0;
        for (std::size_t j = 1; j < dim; ++j) penalty += coef[j] * coef[j];
        return loss + 0.5 * cfg.ridge_lambda * penalty;
    };

    double current = objective(w);
    std::vector<double> grad(dim), hess(dim * dim);
    for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
        predict_all(w);

        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = p[i] - (y[i] ? 1.0 : 0.0);
            grad[0] += r;
            for (std::size_t j = 0; j < k; ++j) grad[j + 1] += r * x[i * k + j];
        }
        for (std::size_t j = 1; j < dim; ++j) grad[j] += cfg.ridge_lambda * w[j];

        double gmax = 0.0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        if (gmax < cfg.grad_tol) break;

        std::fill(hess.begin(), hess.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = std::max(p[i] * (1.0 - p[i]), 1e-10);
            hess[0] += wi;
            for (std::size_t a = 0; a < k; ++a) {
                hess[a + 1] += wi * x[i * k + a]; // first column, mirrored below
                for (std::size_t b = 0; b <= a; ++b)
                    hess[(a + 1) * dim + (b + 1)] += wi * x[i * k + a] * x[i * k + b];
            }
        }
        for (std::size_t j = 1; j < dim; ++j) {
            hess[j * dim] = hess[j];
            hess[j * dim + j] += cfg.ridge_lambda;
        }
        for (std::size_t a = 0; a < dim; ++a)
            for (std::size_t b = a + 1; b < dim; ++b) hess[a * dim + b] = hess[b * dim + a];

        std::vector<double> step = detail::cholesky_solve(hess, grad, dim);

        double scale = 1.0;
        std::vector<double> trial(dim);
        for (int halving = 0; halving < 40; ++halving) {
            for (std::size_t j = 0; j < dim; ++j) trial[j] = w[j] - scale * step[j];
            const double next = objective(trial);
            if (next <= current + 1e-12) {
                w = trial;
                current = next;
                break;
            }
            scale *= 0.5;
        }
    }
    return w;
}

inline double logistic_predict(std::span<const double> coef, std::span<const double> features) {
    double acc = coef[0];
    for (std::size_t j = 0; j < features.size(); ++j) acc += coef[j + 1] * features[j];
    return detail::sigmoid(acc);
}

} // namespace topotext
