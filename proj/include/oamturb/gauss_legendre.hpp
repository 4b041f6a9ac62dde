#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "oamturb/errors.hpp"

namespace oamturb {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussLegendreRule compute_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi's initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

}  // namespace detail

/// Returns the n-point rule. Rules are computed once and shared (read-only) afterwards.
inline const GaussLegendreRule& gauss_legendre(int n) {
    if (n < 1) {
        throw ConfigError("Gauss-Legendre rule needs at least one node");
    }
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<GaussLegendreRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<GaussLegendreRule>(detail::compute_gauss_legendre(n));
    }
    return *slot;
}

/// Applies the n-point rule to f on [lo, hi].
template <class F>
double integrate_gauss_legendre(F&& f, double lo, double hi, int n) {
    const auto& rule = gauss_legendre(n);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

struct QuadratureResult {
    double value = 0.0;
    double residual = 0.0;  ///< |difference| of the last two doubling stages
    int nodes = 0;          ///< node count of the accepted estimate
};

/// Gauss-Legendre with the node count doubled until two successive estimates agree to
/// rel_tol (or abs_tol, for values near zero). Throws NumericError past max_nodes.
template <class F>
QuadratureResult integrate_doubling(F&& f, double lo, double hi, int start_nodes,
                                    double rel_tol, double abs_tol = 1e-14,
                                    int max_nodes = 1 << 16) {
    int n = start_nodes;
    double previous = integrate_gauss_legendre(f, lo, hi, n);
    double diff = std::abs(previous);
    while (true) {
        const int next = 2 * n;
        if (next > max_nodes) {
            throw NumericError("Gauss-Legendre doubling did not converge by " +
                                   std::to_string(max_nodes) + " nodes",
                               diff);
        }
        const double current = integrate_gauss_legendre(f, lo, hi, next);
        diff = std::abs(current - previous);
        if (diff <= rel_tol * std::abs(current) || diff <= abs_tol) {
            return {current, diff, next};
        }
        previous = current;
        n = next;
    }
}

}  // namespace oamturb
