#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "oamturb/channel.hpp"
#include "oamturb/entangle.hpp"
#include "oamturb/errors.hpp"
#include "oamturb/lgmode.hpp"
#include "oamturb/parallel.hpp"
#include "oamturb/quadrature.hpp"
#include "oamturb/turbulence.hpp"

namespace oamturb {

/// One point of a concurrence sweep against x = xi(l0) / r0.
struct CollapseRecord {
    int l0 = 0;
    double x = 0.0;
    double r0 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double atilde = 0.0;
    double concurrence = 0.0;
    std::string status = "ok";

    bool ok() const { return status == "ok"; }
};

/// lo, lo + step, ... up to hi (inclusive within rounding). Points are computed as
/// lo + i * step, not accumulated.
inline std::vector<double> linear_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) {
        throw DomainError("grid needs step > 0 and hi >= lo");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) {
        xs[i] = lo + static_cast<double>(i) * step;
    }
    return xs;
}

/// Concurrence of the post-selected, renormalized output for given amplitudes. Uses the
/// closed form for b >= 0 and the general Wootters path otherwise.
inline double output_concurrence(const ChannelAmplitudes& amps) {
    const double ratio = amplitude_ratio(amps);
    if (ratio >= 0.0) {
        return concurrence_closed_form(ratio);
    }
    return wootters_concurrence(renormalize(propagate(bell_input(0.0), amps)));
}

/// Evaluates one point of a sweep; numeric failures are recorded in the status field.
inline CollapseRecord collapse_point(int l0, double w0, double x, const QuadratureSpec& spec = {}) {
    CollapseRecord rec;
    rec.l0 = l0;
    rec.x = x;
    try {
        if (!(x > 0.0)) {
            throw DomainError("x must be positive");
        }
        rec.r0 = phase_correlation_length(LGMode(l0, w0)) / x;
        const auto amps = channel_amplitudes(l0, w0, TurbulenceModel(rec.r0), spec);
        rec.a = amps.a;
        rec.b = amps.b;
        if (amps.lost) {
            rec.status = "lost";
            rec.atilde = rec.concurrence = std::numeric_limits<double>::quiet_NaN();
            return rec;
        }
        rec.atilde = amplitude_ratio(amps);
        rec.concurrence = output_concurrence(amps);
    } catch (const NumericError&) {
        rec.status = "numeric_error";
    } catch (const DomainError&) {
        rec.status = "domain_error";
    }
    if (!rec.ok()) {
        rec.a = rec.b = rec.atilde = rec.concurrence = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

inline std::vector<CollapseRecord> concurrence_curve(int l0, double w0, std::span<const double> xs,
                                                     const QuadratureSpec& spec = {}, int workers = 1) {
    if (l0 == 0) {
        throw DomainError("concurrence_curve needs l0 != 0");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || (i > 0 && !(xs[i] > xs[i - 1]))) {
            throw DomainError("x grid must be positive and ascending");
        }
    }
    std::vector<CollapseRecord> out(xs.size());
    parallel_for(xs.size(), workers, [&](std::size_t i) { out[i] = collapse_point(l0, w0, xs[i], spec); });
    return out;
}

struct PairDeviation {
    int l0_a = 0;
    int l0_b = 0;
    double sup = 0.0;  ///< max |C_a(x) - C_b(x)| over points valid in both curves
};

struct CollapseDataset {
    std::vector<int> l0s;
    std::vector<std::vector<CollapseRecord>> curves;
    std::vector<PairDeviation> deviations;

    const std::vector<CollapseRecord>& curve(int l0) const {
        for (std::size_t i = 0; i < l0s.size(); ++i) {
            if (l0s[i] == l0) {
                return curves[i];
            }
        }
        throw DomainError("l0 not in dataset");
    }

    double deviation(int l0_a, int l0_b) const {
        for (const auto& d : deviations) {
            if ((d.l0_a == l0_a && d.l0_b == l0_b) || (d.l0_a == l0_b && d.l0_b == l0_a)) {
                return d.sup;
            }
        }
        throw DomainError("pair not in dataset");
    }
};

inline double sup_deviation(std::span<const CollapseRecord> first, std::span<const CollapseRecord> second) {
    if (first.size() != second.size()) {
        throw DomainError("curves sampled on different grids");
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        if (first[i].ok() && second[i].ok()) {
            sup = std::max(sup, std::abs(first[i].concurrence - second[i].concurrence));
        }
    }
    return sup;
}

inline CollapseDataset collapse_dataset(std::span<const int> l0s, double w0, std::span<const double> xs,
                                        const QuadratureSpec& spec = {}, int workers = 1) {
    if (l0s.empty()) {
        throw DomainError("collapse_dataset needs at least one l0");
    }
    CollapseDataset data;
    data.l0s.assign(l0s.begin(), l0s.end());
    for (int l0 : l0s) {
        data.curves.push_back(concurrence_curve(l0, w0, xs, spec, workers));
    }
    for (std::size_t i = 0; i < l0s.size(); ++i) {
        for (std::size_t j = i + 1; j < l0s.size(); ++j) {
            data.deviations.push_back({l0s[i], l0s[j], sup_deviation(data.curves[i], data.curves[j])});
        }
    }
    return data;
}

/// Least-squares fit of C(x) = exp(-alpha x^beta).
struct FitResult {
    double alpha = 0.0;
    double beta = 0.0;
    double residual = 0.0;  ///< RMS of C - exp(-alpha x^beta) over the fitted points
    double x_lo = 0.0;
    double x_hi = 0.0;
    int points = 0;
    int iterations = 0;
};

inline constexpr double kFitMinConcurrence = 1e-4;
inline constexpr double kFitMaxConcurrence = 0.999;

/// Linearized fit ln(-ln C) = ln alpha + beta ln x, refined by Gauss-Newton with step
/// halving on the unweighted residuals. Only points with C in [1e-4, 0.999] and x in
/// [x_lo, x_hi] are used.
inline FitResult fit_stretched_exponential(std::span<const double> xs, std::span<const double> cs, double x_lo,
                                           double x_hi) {
    if (xs.size() != cs.size()) {
        throw DomainError("fit: x and C have different lengths");
    }
    std::vector<double> x;
    std::vector<double> c;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] >= x_lo && xs[i] <= x_hi && cs[i] >= kFitMinConcurrence && cs[i] <= kFitMaxConcurrence &&
            xs[i] > 0.0) {
            x.push_back(xs[i]);
            c.push_back(cs[i]);
        }
    }
    const std::size_t n = x.size();
    if (n < 8) {
        throw DomainError("fit needs at least 8 usable points, got " + std::to_string(n));
    }

    // Linearization.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = std::log(x[i]);
        const double v = std::log(-std::log(c[i]));
        sx += u;
        sy += v;
        sxx += u * u;
        sxy += u * v;
    }
    const double dn = static_cast<double>(n);
    double beta = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    double alpha = std::exp((sy - beta * sx) / dn);

    auto sse = [&](double al, double be) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = c[i] - std::exp(-al * std::pow(x[i], be));
            s += r * r;
        }
        return s;
    };

    FitResult fit;
    double current = sse(alpha, beta);
    constexpr int kMaxIterations = 200;
    bool converged = false;
    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        double jaa = 0.0, jab = 0.0, jbb = 0.0, ga = 0.0, gb = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double xb = std::pow(x[i], beta);
            const double model = std::exp(-alpha * xb);
            const double da = -xb * model;
            const double db = -alpha * xb * std::log(x[i]) * model;
            const double r = c[i] - model;
            jaa += da * da;
            jab += da * db;
            jbb += db * db;
            ga += da * r;
            gb += db * r;
        }
        const double det = jaa * jbb - jab * jab;
        if (!(std::abs(det) > 0.0)) {
            throw NumericError("fit: singular normal equations", current);
        }
        double step_a = (jbb * ga - jab * gb) / det;
        double step_b = (jaa * gb - jab * ga) / det;
        double scale = 1.0;
        double trial = sse(alpha + step_a, beta + step_b);
        while (trial > current && scale > 1e-12) {
            scale *= 0.5;
            trial = sse(alpha + scale * step_a, beta + scale * step_b);
        }
        alpha += scale * step_a;
        beta += scale * step_b;
        current = std::min(current, trial);
        fit.iterations = iter;
        if (std::abs(scale * step_a) <= 1e-10 * (1.0 + std::abs(alpha)) &&
            std::abs(scale * step_b) <= 1e-10 * (1.0 + std::abs(beta))) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw NumericError("fit: Gauss-Newton did not converge (alpha " + std::to_string(alpha) + ", beta " +
                               std::to_string(beta) + ")",
                           std::sqrt(current / dn));
    }
    fit.alpha = alpha;
    fit.beta = beta;
    fit.residual = std::sqrt(sse(alpha, beta) / dn);
    fit.x_lo = x_lo;
    fit.x_hi = x_hi;
    fit.points = static_cast<int>(n);
    return fit;
}

inline FitResult fit_stretched_exponential(std::span<const CollapseRecord> records, double x_lo, double x_hi) {
    std::vector<double> xs;
    std::vector<double> cs;
    for (const auto& rec : records) {
        if (rec.ok()) {
            xs.push_back(rec.x);
            cs.push_back(rec.concurrence);
        }
    }
    return fit_stretched_exponential(xs, cs, x_lo, x_hi);
}

/// Amplitude ratio at which the closed-form concurrence equals `threshold` in [0, 1).
inline double ratio_for_concurrence(double threshold) {
    if (!(threshold >= 0.0) || !(threshold < 1.0)) {
        throw DomainError("concurrence threshold must lie in [0, 1)");
    }
    if (threshold == 0.0) {
        return 0.5;
    }
    // C (1 + t)^2 = 1 - 2 t, positive root.
    const double c = threshold;
    return (std::sqrt(3.0 * c + 1.0) - (c + 1.0)) / c;
}

namespace detail {

inline double ratio_at(int l0, double w0, double x, const QuadratureSpec& spec) {
    const double r0 = phase_correlation_length(LGMode(l0, w0)) / x;
    return amplitude_ratio(channel_amplitudes(l0, w0, TurbulenceModel(r0), spec));
}

// Bisection for the x at which the amplitude ratio reaches `target`; the ratio grows
// monotonically with x. Returns the final bracket.
inline std::pair<double, double> bracket_ratio(int l0, double w0, double target, double tolerance,
                                               const QuadratureSpec& spec) {
    double lo = 0.01;
    if (ratio_at(l0, w0, lo, spec) >= target) {
        throw NumericError("ratio already above target at x = 0.01", lo);
    }
    double hi = 1.0;
    int expansions = 0;
    while (ratio_at(l0, w0, hi, spec) < target) {
        lo = hi;
        hi *= 2.0;
        if (++expansions > 20) {
            throw NumericError("could not bracket the amplitude ratio target", hi);
        }
    }
    while (hi - lo > tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (ratio_at(l0, w0, mid, spec) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

}  // namespace detail

/// Smallest x = xi/r0 with zero concurrence (amplitude ratio reaching 1/2), to within the
/// bracket tolerance. Returns the upper end of the final bracket.
inline double critical_x(int l0, double w0, const QuadratureSpec& spec = {}, double tolerance = 1e-4) {
    if (l0 == 0) {
        throw DomainError("critical_x needs l0 != 0");
    }
    return detail::bracket_ratio(l0, w0, 0.5, tolerance, spec).second;
}

struct ScalingPoint {
    int l0 = 0;
    double x = 0.0;         ///< xi / r0 where C reaches the threshold
    double r0 = 0.0;
    double distance = 0.0;  ///< path length giving that r0
};

struct ScalingResult {
    double slope = 0.0;           ///< d log L / d log l0
    double intercept = 0.0;
    double analytic_slope = 0.0;  ///< d log xi^(-5/3) / d log l0 on the same l0 set
    double threshold = 0.0;
    std::vector<ScalingPoint> points;
};

inline std::pair<double, double> linear_regression(std::span<const double> u, std::span<const double> v) {
    const double n = static_cast<double>(u.size());
    double su = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        su += u[i];
        sv += v[i];
    }
    const double mu = su / n;
    const double mv = sv / n;
    double suu = 0.0, suv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        suu += (u[i] - mu) * (u[i] - mu);
        suv += (u[i] - mu) * (v[i] - mv);
    }
    const double slope = suv / suu;
    return {slope, mv - slope * mu};
}

/// Distance over which the concurrence stays above `threshold`, as a power law in l0.
/// For each l0, x* solves C(x*) = threshold; then r0* = xi(l0)/x* and L = L(r0*).
inline ScalingResult distance_scaling(std::span<const int> l0s, double cn2, double k, double w0,
                                      double threshold = 0.01, const QuadratureSpec& spec = {},
                                      int workers = 1) {
    if (l0s.size() < 2) {
        throw DomainError("distance_scaling needs at least two l0 values");
    }
    const double target = ratio_for_concurrence(threshold);
    ScalingResult result;
    result.threshold = threshold;
    result.points.resize(l0s.size());
    parallel_for(l0s.size(), workers, [&](std::size_t i) {
        const int l0 = l0s[i];
        if (l0 == 0) {
            throw DomainError("distance_scaling needs l0 != 0");
        }
        const auto [lo, hi] = detail::bracket_ratio(l0, w0, target, 1e-11, spec);
        ScalingPoint p;
        p.l0 = l0;
        p.x = 0.5 * (lo + hi);
        p.r0 = phase_correlation_length(LGMode(l0, w0)) / p.x;
        p.distance = distance_for_r0(cn2, k, p.r0);
        result.points[i] = p;
    });

    std::vector<double> log_l;
    std::vector<double> log_distance;
    std::vector<double> log_xi;
    for (const auto& p : result.points) {
        log_l.push_back(std::log(std::abs(p.l0)));
        log_distance.push_back(std::log(p.distance));
        log_xi.push_back(-5.0 / 3.0 * std::log(phase_correlation_length(LGMode(p.l0, w0))));
    }
    std::tie(result.slope, result.intercept) = linear_regression(log_l, log_distance);
    result.analytic_slope = linear_regression(log_l, log_xi).first;
    return result;
}

}  // namespace oamturb
