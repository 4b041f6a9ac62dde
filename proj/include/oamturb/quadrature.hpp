#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "oamturb/errors.hpp"
#include "oamturb/gauss_legendre.hpp"
#include "oamturb/lgmode.hpp"
#include "oamturb/turbulence.hpp"

namespace oamturb {

/// Node and sample counts shared by the radial and angular integrators.
///
/// radial_nodes is the starting Gauss-Legendre order for the radial doubling.
/// angular_samples is the starting sample count of the DFT coefficient extractor;
/// the panel integrator for the turbulence kernel uses angular_samples / 32 as its
/// baseline panel count.
struct QuadratureSpec {
    int radial_nodes = 64;
    int angular_samples = 256;
    double target_rel_err = 1e-9;

    void validate() const {
        if (radial_nodes < 32) {
            throw ConfigError("radial_nodes must be at least 32");
        }
        if (angular_samples < 256 || !std::has_single_bit(static_cast<unsigned>(angular_samples))) {
            throw ConfigError("angular_samples must be a power of two >= 256");
        }
        if (!(target_rel_err > 0.0) || !(target_rel_err < 1.0)) {
            throw ConfigError("target_rel_err must lie in (0, 1)");
        }
    }
};

inline constexpr double kAbsoluteFloor = 1e-14;
inline constexpr int kMaxRadialNodes = 1 << 16;
inline constexpr int kMaxAngularSamples = 1 << 22;

/// Integral of R_{0l}(r)^2 r f(r) over the truncated support of the mode, by
/// Gauss-Legendre doubling.
template <class F>
QuadratureResult radial_quadrature(const LGMode& mode, F&& f, const QuadratureSpec& spec = {}) {
    spec.validate();
    const auto support = radial_support(mode);
    auto integrand = [&](double r) {
        const double profile = radial_profile(mode, r);
        return profile * profile * r * f(r);
    };
    return integrate_doubling(integrand, support.lo, support.hi, spec.radial_nodes,
                              spec.target_rel_err, kAbsoluteFloor, kMaxRadialNodes);
}

namespace detail {

// Samples needed for coefficient index m without aliasing.
inline int min_angular_samples(std::span<const int> ms) {
    int largest = 0;
    for (int m : ms) {
        largest = std::max(largest, std::abs(m));
    }
    return std::max(256, 8 * largest);
}

// (1/N) sum_j K_j exp(-i m theta_j) for each m, with theta_j = 2 pi j / N.
inline std::vector<std::complex<double>> dft_bins(std::span<const double> samples,
                                                  std::span<const int> ms) {
    const std::size_t n = samples.size();
    std::vector<double> cos_table(n);
    std::vector<double> sin_table(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        cos_table[j] = std::cos(theta);
        sin_table[j] = std::sin(theta);
    }
    std::vector<std::complex<double>> out;
    out.reserve(ms.size());
    for (int m : ms) {
        const auto step = static_cast<std::size_t>(((m % static_cast<long>(n)) + static_cast<long>(n)) %
                                                   static_cast<long>(n));
        double re = 0.0;
        double im = 0.0;
        std::size_t idx = 0;
        for (std::size_t j = 0; j < n; ++j) {
            re += samples[j] * cos_table[idx];
            im -= samples[j] * sin_table[idx];
            idx += step;
            if (idx >= n) {
                idx -= n;
            }
        }
        out.emplace_back(re / static_cast<double>(n), im / static_cast<double>(n));
    }
    return out;
}

}  // namespace detail

/// Fourier coefficients (1/2pi) int_0^{2pi} exp(-i m theta) K(theta) dtheta of a real,
/// even, periodic kernel by uniform sampling and a DFT at the requested bins.
///
/// The sample count starts at spec.angular_samples and doubles until every coefficient
/// is stable to target_rel_err (relative to the largest coefficient). The imaginary
/// parts must vanish for an even kernel; a residue above 1e-12 throws NumericError.
template <class Kernel>
std::vector<double> angular_fourier_coefficients(Kernel&& kernel, std::span<const int> ms,
                                                 const QuadratureSpec& spec = {}) {
    spec.validate();
    const int required = detail::min_angular_samples(ms);
    if (spec.angular_samples < required) {
        throw ConfigError("angular_samples = " + std::to_string(spec.angular_samples) +
                          " violates the aliasing guard (need >= " + std::to_string(required) + ")");
    }

    std::size_t n = static_cast<std::size_t>(spec.angular_samples);
    std::vector<double> samples(n);
    for (std::size_t j = 0; j < n; ++j) {
        samples[j] = kernel(2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
    }
    auto previous = detail::dft_bins(samples, ms);
    double diff = 0.0;
    while (true) {
        const std::size_t next = 2 * n;
        if (next > static_cast<std::size_t>(kMaxAngularSamples)) {
            throw NumericError("angular DFT did not converge", diff);
        }
        std::vector<double> refined(next);
        for (std::size_t j = 0; j < n; ++j) {
            refined[2 * j] = samples[j];
            refined[2 * j + 1] =
                kernel(2.0 * std::numbers::pi * static_cast<double>(2 * j + 1) / static_cast<double>(next));
        }
        auto current = detail::dft_bins(refined, ms);

        double scale = 0.0;
        diff = 0.0;
        for (std::size_t i = 0; i < ms.size(); ++i) {
            scale = std::max(scale, std::abs(current[i].real()));
            diff = std::max(diff, std::abs(current[i].real() - previous[i].real()));
        }
        samples = std::move(refined);
        n = next;
        if (diff <= spec.target_rel_err * scale || diff <= kAbsoluteFloor) {
            std::vector<double> out;
            out.reserve(ms.size());
            for (const auto& c : current) {
                if (std::abs(c.imag()) > 1e-12 * std::max(1.0, scale)) {
                    throw NumericError("kernel is not even: imaginary Fourier residue", std::abs(c.imag()));
                }
                out.push_back(c.real());
            }
            return out;
        }
        previous = std::move(current);
    }
}

template <class Kernel>
double angular_fourier_coefficient(Kernel&& kernel, int m, const QuadratureSpec& spec = {}) {
    const int ms[] = {m};
    return angular_fourier_coefficients(kernel, std::span<const int>(ms), spec).front();
}

/// Ensemble-averaged ring kernel exp(-D_phi(2 r |sin(theta/2)|) / 2) with r = s r0.
inline double turbulence_kernel(double theta, double s) {
    const double chord = 2.0 * s * std::abs(std::sin(0.5 * theta));
    if (chord == 0.0) {
        return 1.0;
    }
    return std::exp(-0.5 * kStructureConstant * std::exp((5.0 / 3.0) * std::log(chord)));
}

struct KernelCoefficients {
    std::vector<double> values;  ///< c_m for each requested m
    double error = 0.0;          ///< max change under the last panel doubling
    bool underflow = false;      ///< c_0 underflowed (kernel support below resolution)
};

namespace detail {

inline constexpr int kPanelOrder = 20;
inline constexpr int kGradingLevels = 18;
inline constexpr double kGradingRatio = 0.15;
// Exponent beyond which the kernel is dropped (exp(-50) ~ 2e-22).
inline constexpr double kKernelCutoffExponent = 50.0;

inline double kernel_support_end(double s) {
    const double chord_cut = std::pow(2.0 * kKernelCutoffExponent / kStructureConstant, 0.6);
    if (2.0 * s <= chord_cut) {
        return std::numbers::pi;
    }
    return 2.0 * std::asin(chord_cut / (2.0 * s));
}

inline void accumulate_panel(double lo, double hi, double s, std::span<const int> ms,
                             std::vector<double>& sums) {
    const auto& rule = gauss_legendre(kPanelOrder);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (int i = 0; i < kPanelOrder; ++i) {
        const double theta = mid + half * rule.nodes[i];
        const double weighted = rule.weights[i] * half * turbulence_kernel(theta, s);
        for (std::size_t k = 0; k < ms.size(); ++k) {
            sums[k] += weighted * (ms[k] == 0 ? 1.0 : std::cos(ms[k] * theta));
        }
    }
}

// (1/pi) int_0^end K cos(m theta) on `panels` uniform panels; the first panel is
// geometrically graded toward the |theta|^(5/3) cusp at the origin.
inline std::vector<double> kernel_panels(double s, std::span<const int> ms, double end, int panels) {
    std::vector<double> sums(ms.size(), 0.0);
    const double h = end / panels;
    double upper = h;
    for (int level = 0; level < kGradingLevels; ++level) {
        const double lower = upper * kGradingRatio;
        accumulate_panel(lower, upper, s, ms, sums);
        upper = lower;
    }
    accumulate_panel(0.0, upper, s, ms, sums);
    for (int p = 1; p < panels; ++p) {
        accumulate_panel(p * h, (p + 1) * h, s, ms, sums);
    }
    for (auto& v : sums) {
        v /= std::numbers::pi;
    }
    return sums;
}

}  // namespace detail

/// Fourier coefficients c_m of the turbulence ring kernel at s = r / r0.
///
/// The kernel is even about 0 and pi, so c_m = (1/pi) int_0^pi K cos(m theta). The
/// integral runs over composite Gauss-Legendre panels (each at most half an oscillation
/// long) up to the point where K < exp(-50); the panel at the origin is graded
/// geometrically to resolve the non-analytic |theta|^(5/3) cusp. Panels double until
/// all coefficients are stable to target_rel_err relative to c_0.
inline KernelCoefficients turbulence_kernel_coefficients(double s, std::span<const int> ms,
                                                         const QuadratureSpec& spec = {}) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw DomainError("kernel scale r/r0 must be finite and non-negative");
    }
    // c_0 rides along as the convergence scale even when it is not requested.
    std::vector<int> all(ms.begin(), ms.end());
    all.push_back(0);
    int largest = 0;
    for (int m : all) {
        largest = std::max(largest, std::abs(m));
    }
    const double end = detail::kernel_support_end(s);
    int panels = std::max({4, spec.angular_samples / 32,
                           static_cast<int>(std::ceil(largest * end / std::numbers::pi))});

    auto previous = detail::kernel_panels(s, all, end, panels);
    while (true) {
        const int next = 2 * panels;
        auto current = detail::kernel_panels(s, all, end, next);
        double diff = 0.0;
        for (std::size_t k = 0; k < all.size(); ++k) {
            diff = std::max(diff, std::abs(current[k] - previous[k]));
        }
        const double scale = std::abs(current.back());
        if (diff <= spec.target_rel_err * scale || diff <= kAbsoluteFloor * 1e-3) {
            KernelCoefficients out;
            out.values.assign(current.begin(), current.end() - 1);
            out.error = diff;
            out.underflow = !(scale > 0.0);
            return out;
        }
        if (2 * next > kMaxAngularSamples / detail::kPanelOrder) {
            throw NumericError("turbulence kernel panels did not converge", diff);
        }
        previous = std::move(current);
        panels = next;
    }
}

}  // namespace oamturb
