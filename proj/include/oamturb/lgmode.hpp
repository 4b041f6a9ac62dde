#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "oamturb/errors.hpp"
#include "oamturb/gauss_legendre.hpp"

namespace oamturb {

/// Laguerre-Gaussian mode LG_{p=0}^{l} at the source plane z = 0.
///
/// The radial profile is normalized so that the integral of R(r)^2 r dr over
/// [0, inf) equals 1; together with the 1/(2 pi) angular factor this makes the
/// turbulence-free survival amplitude exactly one.
class LGMode {
public:
    LGMode(int l, double waist, int p = 0) : l_(l), waist_(waist) {
        if (p != 0) {
            throw DomainError("only radial index p = 0 is supported");
        }
        if (!(waist > 0.0) || !std::isfinite(waist)) {
            throw DomainError("beam waist must be positive and finite");
        }
    }

    int l() const noexcept { return l_; }
    int abs_l() const noexcept { return std::abs(l_); }
    int p() const noexcept { return 0; }
    double waist() const noexcept { return waist_; }

    friend bool operator==(const LGMode&, const LGMode&) = default;

private:
    int l_;
    double waist_;
};

/// |l| at or above which the profile is evaluated in log space.
inline constexpr int kLogSpaceThreshold = 20;

/// Natural log of R_{0l}(r). Returns -inf at r = 0 for l != 0.
inline double log_radial_profile(const LGMode& mode, double r) {
    if (!(r >= 0.0)) {
        throw DomainError("radial_profile: r must be non-negative");
    }
    const int l = mode.abs_l();
    const double w0 = mode.waist();
    if (l > 0 && r == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    const double log_scaled = l > 0 ? l * std::log(std::numbers::sqrt2 * r / w0) : 0.0;
    return std::numbers::ln2 - std::log(w0) - 0.5 * std::lgamma(l + 1.0) + log_scaled -
           (r * r) / (w0 * w0);
}

/// R_{0l}(r) = (2/w0) (|l|!)^{-1/2} (sqrt(2) r / w0)^{|l|} exp(-r^2/w0^2).
/// Underflows to an exact 0 far in the tails.
inline double radial_profile(const LGMode& mode, double r) {
    if (!(r >= 0.0)) {
        throw DomainError("radial_profile: r must be non-negative");
    }
    const int l = mode.abs_l();
    if (l >= kLogSpaceThreshold) {
        return std::exp(log_radial_profile(mode, r));
    }
    const double w0 = mode.waist();
    const double rho = std::numbers::sqrt2 * r / w0;
    return (2.0 / w0) / std::sqrt(std::tgamma(l + 1.0)) * std::pow(rho, l) *
           std::exp(-(r * r) / (w0 * w0));
}

/// Truncated support [r_min, r_max] of R^2 r. Outside it the weight is below
/// exp(-64) relative to its peak.
struct RadialSupport {
    double lo;
    double hi;
};

inline RadialSupport radial_support(const LGMode& mode) {
    const double ring = std::sqrt(mode.abs_l() / 2.0);
    const double w0 = mode.waist();
    return {std::max(0.0, ring - 8.0) * w0, (ring + 8.0) * w0};
}

/// Intensity-weighted mean radius <r> = (w0/sqrt 2) Gamma(|l|+3/2) / Gamma(|l|+1).
inline double mean_radius(const LGMode& mode) {
    const double l = mode.abs_l();
    return mode.waist() / std::numbers::sqrt2 * std::exp(std::lgamma(l + 1.5) - std::lgamma(l + 1.0));
}

/// Phase correlation length xi(l) = sin(pi / (2|l|)) <r>: the mean transverse
/// distance over which the vortex phase advances by pi/2.
inline double phase_correlation_length(const LGMode& mode) {
    if (mode.abs_l() == 0) {
        throw DomainError("phase correlation length is undefined for l = 0");
    }
    return std::sin(std::numbers::pi / (2.0 * mode.abs_l())) * mean_radius(mode);
}

/// Quadrature evaluation of the intensity-weighted average of r sin(pi/(2|l|)).
/// Independent of the Gamma-ratio closed form above.
inline double phase_correlation_length_numeric(const LGMode& mode, double rel_tol = 1e-12) {
    if (mode.abs_l() == 0) {
        throw DomainError("phase correlation length is undefined for l = 0");
    }
    const double angle = std::sin(std::numbers::pi / (2.0 * mode.abs_l()));
    const auto support = radial_support(mode);
    auto integrand = [&](double r) {
        const double profile = radial_profile(mode, r);
        return profile * profile * (r * angle) * r;
    };
    return integrate_doubling(integrand, support.lo, support.hi, 32, rel_tol).value;
}

}  // namespace oamturb
