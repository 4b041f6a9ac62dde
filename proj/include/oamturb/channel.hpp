#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <span>
#include <vector>

#include "oamturb/errors.hpp"
#include "oamturb/gauss_legendre.hpp"
#include "oamturb/lgmode.hpp"
#include "oamturb/quadrature.hpp"
#include "oamturb/turbulence.hpp"

namespace oamturb {

/// Survival (a) and crosstalk (b) amplitudes of the ensemble-averaged single-photon
/// map restricted to the {-l0, +l0} qubit.
struct ChannelAmplitudes {
    double a = 1.0;
    double b = 0.0;
    double a_err = 0.0;
    double b_err = 0.0;
    int l0 = 0;
    double w0 = 0.0;
    double r0 = 0.0;
    /// Set when the survival amplitude underflowed; a and b are then reported as 0.
    bool lost = false;

    static ChannelAmplitudes exact(double a, double b) {
        ChannelAmplitudes amps;
        amps.a = a;
        amps.b = b;
        return amps;
    }
};

/// Element Lambda_{l, lp}^{l0, l0p} of the radially traced map. Only lp = +l or
/// lp = -l is defined (radial completeness needs |l| = |lp|).
struct MapElementQuery {
    int l0 = 0;
    int l0p = 0;
    int l = 0;
    int lp = 0;

    void validate() const {
        if (lp != l && lp != -l) {
            throw DomainError("map element requires lp = +l or lp = -l");
        }
    }

    /// The same element with every index negated.
    MapElementQuery mirrored() const { return {-l0, -l0p, -l, -lp}; }

    /// Selection rule delta_{l0 - l0p, l - lp}.
    bool allowed() const { return l0 - l0p == l - lp; }

    /// Angular Fourier index of the turbulence kernel that the element samples.
    int phase_index() const { return l - l0; }
};

namespace detail {

struct RadialKernelResult {
    std::vector<double> values;
    std::vector<double> errors;
};

// int r R_first(r) R_second(r) c_m(r/r0) dr for every m, doubling the radial order
// until all values are stable relative to the largest.
inline RadialKernelResult radial_kernel_integrals(const LGMode& first, const LGMode& second,
                                                  std::span<const int> ms, double r0,
                                                  const QuadratureSpec& spec) {
    spec.validate();
    const auto s1 = radial_support(first);
    const auto s2 = radial_support(second);
    const double lo = std::max(s1.lo, s2.lo);
    const double hi = std::min(s1.hi, s2.hi);
    RadialKernelResult out{std::vector<double>(ms.size(), 0.0), std::vector<double>(ms.size(), 0.0)};
    if (!(hi > lo)) {
        return out;
    }

    auto evaluate = [&](int n, std::vector<double>& angular_err) {
        const auto& rule = gauss_legendre(n);
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        std::vector<double> sums(ms.size(), 0.0);
        angular_err.assign(ms.size(), 0.0);
        for (int i = 0; i < n; ++i) {
            const double r = mid + half * rule.nodes[i];
            const double weight = rule.weights[i] * half * r * radial_profile(first, r) * radial_profile(second, r);
            if (weight == 0.0) {
                continue;
            }
            const auto coeffs = turbulence_kernel_coefficients(r / r0, ms, spec);
            for (std::size_t k = 0; k < ms.size(); ++k) {
                sums[k] += weight * coeffs.values[k];
                angular_err[k] += std::abs(weight) * coeffs.error;
            }
        }
        return sums;
    };

    int n = spec.radial_nodes;
    std::vector<double> angular_err;
    auto previous = evaluate(n, angular_err);
    double diff = 0.0;
    while (true) {
        const int next = 2 * n;
        if (next > kMaxRadialNodes) {
            throw NumericError("radial quadrature of the channel map did not converge", diff);
        }
        auto current = evaluate(next, angular_err);
        diff = 0.0;
        double scale = 0.0;
        for (std::size_t k = 0; k < ms.size(); ++k) {
            diff = std::max(diff, std::abs(current[k] - previous[k]));
            scale = std::max(scale, std::abs(current[k]));
        }
        if (diff <= spec.target_rel_err * scale || diff <= kAbsoluteFloor) {
            for (std::size_t k = 0; k < ms.size(); ++k) {
                out.values[k] = current[k];
                out.errors[k] = std::abs(current[k] - previous[k]) + angular_err[k];
            }
            return out;
        }
        previous = std::move(current);
        n = next;
    }
}

inline void require_vortex(int l0) {
    if (l0 == 0) {
        throw DomainError("the OAM qubit needs l0 != 0");
    }
}

}  // namespace detail

/// General element of the traced map: zero when the selection rule fails, otherwise
/// int r dr R_{l0} R_{l0p} c_{l - l0}(r / r0).
inline double map_element(const MapElementQuery& q, double w0, const TurbulenceModel& model,
                          const QuadratureSpec& spec = {}) {
    q.validate();
    if (!q.allowed()) {
        return 0.0;
    }
    const int ms[] = {q.phase_index()};
    return detail::radial_kernel_integrals(LGMode(q.l0, w0), LGMode(q.l0p, w0), ms, model.r0(), spec)
        .values.front();
}

/// Survival and crosstalk amplitudes in one radial pass (kernel indices 0 and 2 l0).
inline ChannelAmplitudes channel_amplitudes(int l0, double w0, const TurbulenceModel& model,
                                            const QuadratureSpec& spec = {}) {
    detail::require_vortex(l0);
    const LGMode mode(l0, w0);
    const int ms[] = {0, 2 * std::abs(l0)};
    const auto result = detail::radial_kernel_integrals(mode, mode, ms, model.r0(), spec);

    ChannelAmplitudes amps;
    amps.l0 = l0;
    amps.w0 = w0;
    amps.r0 = model.r0();
    amps.a = result.values[0];
    amps.b = result.values[1];
    amps.a_err = result.errors[0];
    amps.b_err = result.errors[1];
    if (!(amps.a > 1e-300)) {
        amps.a = 0.0;
        amps.b = 0.0;
        amps.lost = true;
    }
    return amps;
}

inline double survival_amplitude(int l0, double w0, const TurbulenceModel& model,
                                 const QuadratureSpec& spec = {}) {
    detail::require_vortex(l0);
    return map_element({l0, -l0, l0, -l0}, w0, model, spec);
}

inline double crosstalk_amplitude(int l0, double w0, const TurbulenceModel& model,
                                  const QuadratureSpec& spec = {}) {
    detail::require_vortex(l0);
    return map_element({-l0, -l0, l0, l0}, w0, model, spec);
}

/// b / a. Throws NumericError if the state was lost (a underflowed).
inline double amplitude_ratio(const ChannelAmplitudes& amps) {
    if (amps.lost || !(amps.a > 0.0)) {
        throw NumericError("survival amplitude underflowed; rescale r0 or w0", amps.a);
    }
    return amps.b / amps.a;
}

inline double amplitude_ratio(int l0, double w0, const TurbulenceModel& model,
                              const QuadratureSpec& spec = {}) {
    return amplitude_ratio(channel_amplitudes(l0, w0, model, spec));
}

/// |Lambda_{l,lp}^{l0,l0p} - Lambda_{-l,-lp}^{-l0,-l0p}|, both sides evaluated separately.
inline double verify_inversion_symmetry(const MapElementQuery& q, double w0, const TurbulenceModel& model,
                                        const QuadratureSpec& spec = {}) {
    const double direct = map_element(q, w0, model, spec);
    const double mirror = map_element(q.mirrored(), w0, model, spec);
    return std::abs(direct - mirror);
}

/// Overload picking lp from the selection rule: lp = l when l0 = l0p, else lp = -l.
inline double verify_inversion_symmetry(int l0, int l0p, int l, double w0, const TurbulenceModel& model,
                                        const QuadratureSpec& spec = {}) {
    const int lp = (l0 == l0p) ? l : -l;
    return verify_inversion_symmetry(MapElementQuery{l0, l0p, l, lp}, w0, model, spec);
}

}  // namespace oamturb
