#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "oamturb/errors.hpp"

namespace oamturb {

inline constexpr double kFriedConstant = 0.16;
inline constexpr double kStructureConstant = 6.88;
inline constexpr double kSpectrumConstant = 0.023;

namespace detail {
inline void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}
}  // namespace detail

/// r0 = (0.16 cn2 k^2 L)^(-3/5). SI units: cn2 in m^(-2/3), k in 1/m, L in m.
inline double fried_parameter(double cn2, double k, double distance) {
    detail::require_positive(cn2, "cn2");
    detail::require_positive(k, "wavenumber");
    detail::require_positive(distance, "distance");
    return std::pow(kFriedConstant * cn2 * k * k * distance, -0.6);
}

/// Propagation distance at which the Fried parameter equals r0.
inline double distance_for_r0(double cn2, double k, double r0) {
    detail::require_positive(cn2, "cn2");
    detail::require_positive(k, "wavenumber");
    detail::require_positive(r0, "r0");
    return std::pow(r0, -5.0 / 3.0) / (kFriedConstant * cn2 * k * k);
}

/// Path parameters an r0 was derived from.
struct TurbulencePath {
    double cn2;
    double k;
    double distance;
};

/// Kolmogorov weak-turbulence model, fully described by its Fried parameter.
class TurbulenceModel {
public:
    explicit TurbulenceModel(double r0) : r0_(r0) { detail::require_positive(r0, "r0"); }

    static TurbulenceModel from_path(double cn2, double k, double distance) {
        TurbulenceModel model(fried_parameter(cn2, k, distance));
        model.path_ = TurbulencePath{cn2, k, distance};
        return model;
    }

    double r0() const noexcept { return r0_; }
    const std::optional<TurbulencePath>& path() const noexcept { return path_; }

private:
    double r0_;
    std::optional<TurbulencePath> path_;
};

/// D_phi(r) = 6.88 (r/r0)^(5/3), mean squared phase difference at separation r.
inline double phase_structure_function(double r, const TurbulenceModel& model) {
    if (!(r >= 0.0)) {
        throw DomainError("phase_structure_function: r must be non-negative");
    }
    return kStructureConstant * std::pow(r / model.r0(), 5.0 / 3.0);
}

/// Phi(f) = 0.023 r0^(-5/3) f^(-11/3) with f the spatial frequency in cycles per metre.
/// Two-sided 2-D spectrum: D(r) = 4 pi int Phi(f) (1 - J0(2 pi f r)) f df, which gives
/// back 6.88 (r/r0)^(5/3) to within the rounding of the two constants (0.4%).
inline double phase_spectrum(double freq, const TurbulenceModel& model) {
    if (!(freq > 0.0)) {
        throw DomainError("phase_spectrum: frequency must be positive");
    }
    return kSpectrumConstant * std::pow(model.r0(), -5.0 / 3.0) * std::pow(freq, -11.0 / 3.0);
}

}  // namespace oamturb
