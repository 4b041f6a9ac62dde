#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "oamturb/channel.hpp"
#include "oamturb/errors.hpp"

namespace oamturb {

using Matrix4c = Eigen::Matrix4cd;

/// Basis order of the post-selected two-photon subspace:
/// |-l0,-l0>, |-l0,+l0>, |+l0,-l0>, |+l0,+l0>. Index = 2 * (photon 1 is +l0) + (photon 2 is +l0).
enum class QubitBasis : int { MinusMinus = 0, MinusPlus = 1, PlusMinus = 2, PlusPlus = 3 };

inline constexpr int basis_index(int photon1_plus, int photon2_plus) { return 2 * photon1_plus + photon2_plus; }

/// Two-photon density matrix over the qubit basis, plus the trace it had before
/// renormalization and the relative phase of the source state.
struct TwoQubitState {
    Matrix4c rho = Matrix4c::Zero();
    double norm = 1.0;
    double gamma = 0.0;

    double trace() const { return rho.trace().real(); }
};

/// (|l0,-l0> + e^{i gamma} |-l0,l0>) / sqrt 2 as a density matrix.
inline TwoQubitState bell_input(double gamma) {
    Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
    psi[static_cast<int>(QubitBasis::PlusMinus)] = 1.0 / std::sqrt(2.0);
    psi[static_cast<int>(QubitBasis::MinusPlus)] = std::polar(1.0 / std::sqrt(2.0), gamma);
    TwoQubitState state;
    state.rho = psi * psi.adjoint();
    state.norm = 1.0;
    state.gamma = gamma;
    return state;
}

/// Truncated single-photon map T[out][out'][in][in'] over the qubit modes
/// (index 0 = -l0, 1 = +l0), filled from the selection rule and the kernel index:
/// index 0 entries are a, index +-2 l0 entries are b, everything else vanishes.
using QubitMap = std::array<std::array<std::array<std::array<double, 2>, 2>, 2>, 2>;

inline QubitMap qubit_map(const ChannelAmplitudes& amps) {
    QubitMap map{};
    auto sign = [](int idx) { return idx == 0 ? -1 : 1; };
    for (int l = 0; l < 2; ++l) {
        for (int lp = 0; lp < 2; ++lp) {
            for (int k = 0; k < 2; ++k) {
                for (int kp = 0; kp < 2; ++kp) {
                    // Work in units of l0.
                    const MapElementQuery q{sign(k), sign(kp), sign(l), sign(lp)};
                    if (!q.allowed()) {
                        continue;
                    }
                    const int m = q.phase_index();
                    map[l][lp][k][kp] = (m == 0) ? amps.a : (std::abs(m) == 2 ? amps.b : 0.0);
                }
            }
        }
    }
    return map;
}

/// (Lambda (x) Lambda) rho, unnormalized. Accepts any state on the qubit basis.
inline TwoQubitState propagate(const TwoQubitState& input, const ChannelAmplitudes& amps) {
    if (amps.lost) {
        throw DomainError("propagate: channel amplitudes are flagged as lost");
    }
    if (!(amps.a >= 0.0) || amps.a > 1.0 + 1e-9 || std::abs(amps.b) > amps.a + 1e-9) {
        throw DomainError("propagate: amplitudes violate 0 <= a <= 1, |b| <= a");
    }
    const QubitMap map = qubit_map(amps);
    TwoQubitState out;
    out.gamma = input.gamma;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            for (int ip = 0; ip < 2; ++ip) {
                for (int jp = 0; jp < 2; ++jp) {
                    std::complex<double> sum = 0.0;
                    for (int k = 0; k < 2; ++k) {
                        for (int n = 0; n < 2; ++n) {
                            for (int kp = 0; kp < 2; ++kp) {
                                for (int np = 0; np < 2; ++np) {
                                    const double weight = map[i][ip][k][kp] * map[j][jp][n][np];
                                    if (weight != 0.0) {
                                        sum += weight * input.rho(basis_index(k, n), basis_index(kp, np));
                                    }
                                }
                            }
                        }
                    }
                    out.rho(basis_index(i, j), basis_index(ip, jp)) = sum;
                }
            }
        }
    }
    out.norm = out.trace();
    return out;
}

/// Divides by the trace. The norm field keeps the pre-renormalization trace.
inline TwoQubitState renormalize(const TwoQubitState& state) {
    const double tr = state.trace();
    if (!(tr > 0.0)) {
        throw DomainError("renormalize: zero trace, the post-selected state is fully lost");
    }
    TwoQubitState out = state;
    out.rho /= tr;
    // Renormalizing an already normalized state keeps the original diagnostic.
    if (std::abs(tr - 1.0) > 1e-12) {
        out.norm = tr;
    }
    return out;
}

namespace detail {

inline Matrix4c spin_flip() {
    Matrix4c flip = Matrix4c::Zero();
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;
    return flip;
}

}  // namespace detail

/// Wootters concurrence max(0, l1 - l2 - l3 - l4), l_i the descending square roots of
/// the eigenvalues of rho (sy x sy) rho* (sy x sy). With rho = X X^dagger those are the
/// singular values of X^T (sy x sy) X, which keeps the small ones accurate for nearly
/// pure states.
inline double wootters_concurrence(const TwoQubitState& state) {
    constexpr double kTolerance = 1e-10;
    const Matrix4c& rho = state.rho;
    if ((rho - rho.adjoint()).norm() > 1e-12) {
        throw DomainError("wootters_concurrence: state is not Hermitian");
    }
    if (std::abs(rho.trace().real() - 1.0) > 1e-10) {
        throw DomainError("wootters_concurrence: state is not normalized");
    }
    const Matrix4c hermitian = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix4c> eig(hermitian);
    const Eigen::Vector4d evals = eig.eigenvalues();
    if (evals.minCoeff() < -kTolerance) {
        throw DomainError("wootters_concurrence: state is not positive semidefinite");
    }
    const Eigen::Vector4d roots = evals.cwiseMax(0.0).cwiseSqrt();
    const Matrix4c factor = eig.eigenvectors() * roots.asDiagonal();
    const Matrix4c tau = factor.transpose() * detail::spin_flip() * factor;
    Eigen::JacobiSVD<Matrix4c> svd(tau);
    const Eigen::Vector4d lambda = svd.singularValues();  // descending
    return std::max(0.0, lambda[0] - lambda[1] - lambda[2] - lambda[3]);
}

/// max(0, (1 - 2t) / (1 + t)^2) for the amplitude ratio t = b / a.
inline double concurrence_closed_form(double amplitude_ratio) {
    if (!(amplitude_ratio >= 0.0)) {
        throw DomainError("concurrence_closed_form: amplitude ratio must be non-negative");
    }
    const double t = amplitude_ratio;
    return std::max(0.0, (1.0 - 2.0 * t) / ((1.0 + t) * (1.0 + t)));
}

}  // namespace oamturb
