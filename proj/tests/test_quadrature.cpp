#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "oamturb/quadrature.hpp"

using namespace oamturb;

namespace {

// Adaptive Simpson, the independent oracle for the kernel coefficients.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 60);
}

// c_m = (1/pi) int_0^pi K cos(m theta), split into panels so each Simpson call sees a
// few oscillations at most.
double kernel_coefficient_oracle(double s, int m) {
    const int panels = std::max(8, 2 * std::abs(m));
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = std::numbers::pi * p / panels;
        const double hi = std::numbers::pi * (p + 1) / panels;
        sum += adaptive_simpson([&](double t) { return turbulence_kernel(t, s) * std::cos(m * t); }, lo, hi, 1e-15);
    }
    return sum / std::numbers::pi;
}

}  // namespace

TEST(QuadratureSpec, Validation) {
    EXPECT_NO_THROW(QuadratureSpec{}.validate());
    EXPECT_THROW((QuadratureSpec{16, 256, 1e-9}.validate()), ConfigError);
    EXPECT_THROW((QuadratureSpec{64, 300, 1e-9}.validate()), ConfigError);
    EXPECT_THROW((QuadratureSpec{64, 128, 1e-9}.validate()), ConfigError);
    EXPECT_THROW((QuadratureSpec{64, 256, 0.0}.validate()), ConfigError);
}

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
    for (int n : {1, 2, 5, 20, 64}) {
        const auto& rule = gauss_legendre(n);
        double wsum = 0.0;
        for (double w : rule.weights) {
            wsum += w;
        }
        EXPECT_NEAR(wsum, 2.0, 1e-13) << n;
        const int degree = 2 * n - 1;
        const double exact = (degree % 2 == 1) ? 0.0 : 2.0 / (degree + 1);
        EXPECT_NEAR(integrate_gauss_legendre([&](double x) { return std::pow(x, degree); }, -1.0, 1.0, n), exact,
                    1e-13);
        EXPECT_NEAR(integrate_gauss_legendre([&](double x) { return std::pow(x, 2 * n - 2); }, -1.0, 1.0, n),
                    2.0 / (2 * n - 1), 1e-13);
    }
}

TEST(RadialQuadrature, NormalizationWeight) {
    for (int l : {0, 3, 40}) {
        const auto res = radial_quadrature(LGMode(l, 0.9), [](double) { return 1.0; });
        EXPECT_NEAR(res.value, 1.0, 1e-10) << l;
    }
}

TEST(RadialQuadrature, FirstMomentIsMeanRadius) {
    for (int l : {0, 7, 120}) {
        const LGMode mode(l, 1.7);
        EXPECT_NEAR(radial_quadrature(mode, [](double r) { return r; }).value, mean_radius(mode),
                    1e-9 * mean_radius(mode));
    }
}

TEST(RadialQuadrature, GaussianSecondMoment) {
    // l = 0: int (4/w0^2) exp(-2 r^2/w0^2) r^3 dr = w0^2 / 2.
    const double w0 = 0.37;
    EXPECT_NEAR(radial_quadrature(LGMode(0, w0), [](double r) { return r * r; }).value, w0 * w0 / 2.0, 1e-12);
}

TEST(AngularFourier, ConstantKernel) {
    auto one = [](double) { return 1.0; };
    EXPECT_NEAR(angular_fourier_coefficient(one, 0), 1.0, 1e-15);
    EXPECT_NEAR(angular_fourier_coefficient(one, 3), 0.0, 1e-15);
    EXPECT_NEAR(angular_fourier_coefficient(one, -5), 0.0, 1e-15);
}

TEST(AngularFourier, Orthogonality) {
    auto cosine = [](double t) { return std::cos(t); };
    EXPECT_NEAR(angular_fourier_coefficient(cosine, 1), 0.5, 1e-15);
    EXPECT_NEAR(angular_fourier_coefficient(cosine, -1), 0.5, 1e-15);
    EXPECT_NEAR(angular_fourier_coefficient(cosine, 2), 0.0, 1e-15);
}

TEST(AngularFourier, AliasingGuard) {
    auto one = [](double) { return 1.0; };
    EXPECT_THROW(angular_fourier_coefficient(one, 40), ConfigError);
    EXPECT_NO_THROW(angular_fourier_coefficient(one, 40, QuadratureSpec{64, 512, 1e-9}));
}

TEST(AngularFourier, OddKernelIsRejected) {
    auto sine = [](double t) { return std::sin(t); };
    EXPECT_THROW(angular_fourier_coefficient(sine, 1), NumericError);
}

TEST(AngularFourier, TurbulenceKernelMatchesAdaptiveOracle) {
    const double s = 0.7;
    const QuadratureSpec spec{64, 256, 1e-12};
    const double dft = angular_fourier_coefficient([&](double t) { return turbulence_kernel(t, s); }, 0, spec);
    EXPECT_NEAR(dft, kernel_coefficient_oracle(s, 0), 1e-9);
}

TEST(KernelPanels, MatchAdaptiveOracle) {
    const std::vector<std::pair<double, int>> cases = {{0.01, 0}, {0.01, 4},  {0.7, 0},  {0.7, 2},
                                                       {3.0, 10}, {12.0, 0}, {12.0, 40}, {50.0, 100}};
    for (const auto& [s, m] : cases) {
        const int ms[] = {m};
        const double panel = turbulence_kernel_coefficients(s, ms).values.front();
        const double oracle = kernel_coefficient_oracle(s, m);
        const double c0 = kernel_coefficient_oracle(s, 0);
        EXPECT_NEAR(panel, oracle, 1e-9 * c0) << "s = " << s << " m = " << m;
    }
}

TEST(KernelPanels, AgreeWithDenseDft) {
    // Uniform sampling converges only algebraically because of the cusp; a dense DFT
    // still has to land on the same value.
    for (double s : {0.3, 2.0}) {
        const int ms[] = {0, 6};
        const auto panel = turbulence_kernel_coefficients(s, ms);
        const auto dft = angular_fourier_coefficients([&](double t) { return turbulence_kernel(t, s); }, ms,
                                                      QuadratureSpec{64, 1 << 14, 1e-11});
        EXPECT_NEAR(panel.values[0], dft[0], 1e-9);
        EXPECT_NEAR(panel.values[1], dft[1], 1e-9);
    }
}

TEST(KernelPanels, FourierBoundAndDoubling) {
    std::vector<int> ms;
    for (int m = 0; m <= 200; m += 5) {
        ms.push_back(m);
    }
    for (double s : {0.01, 0.05, 0.2, 1.0, 3.0, 10.0}) {
        const auto coarse = turbulence_kernel_coefficients(s, ms, QuadratureSpec{64, 256, 1e-9});
        const auto fine = turbulence_kernel_coefficients(s, ms, QuadratureSpec{64, 512, 1e-9});
        const double c0 = coarse.values[0];
        EXPECT_GT(c0, 0.0);
        for (std::size_t k = 0; k < ms.size(); ++k) {
            EXPECT_LE(std::abs(coarse.values[k]), c0 + 1e-15) << s << " " << ms[k];
            EXPECT_NEAR(coarse.values[k], fine.values[k], 1e-9 * c0) << s << " " << ms[k];
        }
    }
}

TEST(KernelPanels, RejectsBadScale) {
    const int ms[] = {0};
    EXPECT_THROW(turbulence_kernel_coefficients(-1.0, ms), DomainError);
}
