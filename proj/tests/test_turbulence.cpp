#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oamturb/gauss_legendre.hpp"
#include "oamturb/turbulence.hpp"

using namespace oamturb;

TEST(FriedParameter, ReferenceLink) {
    // Cn2 = 1e-15 m^-2/3, lambda = 800 nm, L = 1 km.
    const double k = 2.0 * std::numbers::pi / 800e-9;
    EXPECT_NEAR(fried_parameter(1e-15, k, 1000.0), 0.25317461181833845, 1e-14);
}

TEST(FriedParameter, PowerLawInDistance) {
    const double k = 7.0e6;
    for (double s : {0.5, 2.0, 10.0}) {
        EXPECT_NEAR(fried_parameter(1e-14, k, s * 300.0), std::pow(s, -0.6) * fried_parameter(1e-14, k, 300.0),
                    1e-14);
    }
}

TEST(FriedParameter, DecreasesInEachArgument) {
    const double base = fried_parameter(1e-15, 7e6, 1000.0);
    EXPECT_LT(fried_parameter(2e-15, 7e6, 1000.0), base);
    EXPECT_LT(fried_parameter(1e-15, 8e6, 1000.0), base);
    EXPECT_LT(fried_parameter(1e-15, 7e6, 1100.0), base);
}

TEST(FriedParameter, RejectsNonPositiveInput) {
    EXPECT_THROW(fried_parameter(0.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(fried_parameter(1e-15, -1.0, 1.0), DomainError);
    EXPECT_THROW(fried_parameter(1e-15, 1.0, 0.0), DomainError);
    EXPECT_THROW(distance_for_r0(1e-15, 1.0, -0.1), DomainError);
}

TEST(DistanceForR0, RoundTripsAndScales) {
    const double cn2 = 3e-16;
    const double k = 2.0 * std::numbers::pi / 1550e-9;
    for (double r0 : {0.01, 0.1, 1.0}) {
        const double distance = distance_for_r0(cn2, k, r0);
        EXPECT_NEAR(fried_parameter(cn2, k, distance), r0, 1e-12 * r0);
        EXPECT_NEAR(distance_for_r0(cn2, k, r0 / 2.0), std::pow(2.0, 5.0 / 3.0) * distance, 1e-12 * distance);
    }
}

TEST(DistanceForR0, MatchesBisectionOracle) {
    const double cn2 = 1e-15;
    const double k = 2.0 * std::numbers::pi / 800e-9;
    const double target = 0.05;
    // r0(L) decreases in L; bisect in log L.
    double lo = 1.0;
    double hi = 1e9;
    for (int i = 0; i < 200; ++i) {
        const double mid = std::sqrt(lo * hi);
        (fried_parameter(cn2, k, mid) > target ? lo : hi) = mid;
    }
    const double oracle = std::sqrt(lo * hi);
    EXPECT_NEAR(distance_for_r0(cn2, k, target), oracle, 1e-10 * oracle);
}

TEST(TurbulenceModel, FromPathKeepsProvenance) {
    const double k = 2.0 * std::numbers::pi / 800e-9;
    const auto model = TurbulenceModel::from_path(1e-15, k, 1000.0);
    ASSERT_TRUE(model.path().has_value());
    EXPECT_NEAR(model.r0(), fried_parameter(model.path()->cn2, model.path()->k, model.path()->distance),
                1e-12 * model.r0());
    EXPECT_FALSE(TurbulenceModel(0.1).path().has_value());
    EXPECT_THROW(TurbulenceModel(0.0), DomainError);
}

TEST(StructureFunction, KolmogorovValues) {
    const TurbulenceModel model(0.2);
    EXPECT_EQ(phase_structure_function(0.0, model), 0.0);
    EXPECT_NEAR(phase_structure_function(0.2, model), 6.88, 1e-13);
    EXPECT_NEAR(phase_structure_function(0.4, model), 21.842638475082428, 1e-12);
    EXPECT_THROW(phase_structure_function(-1.0, model), DomainError);
}

TEST(StructureFunction, ScaleLaws) {
    const TurbulenceModel model(0.3);
    for (double r : {0.01, 0.2, 3.0}) {
        for (double s : {0.25, 4.0}) {
            EXPECT_NEAR(phase_structure_function(s * r, model), std::pow(s, 5.0 / 3.0) * phase_structure_function(r, model),
                        1e-12 * phase_structure_function(s * r, model));
            EXPECT_NEAR(phase_structure_function(s * r, TurbulenceModel(s * 0.3)), phase_structure_function(r, model),
                        1e-12 * phase_structure_function(r, model));
        }
        EXPECT_LT(phase_structure_function(r, model), phase_structure_function(1.01 * r, model));
    }
}

TEST(PhaseSpectrum, PowerLaws) {
    const TurbulenceModel model(0.1);
    EXPECT_NEAR(phase_spectrum(20.0, model) / phase_spectrum(10.0, model), std::pow(2.0, -11.0 / 3.0), 1e-14);
    EXPECT_NEAR(phase_spectrum(5.0, TurbulenceModel(0.2)) / phase_spectrum(5.0, model), std::pow(2.0, -5.0 / 3.0),
                1e-14);
    EXPECT_THROW(phase_spectrum(0.0, model), DomainError);
}

TEST(PhaseSpectrum, IntegratesToStructureFunction) {
    // D(r) = 4 pi int Phi(f) (1 - J0(2 pi f r)) f df. With t = 2 pi f r this is
    // 4 pi 0.023 (2 pi)^(5/3) (r/r0)^(5/3) int t^(-8/3) (1 - J0(t)) dt; t = u^3 removes
    // the integrable singularity at the origin.
    auto integrand = [](double u) {
        const double t = u * u * u;
        return 3.0 * u * u * std::pow(t, -8.0 / 3.0) * (1.0 - std::cyl_bessel_j(0.0, t));
    };
    double integral = 0.0;
    const double u_max = 20.0;  // t = 8000
    const int panels = 4000;
    for (int p = 0; p < panels; ++p) {
        const double lo = 1e-6 + p * (u_max - 1e-6) / panels;
        const double hi = lo + (u_max - 1e-6) / panels;
        integral += integrate_gauss_legendre(integrand, lo, hi, 16);
    }
    // Tail: 1 - J0 ~ 1 beyond t = 8000 (J0 oscillation contributes < 1e-9).
    integral += 0.6 * std::pow(u_max * u_max * u_max, -5.0 / 3.0);
    const double coefficient = 4.0 * std::numbers::pi * kSpectrumConstant * std::pow(2.0 * std::numbers::pi, 5.0 / 3.0) * integral;
    EXPECT_NEAR(coefficient / kStructureConstant, 1.0, 0.01);
}
