#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oamturb/lgmode.hpp"

using namespace oamturb;

TEST(LGMode, RejectsInvalidParameters) {
    EXPECT_THROW(LGMode(1, 0.0), DomainError);
    EXPECT_THROW(LGMode(1, -1.0), DomainError);
    EXPECT_THROW(LGMode(1, 1.0, 1), DomainError);
    EXPECT_NO_THROW(LGMode(-3, 0.5, 0));
}

TEST(RadialProfile, GaussianOnAxisValue) {
    // l = 0: normalization fixes R(0) = 2 / w0.
    EXPECT_DOUBLE_EQ(radial_profile(LGMode(0, 1.0), 0.0), 2.0);
    EXPECT_DOUBLE_EQ(radial_profile(LGMode(0, 0.5), 0.0), 4.0);
}

TEST(RadialProfile, VortexVanishesOnAxis) {
    for (int l : {1, 2, 19, 20, 150}) {
        EXPECT_EQ(radial_profile(LGMode(l, 0.7), 0.0), 0.0) << l;
    }
}

TEST(RadialProfile, PeakAtRingRadius) {
    // d/dr log R = |l|/r - 2 r / w0^2 vanishes at r = sqrt(|l|/2) w0.
    const LGMode mode(4, 1.0);
    double best_r = 0.0;
    double best = 0.0;
    for (int i = 1; i <= 400000; ++i) {
        const double r = i * 1e-5;
        const double v = std::abs(radial_profile(mode, r));
        if (v > best) {
            best = v;
            best_r = r;
        }
    }
    EXPECT_NEAR(best_r, std::sqrt(2.0), 2e-5);
}

TEST(RadialProfile, NegativeRadiusIsDomainError) {
    EXPECT_THROW(radial_profile(LGMode(2, 1.0), -0.1), DomainError);
}

TEST(RadialProfile, UnderflowIsExactZero) {
    EXPECT_EQ(radial_profile(LGMode(5000, 1.0), 0.01), 0.0);
    EXPECT_EQ(radial_profile(LGMode(3, 1.0), 100.0), 0.0);
}

TEST(RadialProfile, LogSpaceMatchesDirectEvaluationAtThreshold) {
    // Both branches evaluate the same formula; compare across the switch at |l| = 20.
    for (double r : {0.5, 2.0, 3.1, 4.0}) {
        const LGMode mode(20, 1.0);
        const double direct = (2.0 / 1.0) / std::sqrt(std::tgamma(21.0)) * std::pow(std::sqrt(2.0) * r, 20) *
                              std::exp(-r * r);
        EXPECT_NEAR(radial_profile(mode, r), direct, 1e-13 * std::abs(direct) + 1e-300);
    }
}

TEST(RadialProfile, ParityIsExact) {
    for (int l : {1, 7, 25, 300}) {
        for (double r : {0.1, 1.0, 3.3, 12.0}) {
            EXPECT_EQ(radial_profile(LGMode(l, 0.8), r), radial_profile(LGMode(-l, 0.8), r));
        }
    }
}

TEST(RadialProfile, Homogeneity) {
    for (int l : {0, 3, 30}) {
        for (double s : {0.1, 7.0}) {
            for (double r : {0.3, 1.2, 4.0}) {
                const double base = radial_profile(LGMode(l, 1.0), r);
                const double scaled = radial_profile(LGMode(l, s), s * r);
                EXPECT_NEAR(scaled, base / s, 1e-13 * std::abs(base / s)) << l << " " << s << " " << r;
            }
        }
    }
}

TEST(RadialProfile, NormalizedForAllSmallOrders) {
    for (int l = 0; l <= 60; ++l) {
        const LGMode mode(l, 1.3);
        const auto support = radial_support(mode);
        const auto res = integrate_doubling(
            [&](double r) {
                const double v = radial_profile(mode, r);
                return v * v * r;
            },
            support.lo, support.hi, 32, 1e-13);
        EXPECT_NEAR(res.value, 1.0, 1e-10) << "l = " << l;
    }
}

TEST(MeanRadius, GammaRatioValues) {
    // Gamma(5/2)/Gamma(2)/sqrt 2 and Gamma(3/2)/Gamma(1)/sqrt 2.
    EXPECT_NEAR(mean_radius(LGMode(1, 1.0)), 0.9399856029866251, 1e-14);
    EXPECT_NEAR(mean_radius(LGMode(0, 1.0)), 0.6266570686577501, 1e-14);
    for (int l : {0, 4, 90}) {
        EXPECT_NEAR(mean_radius(LGMode(l, 2.0)), 2.0 * mean_radius(LGMode(l, 1.0)), 1e-13);
    }
}

TEST(PhaseCorrelationLength, ClosedFormValues) {
    EXPECT_NEAR(phase_correlation_length(LGMode(1, 1.0)), 0.9399856029866251, 1e-14);
    EXPECT_NEAR(phase_correlation_length(LGMode(2, 1.0)), 0.8308377426119605, 1e-14);
    EXPECT_EQ(phase_correlation_length(LGMode(-2, 1.0)), phase_correlation_length(LGMode(2, 1.0)));
    EXPECT_THROW(phase_correlation_length(LGMode(0, 1.0)), DomainError);
    EXPECT_THROW(phase_correlation_length_numeric(LGMode(0, 1.0)), DomainError);
}

TEST(PhaseCorrelationLength, LargeOrderAsymptote) {
    // Stirling: Gamma(l + 3/2) / Gamma(l + 1) ~ sqrt(l), sin(pi/2l) ~ pi/2l.
    const double l = 40000.0;
    const double xi = phase_correlation_length(LGMode(40000, 1.0));
    const double asymptote = std::numbers::pi / (2.0 * std::numbers::sqrt2) / std::sqrt(l);
    EXPECT_NEAR(xi / asymptote, 1.0, 1e-4);
}

TEST(PhaseCorrelationLength, QuadratureOracleAgrees) {
    for (int l : {1, 2, 5, 17, 64, 100}) {
        const LGMode mode(l, 1.0);
        const double closed = phase_correlation_length(mode);
        EXPECT_NEAR(phase_correlation_length_numeric(mode), closed, 1e-8 * closed) << l;
    }
    const double unit = phase_correlation_length_numeric(LGMode(1, 1.0));
    EXPECT_NEAR(unit, 0.94, 1e-4);
    EXPECT_NEAR(phase_correlation_length_numeric(LGMode(1, 3.0)), 3.0 * unit, 1e-8 * unit);
}

TEST(PhaseCorrelationLength, DecreasesWithOrder) {
    // Strictly decreasing from l = 3 on; l = 1, 2, 3 happen to be ordered as well.
    for (int l = 3; l < 600; ++l) {
        EXPECT_LT(phase_correlation_length(LGMode(l + 1, 1.0)), phase_correlation_length(LGMode(l, 1.0))) << l;
    }
    EXPECT_GT(phase_correlation_length(LGMode(1, 1.0)), phase_correlation_length(LGMode(2, 1.0)));
    EXPECT_GT(phase_correlation_length(LGMode(2, 1.0)), phase_correlation_length(LGMode(3, 1.0)));
}
