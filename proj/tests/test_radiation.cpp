#include <cmath>

#include <gtest/gtest.h>

#include "symcool/bessel.hpp"
#include "symcool/radiation.hpp"
#include "symcool/rng.hpp"

using namespace symcool;

namespace {

const IonSpecies cd112 = species_catalog("Cd112");

LaserBeam beam_at(double delta, double s) {
    LaserBeam b;
    b.label = "probe";
    b.detuning = cd112.transition_offset + delta;
    b.saturation = s;
    return b;
}

}  // namespace

TEST(Bessel, SequenceMatchesStdCylBesselJ) {
    std::vector<double> j;
    for (double x : {0.0, 0.1, 1.0, 2.4048, 3.45, 6.0, 12.5, 25.0, 60.0}) {
        bessel_j_sequence(x, 80, j);
        ASSERT_FALSE(j.empty());
        for (int n = 0; n <= 80; ++n) {
            const double ref = std::cyl_bessel_j(static_cast<double>(n), x);
            const double got = n < static_cast<int>(j.size()) ? j[n] : 0.0;
            EXPECT_NEAR(got, ref, 1e-10) << "x=" << x << " n=" << n;
        }
    }
}

TEST(Bessel, WeightSumIsOne) {
    for (double beta : {0.0, 0.5, 3.45, 6.0, 20.0, 75.0, 300.0}) {
        const auto w = sideband_weights(beta);
        EXPECT_NEAR(w.total, 1.0, 1e-6) << beta;
        double sum = w.weight[0];
        for (std::size_t n = 1; n < w.weight.size(); ++n) sum += 2.0 * w.weight[n];
        EXPECT_NEAR(sum, w.total, 1e-14);
    }
}

TEST(Bessel, CarrierAtBeta6) {
    const auto w = sideband_weights(6.0);
    EXPECT_NEAR(w.weight[0], std::pow(std::cyl_bessel_j(0.0, 6.0), 2), 1e-12);
    EXPECT_NEAR(w.weight[0], 0.0223, 0.001);
}

TEST(Bessel, NegativeBetaRejected) { EXPECT_THROW(sideband_weights(-1.0), ArgumentError); }

TEST(Radiation, LowSaturationOnResonance) {
    const double r = scatter_rate(beam_at(0.0, 1e-4), cd112, Vec3::Zero());
    EXPECT_NEAR(r / (1e-4 * cd112.gamma / 2.0), 1.0, 2e-4);
}

TEST(Radiation, SaturationOneOnResonance) {
    EXPECT_NEAR(scatter_rate(beam_at(0.0, 1.0), cd112, Vec3::Zero()), cd112.gamma / 4.0, 1e-6);
}

TEST(Radiation, HalfLinewidthRed) {
    const double r = scatter_rate(beam_at(-0.5 * cd112.gamma, 0.35), cd112, Vec3::Zero());
    EXPECT_NEAR(r, 0.5 * cd112.gamma * 0.35 / 2.35, 1e-6);
    EXPECT_NEAR(r / (0.5 * cd112.gamma), 0.149, 0.001);
}

TEST(Radiation, CarrierSuppressedByMicromotion) {
    const LaserBeam b = beam_at(0.0, 0.35);
    const double rf = 2.0 * M_PI * 38.8e6;
    const double r0 = scatter_rate(b, cd112, Vec3::Zero());
    const double r6 = scatter_rate(b, cd112, Vec3::Zero(), 6.0, rf);
    EXPECT_LT(r6, r0);
    // oracle: Bessel-weighted sum of shifted Lorentzians
    double oracle = 0.0;
    for (int n = -40; n <= 40; ++n) {
        const double jn = std::cyl_bessel_j(static_cast<double>(std::abs(n)), 6.0);
        oracle += jn * jn * lorentzian_rate(cd112.gamma, 0.35, -n * rf);
    }
    EXPECT_NEAR(r6 / oracle, 1.0, 1e-6);
}

TEST(Radiation, DopplerShiftSign) {
    // moving against the beam sees the light blue-shifted
    const LaserBeam b = beam_at(-0.5 * cd112.gamma, 0.35);
    const Vec3 v = -b.direction * (0.25 * cd112.gamma / cd112.wavenumber());
    EXPECT_NEAR(scatter_rate(b, cd112, v), lorentzian_rate(cd112.gamma, 0.35, -0.25 * cd112.gamma), 1e-6);
}

TEST(Radiation, DisabledOrDarkBeam) {
    LaserBeam b = beam_at(0.0, 0.35);
    b.enabled = false;
    EXPECT_EQ(scatter_rate(b, cd112, Vec3::Zero()), 0.0);
    EXPECT_EQ(mean_radiation_force(beam_at(0.0, 0.0), cd112, Vec3::Zero()).norm(), 0.0);
}

TEST(Radiation, ZeroRateNeverScatters) {
    RngStream rng(5);
    for (int k = 0; k < 1000; ++k) {
        const auto s = sample_scatter(0.0, 1e-9, Vec3(1e-27, 0, 0), rng);
        EXPECT_EQ(s.count, 0u);
        EXPECT_EQ(s.momentum_transfer.norm(), 0.0);
    }
}

TEST(Radiation, PoissonMean) {
    RngStream rng(11);
    const int n = 1000000;
    double total = 0.0;
    for (int k = 0; k < n; ++k) total += static_cast<double>(sample_scatter(5e7, 1e-9, Vec3::Zero(), rng).count);
    EXPECT_GE(total / n, 0.0493);
    EXPECT_LE(total / n, 0.0507);
}

TEST(Radiation, TimestepViolation) {
    RngStream rng(1);
    EXPECT_THROW(sample_scatter(2e8, 1e-9, Vec3::Zero(), rng), TimestepError);
    EXPECT_NO_THROW(sample_scatter(1e8, 1e-9, Vec3::Zero(), rng));
}

TEST(Radiation, EmissionIsIsotropic) {
    RngStream rng(23);
    const int n = 1000000;
    Vec3 sum = Vec3::Zero();
    for (int k = 0; k < n; ++k) sum += rng.unit_sphere();
    const Vec3 mean = sum / n;
    // each component has variance 1/3
    for (int a = 0; a < 3; ++a) EXPECT_LT(std::abs(mean[a]), 3.0 / std::sqrt(3.0 * n));
}

TEST(Radiation, EventMomentum) {
    RngStream rng(3);
    const Vec3 p = cd112.recoil_momentum() * Vec3(1, 0, 0);
    int seen = 0;
    for (int k = 0; k < 200000 && seen < 100; ++k) {
        const auto s = sample_scatter(5e7, 1e-9, p, rng);
        if (s.count != 1) continue;
        ++seen;
        // absorption along x plus emission of the same magnitude
        EXPECT_NEAR((s.momentum_transfer - p).norm() / p.norm(), 1.0, 1e-12);
    }
    EXPECT_EQ(seen, 100);
}

TEST(Radiation, CoolingSlopeOnRedSide) {
    const LaserBeam b = beam_at(-0.5 * cd112.gamma, 0.01);
    const double dv = 0.01;
    const double f_plus = mean_radiation_force(b, cd112, b.direction * dv).dot(b.direction);
    const double f_minus = mean_radiation_force(b, cd112, -b.direction * dv).dot(b.direction);
    EXPECT_LT(f_plus - f_minus, 0.0);
}

TEST(Radiation, ModulationIndex) {
    LaserBeam b = beam_at(0.0, 1.0);
    b.direction = Vec3(1, 0, 0);
    EXPECT_NEAR(modulation_index(b, cd112, Vec3(0.2e-6, 5e-6, 0)), cd112.wavenumber() * 0.2e-6, 1e-12);
    EXPECT_EQ(modulation_index(b, cd112, Vec3::Zero()), 0.0);
}
