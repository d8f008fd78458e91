#include <cmath>

#include <gtest/gtest.h>

#include "symcool/species.hpp"
#include "symcool/units.hpp"

using namespace symcool;

TEST(Species, Cd112SitsAbove114By680MHz) {
    const double d = species_catalog("Cd112").transition_offset - species_catalog("Cd114").transition_offset;
    EXPECT_NEAR(d, 2.0 * M_PI * 680e6, 1e-3);
}

TEST(Species, Cd114IsTheReference) { EXPECT_EQ(species_catalog("Cd114").transition_offset, 0.0); }

TEST(Species, QubitPairShiftIs5p2GHz) {
    const double d = species_catalog("Cd111", "Cd116").transition_offset -
                     species_catalog("Cd116", "Cd111").transition_offset;
    EXPECT_NEAR(d, 2.0 * M_PI * 5.2e9, 1.0);
}

TEST(Species, CatalogValues) {
    const auto s = species_catalog("Cd112");
    EXPECT_NEAR(s.gamma, 2.0 * M_PI * 47e6, 1e-3);
    EXPECT_DOUBLE_EQ(s.wavelength, 214.5e-9);
    EXPECT_NEAR(s.i_sat, 6000.0, 1e-9);  // 0.6 W/cm^2
    EXPECT_NEAR(s.mass / PhysicalConstants::amu, 111.9, 0.1);
    EXPECT_TRUE(s.valid());
}

TEST(Species, UnknownLabelThrows) {
    EXPECT_THROW(species_catalog("Cd999"), NotFoundError);
    EXPECT_THROW(species_catalog("Yb171"), NotFoundError);
}

TEST(Species, DopplerLimit47MHz) {
    // hbar*gamma/(2 kB) evaluated by hand: 1.0546e-34 * 2.953e8 / 2.7613e-23
    EXPECT_NEAR(doppler_limit_temperature(species_catalog("Cd112")) * 1e3, 1.128, 0.005);
}

TEST(Species, DopplerLimitScalesWithGamma) {
    auto s = species_catalog("Cd112");
    const double t1 = doppler_limit_temperature(s);
    s.gamma *= 2.0;
    EXPECT_NEAR(doppler_limit_temperature(s), 2.0 * t1, 1e-15);
    s.gamma = 2.0 * M_PI * 20e6;
    EXPECT_NEAR(doppler_limit_temperature(s) * 1e3, 0.480, 0.002);
}

TEST(Species, RecoilVelocity) {
    const auto s = species_catalog("Cd112");
    EXPECT_NEAR(s.recoil_momentum() / s.mass, 1.66e-2, 0.01e-2);
}
