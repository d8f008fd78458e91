#include <cmath>

#include <gtest/gtest.h>

#include "symcool/crystal.hpp"
#include "symcool/units.hpp"

using namespace symcool;

namespace {

const IonSpecies cd112 = species_catalog("Cd112");
const IonSpecies cd114 = species_catalog("Cd114");

double separation(const Equilibrium& eq) { return (eq.positions[1] - eq.positions[0]).norm(); }

// Axial spring constant from the bare lowest-order Mathieu relations.
double axial_k(const IonSpecies& s, const TrapConfig& t) {
    const double q = 2.0 * PhysicalConstants::elem_charge * t.rf_amplitude * t.geometric_factor[0] /
                     (s.mass * t.rf_omega * t.rf_omega * t.electrode_radius * t.electrode_radius);
    const double w = t.rf_omega * q / (2.0 * std::sqrt(2.0));
    return s.mass * w * w;
}

}  // namespace

TEST(Crystal, EqualMassSeparationClosedForm) {
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd112};
    const auto sec = secular_spectrum(t, sp);
    const auto eq = equilibrium_positions(sp, t, sec);
    const double w = units::mhz_to_angular(2.8);
    const double e = PhysicalConstants::elem_charge;
    const double oracle = std::cbrt(e * e / (2.0 * M_PI * PhysicalConstants::vacuum_permittivity * cd112.mass * w * w));
    EXPECT_NEAR(separation(eq) / oracle, 1.0, 1e-9);
}

TEST(Crystal, PairSeparationAbout2um) {
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd114};
    const auto eq = equilibrium_positions(sp, t, secular_spectrum(t, sp));
    EXPECT_NEAR(units::m_to_um(separation(eq)), 2.0, 0.1);
    EXPECT_NEAR(eq.positions[0][1], 0.0, 1e-15);
    EXPECT_NEAR(eq.positions[0][2], 0.0, 1e-15);
}

TEST(Crystal, SingleIonSitsAtTrapMinimum) {
    TrapConfig t = TrapConfig::standard();
    t.rf_null = Vec3(0.1e-6, -0.2e-6, 0.05e-6);
    const std::vector<IonSpecies> sp{cd112};
    const auto eq = equilibrium_positions(sp, t, secular_spectrum(t, sp));
    EXPECT_NEAR((eq.positions[0] - t.rf_null).norm(), 0.0, 1e-15);
}

TEST(Crystal, SeparationScalesWithOmegaToMinusTwoThirds) {
    const std::vector<IonSpecies> sp{cd112, cd114};
    const TrapConfig t1 = TrapConfig::calibrated(cd112, units::mhz_to_angular(2.8));
    const TrapConfig t2 = TrapConfig::calibrated(cd112, units::mhz_to_angular(5.6));
    const double d1 = separation(equilibrium_positions(sp, t1, secular_spectrum(t1, sp)));
    const double d2 = separation(equilibrium_positions(sp, t2, secular_spectrum(t2, sp)));
    EXPECT_NEAR(d1 / d2, std::pow(2.0, 2.0 / 3.0), 1e-9);
}

TEST(Crystal, PinnedIonStaysOnNull) {
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd114};
    const auto eq = equilibrium_positions(sp, t, secular_spectrum(t, sp), 0);
    EXPECT_LT(eq.positions[0].norm(), 1e-15);
    EXPECT_NEAR(units::m_to_um(separation(eq)), 2.0, 0.1);
    EXPECT_GT(eq.static_field.norm(), 0.0);
}

TEST(Crystal, EqualMassAxialModes) {
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd112};
    const auto sec = secular_spectrum(t, sp);
    const auto eq = equilibrium_positions(sp, t, sec);
    const auto m = normal_modes(sp, eq.positions, sec);
    std::vector<double> axial;
    for (std::size_t k = 0; k < m.frequencies.size(); ++k)
        if (m.axis[k] == Axis::x) axial.push_back(m.frequencies[k]);
    ASSERT_EQ(axial.size(), 2u);
    const double wx = sec.at("Cd112")[0];
    EXPECT_NEAR(axial[0] / wx, 1.0, 1e-9);
    EXPECT_NEAR(axial[1] / wx, std::sqrt(3.0), 1e-9);
}

TEST(Crystal, AxialModesMatchTwoByTwoOracle) {
    // Uncompensated trap, so the separation follows from k1 x1 = -C/d^2, k2 x2 = C/d^2.
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd114};
    const auto sec = secular_spectrum(t, sp);
    const auto eq = equilibrium_positions(sp, t, sec);
    const auto m = normal_modes(sp, eq.positions, sec);

    const double C = PhysicalConstants::elem_charge * PhysicalConstants::elem_charge /
                     (4.0 * M_PI * PhysicalConstants::vacuum_permittivity);
    const double k1 = axial_k(cd112, t), k2 = axial_k(cd114, t);
    const double d = std::cbrt(C * (1.0 / k1 + 1.0 / k2));
    const double c = 2.0 * C / (d * d * d);
    const double a11 = (k1 + c) / cd112.mass, a22 = (k2 + c) / cd114.mass;
    const double a12 = -c / std::sqrt(cd112.mass * cd114.mass);
    const double tr = a11 + a22, det = a11 * a22 - a12 * a12;
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const double lo = std::sqrt(0.5 * (tr - disc)), hi = std::sqrt(0.5 * (tr + disc));

    EXPECT_NEAR(separation(eq) / d, 1.0, 1e-9);
    std::vector<double> axial;
    for (std::size_t k = 0; k < m.frequencies.size(); ++k)
        if (m.axis[k] == Axis::x) axial.push_back(m.frequencies[k]);
    ASSERT_EQ(axial.size(), 2u);
    EXPECT_NEAR(axial[0] / lo, 1.0, 1e-9);
    EXPECT_NEAR(axial[1] / hi, 1.0, 1e-9);
}

TEST(Crystal, ModeVectorsOrthonormal) {
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd114};
    const auto sec = secular_spectrum(t, sp);
    const auto eq = equilibrium_positions(sp, t, sec);
    const auto m = normal_modes(sp, eq.positions, sec);
    const Eigen::MatrixXd g = m.mode_vectors.transpose() * m.mode_vectors;
    EXPECT_LT((g - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(m.participation.col(k).sum(), 1.0, 1e-12);
    for (std::size_t k = 1; k < m.frequencies.size(); ++k) EXPECT_GE(m.frequencies[k], m.frequencies[k - 1]);
}

TEST(Crystal, RejectsThreeIons) {
    const TrapConfig t = TrapConfig::standard();
    const std::vector<IonSpecies> sp{cd112, cd114, cd112};
    EXPECT_THROW(equilibrium_positions(sp, t, secular_spectrum(t, sp)), ArgumentError);
}
