#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "symcool/constants.hpp"
#include "symcool/error.hpp"
#include "symcool/species.hpp"
#include "symcool/units.hpp"
#include "symcool/vec.hpp"

namespace symcool {

// RF trap modeled as a per-axis quadrupole about rf_null.
//
// Equation of motion along axis i for u = x - rf_null:
//     m u'' = -m (Omega^2/4) a_i u + (e V kappa_i / r0^2) cos(Omega t) u + e E_i
// so that q_i = 2 e V kappa_i / (m Omega^2 r0^2). kappa_i may be signed; only
// |q| enters secular quantities. static_a is quoted for a_reference_mass and
// scales as 1/m for other species. static_field is a uniform compensation
// field that lets one ion of a crystal sit on the rf null.
struct TrapConfig {
    static constexpr double a_reference_mass = 114.0 * PhysicalConstants::amu;

    double rf_omega = units::mhz_to_angular(38.8);
    double rf_amplitude = 200.0;
    double electrode_radius = 200e-6;
    Vec3 geometric_factor = Vec3::Zero();
    Vec3 static_a = Vec3::Zero();
    Vec3 rf_null = Vec3::Zero();
    Vec3 static_field = Vec3::Zero();  // V/m

    // Fit |kappa_x| so that the lowest-order secular frequency of `species`
    // along x equals omega_x; the transverse axes get ratio_y * omega_x and
    // ratio_z * omega_x. Unequal transverse frequencies keep every mode bright
    // for a single cooling beam.
    static TrapConfig calibrated(const IonSpecies& species, double omega_x,
                                 double ratio_y = 1.4, double ratio_z = 1.5,
                                 double rf_omega = units::mhz_to_angular(38.8),
                                 double rf_amplitude = 200.0,
                                 double electrode_radius = 200e-6);

    static TrapConfig standard() {
        return calibrated(species_catalog("Cd112"), units::mhz_to_angular(2.8));
    }
};

inline double mathieu_q_signed(const IonSpecies& s, const TrapConfig& t, Axis axis) {
    const double r0 = t.electrode_radius;
    return 2.0 * PhysicalConstants::elem_charge * t.rf_amplitude * t.geometric_factor[index(axis)] /
           (s.mass * t.rf_omega * t.rf_omega * r0 * r0);
}

inline double mathieu_q(const IonSpecies& s, const TrapConfig& t, Axis axis) {
    return std::abs(mathieu_q_signed(s, t, axis));
}

inline double mathieu_a(const IonSpecies& s, const TrapConfig& t, Axis axis) {
    return t.static_a[index(axis)] * TrapConfig::a_reference_mass / s.mass;
}

enum class Stability { stable, marginal, unstable };

namespace detail {

// Monodromy matrix of u'' + (a - 2q cos 2 tau) u = 0 over one period (pi)
// by classical RK4. Returns its trace.
inline double mathieu_monodromy_trace(double a, double q, int steps = 4000) {
    const double h = std::numbers::pi / steps;
    auto accel = [a, q](double tau, double u) { return -(a - 2.0 * q * std::cos(2.0 * tau)) * u; };
    double trace = 0.0;
    for (int column = 0; column < 2; ++column) {
        double u = column == 0 ? 1.0 : 0.0;
        double v = column == 0 ? 0.0 : 1.0;
        double tau = 0.0;
        for (int k = 0; k < steps; ++k) {
            const double k1u = v, k1v = accel(tau, u);
            const double k2u = v + 0.5 * h * k1v, k2v = accel(tau + 0.5 * h, u + 0.5 * h * k1u);
            const double k3u = v + 0.5 * h * k2v, k3v = accel(tau + 0.5 * h, u + 0.5 * h * k2u);
            const double k4u = v + h * k3v, k4v = accel(tau + h, u + h * k3u);
            u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
            v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
            tau += h;
        }
        trace += column == 0 ? u : v;
    }
    return trace;
}

}  // namespace detail

// Floquet criterion on a numerically integrated period: |tr M| < 2 is bounded.
// The free particle (a = q = 0) and exact boundary points are marginal.
inline Stability stability_check(double a, double q) {
    if (a == 0.0 && q == 0.0) return Stability::marginal;
    if (!std::isfinite(a) || !std::isfinite(q)) return Stability::unstable;
    const double tr = std::abs(detail::mathieu_monodromy_trace(a, q));
    if (std::abs(tr - 2.0) < 1e-9) return Stability::marginal;
    return tr < 2.0 ? Stability::stable : Stability::unstable;
}

inline bool is_stable(double a, double q) { return stability_check(a, q) == Stability::stable; }

// Lowest-order secular frequency (Omega/2) sqrt(a + q^2/2). Accuracy degrades
// beyond q ~ 0.4.
inline double secular_frequency(double a, double q, double rf_omega) {
    const Stability st = stability_check(a, q);
    if (st == Stability::unstable) {
        throw StabilityError("Mathieu parameters (a=" + std::to_string(a) + ", q=" +
                             std::to_string(q) + ") are outside the first stability region");
    }
    if (st == Stability::marginal && a == 0.0 && q == 0.0) return 0.0;
    const double beta2 = a + 0.5 * q * q;
    if (beta2 < 0.0) {
        throw StabilityError("negative secular curvature a + q^2/2 = " + std::to_string(beta2));
    }
    return 0.5 * rf_omega * std::sqrt(beta2);
}

inline Vec3 secular_frequencies(const IonSpecies& s, const TrapConfig& t) {
    Vec3 w;
    for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
        w[index(ax)] = secular_frequency(mathieu_a(s, t, ax), mathieu_q(s, t, ax), t.rf_omega);
    }
    return w;
}

// Per-species secular frequencies, keyed by species label.
struct SecularSpectrum {
    std::map<std::string, Vec3> omega_secular;

    const Vec3& at(const std::string& label) const {
        auto it = omega_secular.find(label);
        if (it == omega_secular.end()) throw NotFoundError("no secular frequencies for " + label);
        return it->second;
    }
};

inline SecularSpectrum secular_spectrum(const TrapConfig& t, const std::vector<IonSpecies>& species) {
    SecularSpectrum out;
    for (const auto& s : species) {
        const Vec3 w = secular_frequencies(s, t);
        for (int i = 0; i < 3; ++i) {
            if (!(w[i] > 0.0)) {
                throw StabilityError(s.label + " has no confinement along axis " + std::to_string(i));
            }
        }
        out.omega_secular[s.label] = w;
    }
    return out;
}

inline TrapConfig TrapConfig::calibrated(const IonSpecies& species, double omega_x,
                                         double ratio_y, double ratio_z, double rf_omega,
                                         double rf_amplitude, double electrode_radius) {
    TrapConfig t;
    t.rf_omega = rf_omega;
    t.rf_amplitude = rf_amplitude;
    t.electrode_radius = electrode_radius;
    // omega = Omega q / (2 sqrt 2) at a = 0
    const double scale = species.mass * rf_omega * rf_omega * electrode_radius * electrode_radius /
                         (2.0 * PhysicalConstants::elem_charge * rf_amplitude);
    const double qx = 2.0 * std::sqrt(2.0) * omega_x / rf_omega;
    const double qy = 2.0 * std::sqrt(2.0) * ratio_y * omega_x / rf_omega;
    const double qz = 2.0 * std::sqrt(2.0) * ratio_z * omega_x / rf_omega;
    t.geometric_factor = Vec3(qx * scale, -qy * scale, qz * scale);
    return t;
}

// Full time-dependent trap force.
inline Vec3 rf_force(const IonSpecies& s, const TrapConfig& t, const Vec3& position, double time) {
    const Vec3 u = position - t.rf_null;
    const double r0 = t.electrode_radius;
    const double drive = PhysicalConstants::elem_charge * t.rf_amplitude / (r0 * r0) *
                         std::cos(t.rf_omega * time);
    const double static_k = s.mass * t.rf_omega * t.rf_omega / 4.0;
    Vec3 f;
    for (int i = 0; i < 3; ++i) {
        const double a = t.static_a[i] * TrapConfig::a_reference_mass / s.mass;
        f[i] = (-static_k * a + drive * t.geometric_factor[i]) * u[i];
    }
    return f + PhysicalConstants::elem_charge * t.static_field;
}

// Time-averaged (secular) trap force: -m omega_i^2 u_i + e E.
inline Vec3 pseudopotential_force(const IonSpecies& s, const Vec3& omega_secular,
                                  const TrapConfig& t, const Vec3& position) {
    const Vec3 u = position - t.rf_null;
    return -s.mass * omega_secular.cwiseProduct(omega_secular).cwiseProduct(u) +
           PhysicalConstants::elem_charge * t.static_field;
}

// Signed micromotion displacement amplitude per axis: the driven motion is
// u(t) ~ u_sec (1 - (q_i/2) cos Omega t), so the amplitude vector is -(q_i/2) u_i.
inline Vec3 micromotion_amplitude_vector(const IonSpecies& s, const TrapConfig& t,
                                         const Vec3& displacement_from_null) {
    Vec3 amp;
    for (Axis ax : {Axis::x, Axis::y, Axis::z}) {
        amp[index(ax)] = -0.5 * mathieu_q_signed(s, t, ax) * displacement_from_null[index(ax)];
    }
    return amp;
}

inline double micromotion_amplitude(const IonSpecies& s, const TrapConfig& t,
                                    const Vec3& displacement_from_null) {
    return micromotion_amplitude_vector(s, t, displacement_from_null).norm();
}

}  // namespace symcool
