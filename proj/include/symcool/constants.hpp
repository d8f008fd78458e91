#pragma once

#include <numbers>

namespace symcool {

// CODATA 2018 exact / recommended values, SI.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;          // J s
    static constexpr double boltzmann = 1.380649e-23;        // J/K
    static constexpr double elem_charge = 1.602176634e-19;   // C
    static constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
    static constexpr double amu = 1.66053906660e-27;         // kg

    // e^2 / (4 pi eps0)
    static constexpr double coulomb_coupling =
        elem_charge * elem_charge / (4.0 * std::numbers::pi * vacuum_permittivity);
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace symcool
