#pragma once

// Internal computation is SI with angular frequencies. Configuration files,
// CSV and the CLI use MHz (ordinary frequency), um, mW/cm^2 and mK.

#include "symcool/constants.hpp"

namespace symcool::units {

constexpr double mhz_to_angular(double mhz) { return two_pi * 1e6 * mhz; }
constexpr double angular_to_mhz(double w) { return w / (two_pi * 1e6); }
constexpr double ghz_to_angular(double ghz) { return two_pi * 1e9 * ghz; }
constexpr double angular_to_hz(double w) { return w / two_pi; }

constexpr double um_to_m(double um) { return um * 1e-6; }
constexpr double m_to_um(double m) { return m * 1e6; }
constexpr double ns_to_s(double ns) { return ns * 1e-9; }
constexpr double us_to_s(double us) { return us * 1e-6; }
constexpr double s_to_us(double s) { return s * 1e6; }

constexpr double mk_to_k(double mk) { return mk * 1e-3; }
constexpr double k_to_mk(double k) { return k * 1e3; }

// 1 mW/cm^2 = 10 W/m^2
constexpr double mw_per_cm2_to_si(double v) { return v * 10.0; }
constexpr double si_to_mw_per_cm2(double v) { return v / 10.0; }

}  // namespace symcool::units
