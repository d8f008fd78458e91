#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "symcool/constants.hpp"
#include "symcool/error.hpp"
#include "symcool/units.hpp"

namespace symcool {

// A Cd+ isotope modeled as a two-level scatterer on its D2 line.
// transition_offset is the angular frequency of the D2 line relative to the
// catalog's frequency origin (Cd114 for the standard catalog).
struct IonSpecies {
    std::string label;
    double mass = 0.0;               // kg
    double transition_offset = 0.0;  // rad/s
    double gamma = 0.0;              // rad/s, natural linewidth (FWHM)
    double i_sat = 0.0;              // W/m^2
    double wavelength = 0.0;         // m

    double wavenumber() const { return two_pi / wavelength; }
    double recoil_momentum() const { return PhysicalConstants::hbar * wavenumber(); }

    bool valid() const { return mass > 0 && gamma > 0 && i_sat > 0 && wavelength > 0; }

    bool operator==(const IonSpecies&) const = default;
};

namespace cadmium {

inline constexpr double natural_width_mhz = 47.0;
inline constexpr double d2_wavelength_m = 214.5e-9;
inline constexpr double saturation_intensity_w_per_cm2 = 0.6;
inline constexpr double shift_112_114_mhz = 680.0;
inline constexpr double shift_111_116_mhz = 5200.0;

inline constexpr std::array<std::string_view, 8> isotope_labels = {
    "Cd106", "Cd108", "Cd110", "Cd111", "Cd112", "Cd113", "Cd114", "Cd116"};

inline bool is_known_label(std::string_view label) {
    return std::find(isotope_labels.begin(), isotope_labels.end(), label) !=
           isotope_labels.end();
}

// Integer mass number parsed from "CdNNN".
inline int mass_number(std::string_view label) {
    if (!is_known_label(label)) {
        throw NotFoundError("unknown species label '" + std::string(label) + "'");
    }
    return std::stoi(std::string(label.substr(2)));
}

}  // namespace cadmium

// Species lookup with a fixed frequency origin. Only offsets that are actually
// known are stored; anything else must be supplied with with_offset().
class SpeciesCatalog {
public:
    // Origin Cd114; Cd112 lies 680 MHz above it.
    static SpeciesCatalog standard() {
        SpeciesCatalog c("Cd114");
        c.offsets_["Cd114"] = 0.0;
        c.offsets_["Cd112"] = units::mhz_to_angular(cadmium::shift_112_114_mhz);
        return c;
    }

    // Origin Cd116 (the refrigerator of the qubit pair); Cd111 lies 5.2 GHz above it.
    static SpeciesCatalog qubit_pair() {
        SpeciesCatalog c("Cd116");
        c.offsets_["Cd116"] = 0.0;
        c.offsets_["Cd111"] = units::mhz_to_angular(cadmium::shift_111_116_mhz);
        return c;
    }

    SpeciesCatalog& with_offset(const std::string& label, double offset_rad_s) {
        cadmium::mass_number(label);
        offsets_[label] = offset_rad_s;
        return *this;
    }

    const std::string& origin() const { return origin_; }

    bool has_offset(const std::string& label) const { return offsets_.count(label) != 0; }

    IonSpecies lookup(const std::string& label) const {
        const int a = cadmium::mass_number(label);
        auto it = offsets_.find(label);
        if (it == offsets_.end()) {
            throw ConfigError("missing field transition_offset for " + label +
                              " (relative to " + origin_ + "); supply it explicitly");
        }
        IonSpecies s;
        s.label = label;
        s.mass = a * PhysicalConstants::amu;
        s.transition_offset = it->second;
        s.gamma = units::mhz_to_angular(cadmium::natural_width_mhz);
        s.i_sat = cadmium::saturation_intensity_w_per_cm2 * 1e4;
        s.wavelength = cadmium::d2_wavelength_m;
        return s;
    }

private:
    explicit SpeciesCatalog(std::string origin) : origin_(std::move(origin)) {}

    std::string origin_;
    std::map<std::string, double> offsets_;
};

inline IonSpecies species_catalog(const std::string& label) {
    return SpeciesCatalog::standard().lookup(label);
}

// Lookup in the context of a partner isotope, so that the (111, 116) pair
// resolves without extra input.
inline IonSpecies species_catalog(const std::string& label, const std::string& partner) {
    const bool qubit_pair = (label == "Cd111" && partner == "Cd116") ||
                            (label == "Cd116" && partner == "Cd111");
    if (qubit_pair) return SpeciesCatalog::qubit_pair().lookup(label);
    cadmium::mass_number(partner);
    return species_catalog(label);
}

// T_D = hbar gamma / (2 k_B)
inline double doppler_limit_temperature(const IonSpecies& s) {
    return PhysicalConstants::hbar * s.gamma / (2.0 * PhysicalConstants::boltzmann);
}

}  // namespace symcool
