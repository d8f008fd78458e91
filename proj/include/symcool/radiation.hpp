#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "symcool/bessel.hpp"
#include "symcool/constants.hpp"
#include "symcool/error.hpp"
#include "symcool/rng.hpp"
#include "symcool/species.hpp"
#include "symcool/vec.hpp"

namespace symcool {

struct LaserBeam {
    std::string label;
    double detuning = 0.0;    // rad/s, relative to the catalog origin's rest transition
    double saturation = 0.0;  // I / I_sat
    Vec3 direction = Vec3(1, 1, 1).normalized();
    bool enabled = true;

    void validate() const {
        if (!(saturation >= 0.0) || !std::isfinite(saturation)) {
            throw ConfigError("beam '" + label + "': saturation must be >= 0");
        }
        if (std::abs(direction.norm() - 1.0) > 1e-12) {
            throw ConfigError("beam '" + label + "': direction must be a unit vector");
        }
        if (!std::isfinite(detuning)) throw ConfigError("beam '" + label + "': non-finite detuning");
    }
};

// Detuning of `beam` seen by an ion of `species` at rest.
inline double rest_detuning(const LaserBeam& beam, const IonSpecies& species) {
    return beam.detuning - species.transition_offset;
}

// Saturated two-level scatter rate.
inline double lorentzian_rate(double gamma, double s, double delta) {
    const double x = 2.0 * delta / gamma;
    return 0.5 * gamma * s / (1.0 + s + x * x);
}

// Scratch buffers for the sideband sum; one per thread of integration.
struct RadiationWorkspace {
    SidebandWeights weights;
    std::vector<double> scratch;
    double cached_beta = -1.0;

    const SidebandWeights& weights_for(double beta) {
        if (beta != cached_beta) {
            sideband_weights(beta, weights, scratch);
            cached_beta = beta;
        }
        return weights;
    }
};

// Scatter rate with Doppler shift and micromotion sidebands of modulation
// index beta. Each sideband sees the full saturation parameter in its own
// denominator (approximation A1: no multi-frequency saturation).
inline double scatter_rate(const LaserBeam& beam, const IonSpecies& species, const Vec3& velocity,
                           double beta, double rf_omega, RadiationWorkspace& ws) {
    if (!beam.enabled || beam.saturation == 0.0) return 0.0;
    const double delta = rest_detuning(beam, species) - species.wavenumber() * beam.direction.dot(velocity);
    if (beta == 0.0) return lorentzian_rate(species.gamma, beam.saturation, delta);
    const auto& w = ws.weights_for(beta).weight;
    double rate = w[0] * lorentzian_rate(species.gamma, beam.saturation, delta);
    for (std::size_t n = 1; n < w.size(); ++n) {
        // past the turning point the weights fall off super-exponentially
        if (w[n] < 1e-18 && static_cast<double>(n) > beta) break;
        const double shift = static_cast<double>(n) * rf_omega;
        rate += w[n] * (lorentzian_rate(species.gamma, beam.saturation, delta - shift) +
                        lorentzian_rate(species.gamma, beam.saturation, delta + shift));
    }
    return rate;
}

inline double scatter_rate(const LaserBeam& beam, const IonSpecies& species, const Vec3& velocity,
                           double beta = 0.0, double rf_omega = 0.0) {
    RadiationWorkspace ws;
    return scatter_rate(beam, species, velocity, beta, rf_omega, ws);
}

struct ScatterSample {
    std::uint64_t count = 0;
    Vec3 momentum_transfer = Vec3::Zero();  // kg m/s, summed over events
};

inline constexpr double max_events_per_step = 0.1;

// Poisson number of scatter events in dt. Each event transfers hbar k along
// the beam (absorption) plus hbar k along an isotropic direction (emission).
inline ScatterSample sample_scatter(double rate, double dt, const Vec3& recoil_momentum,
                                    RngStream& rng) {
    const double mean = rate * dt;
    if (mean > max_events_per_step) {
        throw TimestepError("rate*dt = " + std::to_string(mean) + " exceeds " +
                            std::to_string(max_events_per_step) + "; reduce the timestep");
    }
    ScatterSample out;
    if (mean <= 0.0) return out;
    out.count = rng.poisson(mean);
    const double p = recoil_momentum.norm();
    for (std::uint64_t k = 0; k < out.count; ++k) {
        out.momentum_transfer += recoil_momentum + p * rng.unit_sphere();
    }
    return out;
}

// Deterministic radiation pressure hbar k Gamma along the beam.
inline Vec3 mean_radiation_force(const LaserBeam& beam, const IonSpecies& species,
                                 const Vec3& velocity, double beta = 0.0, double rf_omega = 0.0) {
    return species.recoil_momentum() * scatter_rate(beam, species, velocity, beta, rf_omega) *
           beam.direction;
}

// Micromotion modulation index seen along the beam.
inline double modulation_index(const LaserBeam& beam, const IonSpecies& species,
                               const Vec3& micromotion_amplitude) {
    return std::abs(species.wavenumber() * beam.direction.dot(micromotion_amplitude));
}

}  // namespace symcool
