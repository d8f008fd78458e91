#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symcool/constants.hpp"
#include "symcool/crystal.hpp"
#include "symcool/error.hpp"
#include "symcool/radiation.hpp"
#include "symcool/rng.hpp"
#include "symcool/trap.hpp"
#include "symcool/vec.hpp"

namespace symcool {

enum class IntegrationMode { full_rf, secular };
enum class ForceModel { stochastic, deterministic };

inline const char* to_string(IntegrationMode m) { return m == IntegrationMode::full_rf ? "full_rf" : "secular"; }
inline const char* to_string(ForceModel f) { return f == ForceModel::stochastic ? "stochastic" : "deterministic"; }

struct SimulationConfig {
    IntegrationMode mode = IntegrationMode::secular;
    ForceModel force_model = ForceModel::stochastic;
    double dt = 0.5e-9;
    double duration = 1.0e-3;
    double burn_in = 0.5e-3;
    std::uint64_t seed = 1;
    std::size_t record_stride = 200;
    double start_temperature = 10e-3;  // K
    double detection_efficiency = 1e-3;
    double ejection_radius = 50e-6;

    void validate(const TrapConfig& trap, double max_secular_omega) const {
        if (!(dt > 0.0)) throw ConfigError("simulation.dt must be > 0");
        if (!(duration > 0.0)) throw ConfigError("simulation.duration must be > 0");
        if (!(burn_in >= 0.0 && burn_in < duration)) throw ConfigError("simulation.burn_in must satisfy 0 <= burn_in < duration");
        if (record_stride == 0) throw ConfigError("simulation.record_stride must be >= 1");
        if (!(detection_efficiency >= 0.0 && detection_efficiency <= 1.0)) {
            throw ConfigError("simulation.detection_efficiency must lie in [0, 1]");
        }
        if (!(start_temperature >= 0.0)) throw ConfigError("simulation.start_temperature must be >= 0");
        if (mode == IntegrationMode::full_rf && !(dt * trap.rf_omega < 0.2)) {
            throw ConfigError("full_rf mode requires dt*Omega < 0.2 (got " + std::to_string(dt * trap.rf_omega) + ")");
        }
        if (mode == IntegrationMode::secular && !(dt * max_secular_omega < 0.05)) {
            throw ConfigError("secular mode requires dt*omega_max < 0.05 (got " +
                              std::to_string(dt * max_secular_omega) + ")");
        }
    }
};

struct Ejection {
    bool ejected = false;
    double time = 0.0;
    std::size_t ion = 0;
    double kinetic_energy = 0.0;  // J, at ejection
};

// Sampled history of one run. Per-sample arrays are laid out sample-major,
// ion-minor; counts additionally beam-minor.
struct Trajectory {
    SimulationConfig config;
    std::vector<std::string> beam_labels;
    std::vector<IonSpecies> species;

    std::vector<double> times;
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<std::uint64_t> counts;  // cumulative scatter events

    // Secular (micromotion-filtered) samples used for temperatures and energies.
    // In secular mode these coincide with the recorded samples; in full_rf mode
    // there is one per drive period.
    std::vector<double> thermal_times;
    std::vector<Vec3> thermal_positions;
    std::vector<Vec3> thermal_velocities;
    std::vector<double> thermal_energy;  // total secular energy at each thermal sample

    IonCrystal final_state;
    double final_time = 0.0;
    Ejection ejection;

    std::size_t ion_count() const { return species.size(); }
    std::size_t beam_count() const { return beam_labels.size(); }
    std::size_t sample_count() const { return times.size(); }

    const Vec3& position(std::size_t sample, std::size_t ion) const { return positions[sample * ion_count() + ion]; }
    const Vec3& velocity(std::size_t sample, std::size_t ion) const { return velocities[sample * ion_count() + ion]; }
    std::uint64_t count(std::size_t sample, std::size_t ion, std::size_t beam) const {
        return counts[(sample * ion_count() + ion) * beam_count() + beam];
    }

    std::optional<std::size_t> beam_index(const std::string& label) const {
        for (std::size_t b = 0; b < beam_labels.size(); ++b) {
            if (beam_labels[b] == label) return b;
        }
        return std::nullopt;
    }
};

// Trap with the uniform static field set so that `pinned_ion` sits on the rf null.
inline TrapConfig compensated_trap(const TrapConfig& trap, const std::vector<IonSpecies>& species,
                                   std::size_t pinned_ion) {
    const SecularSpectrum sec = secular_spectrum(trap, species);
    const Equilibrium eq = equilibrium_positions(species, trap, sec, pinned_ion);
    TrapConfig out = trap;
    out.static_field = eq.static_field;
    return out;
}

// Equilibrium positions with Maxwell-Boltzmann velocities at `temperature`.
// In full_rf mode positions are placed on the driven micromotion orbit at t = 0.
inline IonCrystal thermal_crystal(const std::vector<IonSpecies>& species, const TrapConfig& trap,
                                  double temperature, IntegrationMode mode, RngStream& rng) {
    const SecularSpectrum sec = secular_spectrum(trap, species);
    const Equilibrium eq = equilibrium_positions(species, trap, sec);
    IonCrystal c;
    for (std::size_t i = 0; i < species.size(); ++i) {
        Ion ion;
        ion.species = species[i];
        ion.position = eq.positions[i];
        if (mode == IntegrationMode::full_rf) {
            const Vec3 u = eq.positions[i] - trap.rf_null;
            ion.position += micromotion_amplitude_vector(species[i], trap, u);
        }
        const double sigma = std::sqrt(PhysicalConstants::boltzmann * temperature / species[i].mass);
        ion.velocity = Vec3(rng.normal(), rng.normal(), rng.normal()) * sigma;
        c.ions.push_back(ion);
    }
    return c;
}

// Pseudopotential + Coulomb energy of a configuration.
inline double secular_energy(const std::vector<IonSpecies>& species, const std::vector<Vec3>& x,
                             const std::vector<Vec3>& v, const TrapConfig& trap,
                             const std::vector<Vec3>& omega) {
    double e = 0.0;
    for (std::size_t i = 0; i < species.size(); ++i) {
        const Vec3 u = x[i] - trap.rf_null;
        e += 0.5 * species[i].mass * v[i].squaredNorm();
        e += 0.5 * species[i].mass * omega[i].cwiseProduct(omega[i]).dot(u.cwiseProduct(u));
        e -= PhysicalConstants::elem_charge * trap.static_field.dot(x[i]);
        for (std::size_t j = i + 1; j < species.size(); ++j) {
            e += PhysicalConstants::coulomb_coupling / (x[i] - x[j]).norm();
        }
    }
    return e;
}

namespace detail {

// Least-squares fit of one drive period of samples to
//   c0 + c1 s + c2 s^2 + (cos, sin)(Omega t) + (cos, sin)(2 Omega t),  s in [0, 1),
// evaluated at mid-period. Removes the Omega-synchronous micromotion.
class PeriodFilter {
public:
    static constexpr int nb = 7;
    using Basis = Eigen::Matrix<double, nb, 1>;

    explicit PeriodFilter(std::size_t ions) : rhs_x_(ions), rhs_v_(ions) { reset(0.0); }

    void reset(double block_start) {
        start_ = block_start;
        normal_.setZero();
        for (auto& r : rhs_x_) r.setZero();
        for (auto& r : rhs_v_) r.setZero();
        samples_ = 0;
    }

    void add(double s, double phase, const std::vector<Vec3>& x, const std::vector<Vec3>& v) {
        Basis b;
        b << 1.0, s, s * s, std::cos(phase), std::sin(phase), std::cos(2 * phase), std::sin(2 * phase);
        normal_.noalias() += b * b.transpose();
        for (std::size_t i = 0; i < x.size(); ++i) {
            rhs_x_[i].noalias() += b * x[i].transpose();
            rhs_v_[i].noalias() += b * v[i].transpose();
        }
        ++samples_;
    }

    bool ready() const { return samples_ >= 2 * nb; }

    void solve(std::vector<Vec3>& x_out, std::vector<Vec3>& v_out) const {
        const Eigen::LDLT<Eigen::Matrix<double, nb, nb>> ldlt(normal_);
        Basis mid;
        mid << 1.0, 0.5, 0.25, 0.0, 0.0, 0.0, 0.0;
        for (std::size_t i = 0; i < rhs_x_.size(); ++i) {
            const Eigen::Matrix<double, nb, 3> cx = ldlt.solve(rhs_x_[i]);
            const Eigen::Matrix<double, nb, 3> cv = ldlt.solve(rhs_v_[i]);
            x_out[i] = (mid.transpose() * cx).transpose();
            v_out[i] = (mid.transpose() * cv).transpose();
        }
    }

    double start() const { return start_; }

private:
    double start_ = 0.0;
    Eigen::Matrix<double, nb, nb> normal_;
    std::vector<Eigen::Matrix<double, nb, 3>> rhs_x_;
    std::vector<Eigen::Matrix<double, nb, 3>> rhs_v_;
    std::size_t samples_ = 0;
};

}  // namespace detail

// Velocity-Verlet integration of trap + Coulomb forces; radiation enters after
// each step as instantaneous velocity kicks (sampled, or mean force * dt).
inline Trajectory run(const IonCrystal& crystal, const TrapConfig& trap,
                      const std::vector<LaserBeam>& beams, const SimulationConfig& sim) {
    crystal.validate();
    for (const auto& b : beams) b.validate();

    const std::size_t n = crystal.size();
    const std::size_t nbeams = beams.size();
    std::vector<IonSpecies> species;
    for (const auto& ion : crystal.ions) species.push_back(ion.species);
    const SecularSpectrum sec = secular_spectrum(trap, species);
    std::vector<Vec3> omega(n);
    double omega_max = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        omega[i] = sec.at(species[i].label);
        omega_max = std::max(omega_max, omega[i].maxCoeff());
    }
    sim.validate(trap, omega_max);
    const bool full_rf = sim.mode == IntegrationMode::full_rf;
    const bool stochastic = sim.force_model == ForceModel::stochastic;

    Trajectory traj;
    traj.config = sim;
    traj.species = species;
    for (const auto& b : beams) traj.beam_labels.push_back(b.label);

    std::vector<Vec3> x(n), v(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = crystal.ions[i].position;
        v[i] = crystal.ions[i].velocity;
    }

    // Precomputed per-ion trap coefficients.
    const double e = PhysicalConstants::elem_charge;
    std::vector<Vec3> k_secular(n), k_static(n), rf_gain(n), mm_gain(n);
    const double r0 = trap.electrode_radius;
    for (std::size_t i = 0; i < n; ++i) {
        k_secular[i] = species[i].mass * omega[i].cwiseProduct(omega[i]);
        for (int a = 0; a < 3; ++a) {
            k_static[i][a] = species[i].mass * trap.rf_omega * trap.rf_omega / 4.0 * trap.static_a[a] *
                             TrapConfig::a_reference_mass / species[i].mass;
            rf_gain[i][a] = e * trap.rf_amplitude * trap.geometric_factor[a] / (r0 * r0);
            mm_gain[i][a] = -0.5 * mathieu_q_signed(species[i], trap, static_cast<Axis>(a));
        }
    }
    const Vec3 static_force = e * trap.static_field;

    auto compute_forces = [&](double t) {
        const double c = full_rf ? std::cos(trap.rf_omega * t) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3 u = x[i] - trap.rf_null;
            if (full_rf) {
                f[i] = (rf_gain[i] * c - k_static[i]).cwiseProduct(u) + static_force;
            } else {
                f[i] = -k_secular[i].cwiseProduct(u) + static_force;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Vec3 fc = detail::coulomb_force(x[i] - x[j]);
                f[i] += fc;
                f[j] -= fc;
            }
        }
    };

    std::vector<std::uint64_t> counts(n * nbeams, 0);
    std::vector<double> expected(n * nbeams, 0.0);  // deterministic-mode accumulators

    auto record = [&](double t) {
        traj.times.push_back(t);
        for (std::size_t i = 0; i < n; ++i) {
            traj.positions.push_back(x[i]);
            traj.velocities.push_back(v[i]);
        }
        traj.counts.insert(traj.counts.end(), counts.begin(), counts.end());
    };
    auto record_thermal = [&](double t, const std::vector<Vec3>& xs, const std::vector<Vec3>& vs) {
        traj.thermal_times.push_back(t);
        traj.thermal_positions.insert(traj.thermal_positions.end(), xs.begin(), xs.end());
        traj.thermal_velocities.insert(traj.thermal_velocities.end(), vs.begin(), vs.end());
        traj.thermal_energy.push_back(secular_energy(species, xs, vs, trap, omega));
    };

    RngStream rng(sim.seed);
    RadiationWorkspace ws;
    std::vector<Vec3> recoil(n), mm_dir(n);

    const auto steps = static_cast<std::uint64_t>(std::llround(sim.duration / sim.dt));
    const double period = two_pi / trap.rf_omega;
    detail::PeriodFilter filter(n);
    std::vector<Vec3> fx(n), fv(n);
    std::uint64_t block = 0;

    double t = 0.0;
    compute_forces(t);
    record(t);
    if (full_rf) {
        filter.add(0.0, 0.0, x, v);
    } else {
        record_thermal(t, x, v);
    }

    const double eject2 = sim.ejection_radius * sim.ejection_radius;
    for (std::uint64_t step = 1; step <= steps; ++step) {
        const double half = 0.5 * sim.dt;
        for (std::size_t i = 0; i < n; ++i) {
            v[i] += f[i] * (half / species[i].mass);
            x[i] += v[i] * sim.dt;
        }
        t = static_cast<double>(step) * sim.dt;
        compute_forces(t);
        for (std::size_t i = 0; i < n; ++i) v[i] += f[i] * (half / species[i].mass);

        for (std::size_t i = 0; i < n; ++i) {
            const IonSpecies& sp = species[i];
            Vec3 mm_amp = Vec3::Zero();
            if (!full_rf) mm_amp = mm_gain[i].cwiseProduct(x[i] - trap.rf_null);
            for (std::size_t b = 0; b < nbeams; ++b) {
                const LaserBeam& beam = beams[b];
                if (!beam.enabled || beam.saturation == 0.0) continue;
                const double beta = full_rf ? 0.0 : modulation_index(beam, sp, mm_amp);
                const double rate = scatter_rate(beam, sp, v[i], beta, trap.rf_omega, ws);
                const Vec3 pk = sp.recoil_momentum() * beam.direction;
                if (stochastic) {
                    const ScatterSample s = sample_scatter(rate, sim.dt, pk, rng);
                    if (s.count) {
                        v[i] += s.momentum_transfer / sp.mass;
                        counts[i * nbeams + b] += s.count;
                    }
                } else {
                    if (rate * sim.dt > max_events_per_step) {
                        throw TimestepError("rate*dt exceeds " + std::to_string(max_events_per_step));
                    }
                    v[i] += pk * (rate * sim.dt / sp.mass);
                    double& acc = expected[i * nbeams + b];
                    acc += rate * sim.dt;
                    counts[i * nbeams + b] = static_cast<std::uint64_t>(acc);
                }
            }
        }

        bool ejected = false;
        for (std::size_t i = 0; i < n; ++i) {
            const double r2 = (x[i] - trap.rf_null).squaredNorm();
            if (!(r2 <= eject2) || !v[i].allFinite()) {
                traj.ejection.ejected = true;
                traj.ejection.time = t;
                traj.ejection.ion = i;
                traj.ejection.kinetic_energy = 0.5 * species[i].mass * v[i].squaredNorm();
                ejected = true;
                break;
            }
        }

        if (full_rf) {
            const auto b = static_cast<std::uint64_t>(std::floor(t / period));
            if (b != block) {
                if (filter.ready()) {
                    filter.solve(fx, fv);
                    record_thermal(filter.start() + 0.5 * period, fx, fv);
                }
                block = b;
                filter.reset(static_cast<double>(b) * period);
            }
            const double s = (t - filter.start()) / period;
            filter.add(s, trap.rf_omega * t, x, v);
        } else if (step % sim.record_stride == 0 || ejected || step == steps) {
            record_thermal(t, x, v);
        }

        if (step % sim.record_stride == 0 || ejected || step == steps) record(t);
        if (ejected) break;
    }

    traj.final_time = t;
    traj.final_state = crystal;
    for (std::size_t i = 0; i < n; ++i) {
        traj.final_state.ions[i].position = x[i];
        traj.final_state.ions[i].velocity = v[i];
    }
    return traj;
}

// Kinetic temperature m <|v|^2> / (3 k_B) from the secular samples in [t0, t1].
inline double temperature(const Trajectory& traj, std::size_t ion, double t0, double t1) {
    if (ion >= traj.ion_count()) throw ArgumentError("ion index out of range");
    if (!(t1 > t0)) throw ArgumentError("temperature window is empty");
    if (traj.thermal_times.empty() || t0 < traj.thermal_times.front() - traj.config.dt ||
        t1 > traj.final_time + traj.config.dt) {
        throw ArgumentError("temperature window outside recorded span");
    }
    double sum = 0.0;
    std::size_t k = 0;
    const std::size_t n = traj.ion_count();
    for (std::size_t s = 0; s < traj.thermal_times.size(); ++s) {
        const double ts = traj.thermal_times[s];
        if (ts < t0 || ts > t1) continue;
        sum += traj.thermal_velocities[s * n + ion].squaredNorm();
        ++k;
    }
    if (k == 0) throw ArgumentError("temperature window contains no samples");
    return traj.species[ion].mass * (sum / static_cast<double>(k)) / (3.0 * PhysicalConstants::boltzmann);
}

inline double temperature(const Trajectory& traj, std::size_t ion) {
    return temperature(traj, ion, traj.config.burn_in, traj.final_time);
}

// Cumulative counts at time t: last recorded sample with time <= t.
inline std::uint64_t counts_at(const Trajectory& traj, std::size_t ion, std::size_t beam, double t) {
    std::size_t lo = 0;
    std::size_t hi = traj.times.size();
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (traj.times[mid] <= t) lo = mid; else hi = mid;
    }
    return traj.count(lo, ion, beam);
}

// Detected count rate: events in [t0, t1] / (t1 - t0) * efficiency. An ion
// ejected inside the window contributes no further counts.
inline double fluorescence_rate(const Trajectory& traj, std::size_t ion, const std::string& beam_label,
                                double t0, double t1, double efficiency) {
    const auto b = traj.beam_index(beam_label);
    if (!b) throw NotFoundError("unknown beam label '" + beam_label + "'");
    if (ion >= traj.ion_count()) throw ArgumentError("ion index out of range");
    if (!(t1 > t0)) throw ArgumentError("fluorescence window is empty");
    if (t0 < traj.config.burn_in - 1e-15) throw ArgumentError("fluorescence window starts before burn-in");
    if (traj.times.empty()) return 0.0;
    const auto c1 = counts_at(traj, ion, *b, t1);
    const auto c0 = counts_at(traj, ion, *b, t0);
    return efficiency * static_cast<double>(c1 - c0) / (t1 - t0);
}

inline double fluorescence_rate(const Trajectory& traj, std::size_t ion, const std::string& beam_label) {
    return fluorescence_rate(traj, ion, beam_label, traj.config.burn_in, traj.config.duration,
                             traj.config.detection_efficiency);
}

}  // namespace symcool
