#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "symcool/dynamics.hpp"
#include "symcool/error.hpp"
#include "symcool/parallel.hpp"
#include "symcool/radiation.hpp"
#include "symcool/rng.hpp"
#include "symcool/trap.hpp"

namespace symcool {

enum class ScanScenario { two_ion_ref_on, two_ion_ref_off, single_ion_both_beams };

inline const char* to_string(ScanScenario s) {
    switch (s) {
        case ScanScenario::two_ion_ref_on: return "two_ion_ref_on";
        case ScanScenario::two_ion_ref_off: return "two_ion_ref_off";
        case ScanScenario::single_ion_both_beams: return "single_ion_both_beams";
    }
    return "?";
}

struct ScanConfig {
    std::vector<double> detuning_grid;  // rad/s, relative to the probe species resonance
    SimulationConfig per_point;          // seed field is the master seed
    ScanScenario scenario = ScanScenario::two_ion_ref_on;
    std::size_t ensemble = 5;
    std::size_t probe_ion = 0;
    std::size_t threads = default_thread_count();

    void validate() const {
        if (detuning_grid.empty()) throw ConfigError("scan grid is empty");
        for (std::size_t i = 1; i < detuning_grid.size(); ++i) {
            if (!(detuning_grid[i] > detuning_grid[i - 1])) throw ConfigError("scan grid must be strictly increasing");
        }
        if (ensemble < 1) throw ConfigError("scan ensemble must be >= 1");
    }
};

// Evenly spaced grid [start, stop] inclusive.
inline std::vector<double> linear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw ConfigError("invalid scan range");
    std::vector<double> g;
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) g.push_back(start + static_cast<double>(i) * step);
    return g;
}

struct SpectrumPoint {
    double detuning = 0.0;  // rad/s
    double rate = 0.0;      // counts/s
    double stderr_rate = 0.0;
    double ejection_fraction = 0.0;
    double probe_temperature = 0.0;  // K, ensemble mean (surviving runs)
    double failure_fraction = 0.0;   // members that raised an error
};

struct Spectrum {
    std::vector<SpectrumPoint> points;
    std::vector<std::string> failures;  // one message per failed member, grid order

    std::vector<double> detunings() const {
        std::vector<double> d;
        for (const auto& p : points) d.push_back(p.detuning);
        return d;
    }
    std::vector<double> rates() const {
        std::vector<double> r;
        for (const auto& p : points) r.push_back(p.rate);
        return r;
    }
};

// Checks that crystal and beams match the requested scenario.
inline void validate_scenario(ScanScenario scenario, std::size_t ion_count, const LaserBeam& refrigerator) {
    switch (scenario) {
        case ScanScenario::two_ion_ref_on:
            if (ion_count != 2 || !refrigerator.enabled) throw ConfigError("two_ion_ref_on needs 2 ions and an enabled refrigerator");
            break;
        case ScanScenario::two_ion_ref_off:
            if (ion_count != 2 || refrigerator.enabled) throw ConfigError("two_ion_ref_off needs 2 ions and a disabled refrigerator");
            break;
        case ScanScenario::single_ion_both_beams:
            if (ion_count != 1 || !refrigerator.enabled) throw ConfigError("single_ion_both_beams needs 1 ion and an enabled refrigerator");
            break;
    }
}

struct RunOutcome {
    double rate = 0.0;
    bool ejected = false;
    double temperature = 0.0;
    bool failed = false;
    std::string error;
};

// One scan point, one ensemble member: thermal restart, run, probe fluorescence.
inline RunOutcome run_scan_member(const std::vector<IonSpecies>& species, const TrapConfig& trap,
                                  const LaserBeam& probe, const LaserBeam& refrigerator,
                                  const SimulationConfig& sim, std::size_t probe_ion) {
    RngStream init(derive_seed(sim.seed, 0x1d17));
    const IonCrystal crystal = thermal_crystal(species, trap, sim.start_temperature, sim.mode, init);
    const Trajectory traj = run(crystal, trap, {probe, refrigerator}, sim);
    RunOutcome out;
    out.rate = fluorescence_rate(traj, probe_ion, probe.label);
    out.ejected = traj.ejection.ejected;
    if (!out.ejected) out.temperature = temperature(traj, probe_ion);
    return out;
}

// Scans the probe detuning; every (point, seed) run is independent and uses
// the substream derive_seed(master, point * ensemble + member).
inline Spectrum scan_probe(const ScanConfig& scan, const std::vector<IonSpecies>& species,
                           const TrapConfig& trap, const LaserBeam& probe_template,
                           const LaserBeam& refrigerator) {
    scan.validate();
    validate_scenario(scan.scenario, species.size(), refrigerator);
    if (scan.probe_ion >= species.size()) throw ConfigError("probe ion index out of range");
    const IonSpecies& probe_species = species[scan.probe_ion];

    const std::size_t runs = scan.detuning_grid.size() * scan.ensemble;
    std::vector<RunOutcome> outcomes(runs);
    parallel_for(runs, scan.threads, [&](std::size_t r) {
        const std::size_t point = r / scan.ensemble;
        LaserBeam probe = probe_template;
        probe.detuning = scan.detuning_grid[point] + probe_species.transition_offset;
        SimulationConfig sim = scan.per_point;
        sim.seed = derive_seed(scan.per_point.seed, r);
        try {
            outcomes[r] = run_scan_member(species, trap, probe, refrigerator, sim, scan.probe_ion);
        } catch (const Error& e) {
            // a failing member is reported on its point; the scan carries on
            outcomes[r].failed = true;
            outcomes[r].error = e.what();
        }
    });

    Spectrum spec;
    for (std::size_t p = 0; p < scan.detuning_grid.size(); ++p) {
        SpectrumPoint pt;
        pt.detuning = scan.detuning_grid[p];
        double sum = 0.0, sum2 = 0.0, tsum = 0.0;
        std::size_t ejected = 0, failed = 0, hot = 0;
        for (std::size_t m = 0; m < scan.ensemble; ++m) {
            const RunOutcome& o = outcomes[p * scan.ensemble + m];
            if (o.failed) {
                ++failed;
                spec.failures.push_back("detuning " + std::to_string(units::angular_to_mhz(pt.detuning)) +
                                        " MHz, member " + std::to_string(m) + ": " + o.error);
                continue;
            }
            sum += o.rate;
            sum2 += o.rate * o.rate;
            if (o.ejected) ++ejected; else { tsum += o.temperature; ++hot; }
        }
        const std::size_t ok = scan.ensemble - failed;
        const double n = static_cast<double>(ok);
        if (ok > 0) pt.rate = sum / n;
        if (ok > 1) {
            const double var = std::max(0.0, (sum2 - n * pt.rate * pt.rate) / (n - 1.0));
            pt.stderr_rate = std::sqrt(var / n);
        }
        pt.ejection_fraction = static_cast<double>(ejected) / static_cast<double>(scan.ensemble);
        pt.failure_fraction = static_cast<double>(failed) / static_cast<double>(scan.ensemble);
        pt.probe_temperature = hot > 0 ? tsum / static_cast<double>(hot) : 0.0;
        spec.points.push_back(pt);
    }
    return spec;
}

namespace detail {

// Points of one side of `center` as (distance, value), distance ascending.
inline std::vector<std::pair<double, double>> side(const Spectrum& s, double center, bool blue) {
    std::vector<std::pair<double, double>> out;
    for (const auto& p : s.points) {
        const double d = blue ? p.detuning - center : center - p.detuning;
        if (d > 0.0) out.emplace_back(d, p.rate);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Linear interpolation of the spectrum at detuning x (clamped to the ends).
inline double interpolate(const Spectrum& s, double x) {
    const auto& pts = s.points;
    if (x <= pts.front().detuning) return pts.front().rate;
    if (x >= pts.back().detuning) return pts.back().rate;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (x <= pts[i].detuning) {
            const double w = (x - pts[i - 1].detuning) / (pts[i].detuning - pts[i - 1].detuning);
            return pts[i - 1].rate + w * (pts[i].rate - pts[i - 1].rate);
        }
    }
    return pts.back().rate;
}

// Trapezoid integral over distance [0, limit] of one side, with the value at
// the centre and at `limit` interpolated from the spectrum.
inline double side_integral(const Spectrum& s, double center, bool blue, double limit) {
    std::vector<std::pair<double, double>> pts = {{0.0, interpolate(s, center)}};
    for (const auto& p : side(s, center, blue)) {
        if (p.first < limit) pts.push_back(p);
    }
    pts.emplace_back(limit, interpolate(s, blue ? center + limit : center - limit));
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        area += 0.5 * (pts[i].second + pts[i - 1].second) * (pts[i].first - pts[i - 1].first);
    }
    return area;
}

}  // namespace detail

// |I_blue - I_red| / (I_blue + I_red) over the mirrored range common to both sides.
inline double asymmetry_metric(const Spectrum& s, double center) {
    const auto red = detail::side(s, center, false);
    const auto blue = detail::side(s, center, true);
    if (red.size() < 3 || blue.size() < 3) throw ArgumentError("asymmetry_metric needs at least 3 points per side");
    const double limit = std::min(red.back().first, blue.back().first);
    const double ib = detail::side_integral(s, center, true, limit);
    const double ir = detail::side_integral(s, center, false, limit);
    if (ib + ir == 0.0) return 0.0;
    return std::abs(ib - ir) / (ib + ir);
}

// Mean rate of blue-side points with distance in (lo, hi) divided by the mean
// of the spectrum at the mirrored red detunings.
inline double blue_to_red_ratio(const Spectrum& s, double center, double lo, double hi) {
    double blue = 0.0, red = 0.0;
    std::size_t n = 0;
    for (const auto& p : s.points) {
        const double d = p.detuning - center;
        if (d > lo && d < hi) {
            blue += p.rate;
            red += detail::interpolate(s, center - d);
            ++n;
        }
    }
    if (n == 0) throw ArgumentError("no blue-side points in the requested range");
    if (red == 0.0) throw ArgumentError("red-side mirror rate is zero");
    return blue / red;
}

}  // namespace symcool
