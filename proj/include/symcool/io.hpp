#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "symcool/budget.hpp"
#include "symcool/crystal.hpp"
#include "symcool/dynamics.hpp"
#include "symcool/error.hpp"
#include "symcool/fitting.hpp"
#include "symcool/spectrum.hpp"
#include "symcool/units.hpp"

namespace symcool {

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericError("cannot format number");
    return std::string(buf, p);
}

// Writes through a sibling temporary file and renames it into place, so a
// reader never sees a partially written file.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw Error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("cannot rename into '" + path.string() + "': " + ec.message());
    }
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline constexpr const char* trajectory_header =
    "time_s,ion,x_um,y_um,z_um,vx,vy,vz,counts_probe,counts_refrigerator";
inline constexpr const char* spectrum_header = "detuning_MHz,rate_counts_per_s,stderr,ejection_fraction";

inline std::string trajectory_csv(const Trajectory& traj) {
    std::string out = std::string(trajectory_header) + "\n";
    const std::size_t n = traj.ion_count();
    const std::size_t nb = traj.beam_labels.size();
    auto column = [&](const std::string& label) -> std::optional<std::size_t> {
        for (std::size_t b = 0; b < nb; ++b)
            if (traj.beam_labels[b] == label) return b;
        return std::nullopt;
    };
    const auto probe = column("probe");
    const auto refrigerator = column("refrigerator");
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const Vec3& x = traj.positions[k * n + i];
            const Vec3& v = traj.velocities[k * n + i];
            const auto* c = &traj.counts[(k * n + i) * nb];
            out += format_double(traj.times[k]);
            out += ',' + std::to_string(i);
            for (int a = 0; a < 3; ++a) out += ',' + format_double(units::m_to_um(x[a]));
            for (int a = 0; a < 3; ++a) out += ',' + format_double(v[a]);
            out += ',' + std::to_string(probe ? c[*probe] : 0);
            out += ',' + std::to_string(refrigerator ? c[*refrigerator] : 0);
            out += '\n';
        }
    }
    return out;
}

inline std::string spectrum_csv(const Spectrum& s) {
    std::string out = std::string(spectrum_header) + "\n";
    for (const auto& p : s.points) {
        out += format_double(units::angular_to_mhz(p.detuning)) + ',' + format_double(p.rate) + ',' +
               format_double(p.stderr_rate) + ',' + format_double(p.ejection_fraction) + '\n';
    }
    return out;
}

inline Spectrum parse_spectrum_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("spectrum CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != spectrum_header) throw ConfigError("spectrum CSV header mismatch: expected '" + std::string(spectrum_header) + "'");
    Spectrum s;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[4];
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (int k = 0; k < 4; ++k) {
            auto [q, ec] = std::from_chars(p, end, v[k]);
            if (ec != std::errc()) throw ConfigError("spectrum CSV row " + std::to_string(row) + ": bad number");
            p = q;
            if (k < 3) {
                if (p == end || *p != ',') throw ConfigError("spectrum CSV row " + std::to_string(row) + ": expected 4 columns");
                ++p;
            }
        }
        if (p != end) throw ConfigError("spectrum CSV row " + std::to_string(row) + ": trailing data");
        SpectrumPoint pt;
        pt.detuning = units::mhz_to_angular(v[0]);
        pt.rate = v[1];
        pt.stderr_rate = v[2];
        pt.ejection_fraction = v[3];
        s.points.push_back(pt);
    }
    return s;
}

inline Spectrum read_spectrum_csv(const std::filesystem::path& path) { return parse_spectrum_csv(read_file(path)); }

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json spectrum_json(const Spectrum& s) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : s.points) {
        pts.push_back({{"detuning_MHz", units::angular_to_mhz(p.detuning)},
                       {"rate_counts_per_s", p.rate},
                       {"stderr", p.stderr_rate},
                       {"ejection_fraction", p.ejection_fraction},
                       {"failure_fraction", p.failure_fraction},
                       {"probe_temperature_mK", units::k_to_mk(p.probe_temperature)}});
    }
    nlohmann::json j = {{"points", pts}};
    if (!s.failures.empty()) j["failures"] = s.failures;
    return j;
}

inline nlohmann::json fit_json(const FitResult& r) {
    using units::angular_to_mhz;
    nlohmann::json j;
    j["schema_version"] = "1";
    j["model"] = r.line ? "piecewise" : "voigt";
    j["voigt"] = {{"amplitude", r.params.amplitude},
                  {"center_MHz", angular_to_mhz(r.params.center)},
                  {"fwhm_lorentz_MHz", angular_to_mhz(r.params.fwhm_lorentz)},
                  {"fwhm_gauss_MHz", angular_to_mhz(r.params.fwhm_gauss)},
                  {"baseline", r.params.baseline}};
    if (r.line) {
        // per MHz so the line reads directly against the CSV abscissa
        j["line"] = {{"slope_per_MHz", r.line->slope * units::mhz_to_angular(1.0)}, {"intercept", r.line->intercept}};
    }
    if (r.split) j["split_MHz"] = angular_to_mhz(*r.split);
    j["residual_rms"] = r.residual_rms;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    nlohmann::json cov = nlohmann::json::array();
    for (Eigen::Index a = 0; a < r.covariance.rows(); ++a) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index b = 0; b < r.covariance.cols(); ++b) row.push_back(r.covariance(a, b));
        cov.push_back(row);
    }
    j["covariance_si"] = cov;
    j["objective_history"] = r.objective_history;
    return j;
}

inline nlohmann::json budget_json(const BudgetInput& in, const BudgetReport& r) {
    nlohmann::json j;
    j["schema_version"] = "1";
    j["input"] = {{"heating_rate", in.heating_rate},
                  {"isotope_shift_GHz", in.isotope_shift / two_pi / 1e9},
                  {"gamma_MHz", units::angular_to_mhz(in.gamma)},
                  {"refrigerator_saturation", in.refrigerator_saturation}};
    j["refrigerator_scatter_per_s"] = r.refrigerator_scatter;
    j["qubit_scatter_per_s"] = r.qubit_scatter;
    j["ac_stark_shift_hz"] = r.ac_stark_shift_hz;
    j["cooling_margin"] = r.cooling_margin;
    j["warnings"] = r.warnings;
    return j;
}

inline nlohmann::json modes_json(const std::vector<IonSpecies>& species, const std::vector<Vec3>& positions,
                                 const NormalModes& modes) {
    nlohmann::json j;
    j["schema_version"] = "1";
    nlohmann::json ions = nlohmann::json::array();
    for (std::size_t i = 0; i < species.size(); ++i) {
        ions.push_back({{"label", species[i].label},
                        {"position_um", {units::m_to_um(positions[i][0]), units::m_to_um(positions[i][1]),
                                         units::m_to_um(positions[i][2])}}});
    }
    j["ions"] = ions;
    if (positions.size() == 2) j["separation_um"] = units::m_to_um((positions[1] - positions[0]).norm());
    nlohmann::json ms = nlohmann::json::array();
    for (std::size_t k = 0; k < modes.frequencies.size(); ++k) {
        nlohmann::json p = nlohmann::json::array();
        for (Eigen::Index i = 0; i < modes.participation.rows(); ++i) p.push_back(modes.participation(i, static_cast<Eigen::Index>(k)));
        ms.push_back({{"frequency_MHz", units::angular_to_mhz(modes.frequencies[k])},
                      {"axis", axis_name(modes.axis[k])},
                      {"participation", p}});
    }
    j["modes"] = ms;
    return j;
}

}  // namespace symcool
