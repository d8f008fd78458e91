#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "symcool/budget.hpp"
#include "symcool/dynamics.hpp"
#include "symcool/error.hpp"
#include "symcool/units.hpp"
#include "symcool/spectrum.hpp"

namespace symcool {

// ---------------------------------------------------------------------------
// Plain-text scenario files:
//
//   # comment
//   [trap]
//   rf_frequency_MHz = 38.8
//   [beam.probe]
//   detuning_MHz = 0
//
// Numbers are in the units named by the key suffix. A resolved scenario is
// echoed as JSON (SI units, schema_version "1"), which parse_scenario also
// accepts.

struct IniEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

struct IniSection {
    std::string name;
    int line = 0;
    std::map<std::string, IniEntry> entries;
};

struct IniDocument {
    std::vector<IniSection> sections;

    IniSection* find(const std::string& name) {
        for (auto& s : sections)
            if (s.name == name) return &s;
        return nullptr;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string strip_comment(const std::string& s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((s[i] == '#' || s[i] == ';') && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) return s.substr(0, i);
    }
    return s;
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) out.push_back(trim(cur));
    return out;
}

}  // namespace detail

inline IniDocument parse_ini(std::istream& in) {
    IniDocument doc;
    std::string raw;
    int line = 0;
    IniSection* current = nullptr;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = detail::trim(detail::strip_comment(raw));
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']') throw ConfigError("line " + std::to_string(line) + ": malformed section header");
            const std::string name = detail::trim(text.substr(1, text.size() - 2));
            if (name.empty()) throw ConfigError("line " + std::to_string(line) + ": empty section name");
            if (doc.find(name)) throw ConfigError("line " + std::to_string(line) + ": duplicate section [" + name + "]");
            doc.sections.push_back(IniSection{name, line, {}});
            current = &doc.sections.back();
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line) + ": expected key = value");
        if (!current) throw ConfigError("line " + std::to_string(line) + ": key outside of any section");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line) + ": empty key");
        if (current->entries.count(key)) {
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "' in [" + current->name + "]");
        }
        current->entries[key] = IniEntry{value, line, false};
    }
    return doc;
}

struct ScanSettings {
    ScanScenario scenario = ScanScenario::two_ion_ref_on;
    std::vector<double> detuning_grid;  // rad/s relative to the probe resonance
    std::size_t ensemble = 5;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct OutputSettings {
    std::string directory;  // empty: SYMCOOL_OUTPUT_DIR or "."
    std::string prefix = "symcool";
};

struct Scenario {
    std::string name;
    std::optional<TrapConfig> trap;
    std::vector<IonSpecies> species;
    std::size_t probe_ion = 0;
    std::vector<LaserBeam> beams;
    std::optional<SimulationConfig> simulation;
    std::optional<ScanSettings> scan;
    std::optional<BudgetInput> budget;
    OutputSettings output;

    bool has_dynamics() const { return trap.has_value() && simulation.has_value() && !species.empty(); }

    const LaserBeam& beam(const std::string& label) const {
        for (const auto& b : beams)
            if (b.label == label) return b;
        throw NotFoundError("scenario has no beam '" + label + "'");
    }

    ScanConfig scan_config() const {
        if (!scan || !simulation) throw ConfigError("scenario has no [scan] section");
        ScanConfig c;
        c.detuning_grid = scan->detuning_grid;
        c.per_point = *simulation;
        c.scenario = scan->scenario;
        c.ensemble = scan->ensemble;
        c.probe_ion = probe_ion;
        c.threads = scan->threads == 0 ? default_thread_count() : scan->threads;
        return c;
    }

    std::string output_directory() const {
        if (!output.directory.empty()) return output.directory;
        if (const char* env = std::getenv("SYMCOOL_OUTPUT_DIR"); env && *env) return env;
        return ".";
    }
};

namespace detail {

class SectionReader {
public:
    explicit SectionReader(IniSection& s) : s_(s) {}

    bool has(const std::string& key) const { return s_.entries.count(key) != 0; }

    std::string where(const std::string& key) const {
        auto it = s_.entries.find(key);
        const int line = it == s_.entries.end() ? s_.line : it->second.line;
        return "line " + std::to_string(line) + ": [" + s_.name + "] " + key;
    }

    std::optional<std::string> text(const std::string& key) {
        auto it = s_.entries.find(key);
        if (it == s_.entries.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    double number(const std::string& key, double fallback) {
        auto v = text(key);
        return v ? parse_number(key, *v) : fallback;
    }

    double required(const std::string& key) {
        auto v = text(key);
        if (!v) throw ConfigError("[" + s_.name + "] missing required key '" + key + "'");
        return parse_number(key, *v);
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback) {
        auto v = text(key);
        if (!v) return fallback;
        std::uint64_t out = 0;
        const auto* end = v->data() + v->size();
        auto [p, ec] = std::from_chars(v->data(), end, out);
        if (ec != std::errc() || p != end) throw ConfigError(where(key) + ": expected a non-negative integer, got '" + *v + "'");
        return out;
    }

    bool boolean(const std::string& key, bool fallback) {
        auto v = text(key);
        if (!v) return fallback;
        if (*v == "true" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "0") return false;
        throw ConfigError(where(key) + ": expected true/false, got '" + *v + "'");
    }

    std::vector<double> numbers(const std::string& key) {
        std::vector<double> out;
        auto v = text(key);
        if (!v) return out;
        for (const auto& item : split_list(*v)) out.push_back(parse_number(key, item));
        return out;
    }

    std::optional<Vec3> vec3(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const auto v = numbers(key);
        if (v.size() != 3) throw ConfigError(where(key) + ": expected 3 comma-separated numbers");
        return Vec3(v[0], v[1], v[2]);
    }

    void reject_unknown() const {
        for (const auto& [key, e] : s_.entries) {
            if (!e.used) throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + key + "' in [" + s_.name + "]");
        }
    }

private:
    double parse_number(const std::string& key, const std::string& v) const {
        double out = 0.0;
        const auto* end = v.data() + v.size();
        auto [p, ec] = std::from_chars(v.data(), end, out);
        if (ec != std::errc() || p != end || !std::isfinite(out)) {
            throw ConfigError(where(key) + ": expected a number, got '" + v + "'");
        }
        return out;
    }

    IniSection& s_;
};

inline IntegrationMode parse_mode(const std::string& s) {
    if (s == "secular") return IntegrationMode::secular;
    if (s == "full_rf") return IntegrationMode::full_rf;
    throw ConfigError("unknown integration mode '" + s + "' (secular | full_rf)");
}

inline ForceModel parse_force_model(const std::string& s) {
    if (s == "stochastic") return ForceModel::stochastic;
    if (s == "deterministic") return ForceModel::deterministic;
    throw ConfigError("unknown force model '" + s + "' (stochastic | deterministic)");
}

inline ScanScenario parse_scan_scenario(const std::string& s) {
    for (auto sc : {ScanScenario::two_ion_ref_on, ScanScenario::two_ion_ref_off, ScanScenario::single_ion_both_beams}) {
        if (s == to_string(sc)) return sc;
    }
    throw ConfigError("unknown scan scenario '" + s + "'");
}

inline IonSpecies resolve_species(const std::string& label, const std::vector<std::string>& all) {
    for (const auto& other : all) {
        if (other != label) return species_catalog(label, other);
    }
    return species_catalog(label);
}

// Stability of every species and the module-level invariants of a resolved
// scenario.
inline void validate_scenario(const Scenario& sc) {
    if (sc.trap) {
        if (!(sc.trap->rf_omega > 0.0) || !(sc.trap->electrode_radius > 0.0) || !(sc.trap->rf_amplitude > 0.0)) {
            throw ConfigError("trap: rf frequency, amplitude and electrode radius must be > 0");
        }
        for (const auto& s : sc.species) {
            for (Axis a : {Axis::x, Axis::y, Axis::z}) {
                const double q = mathieu_q(s, *sc.trap, a);
                const double am = mathieu_a(s, *sc.trap, a);
                if (!is_stable(am, q)) {
                    throw StabilityError("trap is not Mathieu-stable for " + s.label + " along axis " +
                                         std::to_string(index(a)) + " (a = " + std::to_string(am) +
                                         ", q = " + std::to_string(q) + ")");
                }
            }
        }
    }
    if (!sc.species.empty()) {
        if (sc.species.size() > 2) throw ConfigError("crystal: at most 2 ions are supported");
        if (sc.probe_ion >= sc.species.size()) throw ConfigError("crystal: probe_ion out of range");
        for (const auto& s : sc.species)
            if (!s.valid()) throw ConfigError("crystal: invalid species " + s.label);
    }
    std::set<std::string> labels;
    for (const auto& b : sc.beams) {
        b.validate();
        if (!labels.insert(b.label).second) throw ConfigError("duplicate beam '" + b.label + "'");
    }
    if (sc.has_dynamics()) {
        const SecularSpectrum sec = secular_spectrum(*sc.trap, sc.species);
        double wmax = 0.0;
        for (const auto& [label, w] : sec.omega_secular) wmax = std::max(wmax, w.maxCoeff());
        sc.simulation->validate(*sc.trap, wmax);
    }
    if (sc.scan) {
        if (!sc.has_dynamics()) throw ConfigError("[scan] needs trap, crystal and simulation sections");
        const ScanConfig c = sc.scan_config();
        c.validate();
        sc.beam("probe");
        validate_scenario(c.scenario, sc.species.size(), sc.beam("refrigerator"));
    }
    if (sc.budget) sc.budget->validate();
}

inline Scenario parse_ini_scenario(IniDocument& doc) {
    const bool dynamics = doc.find("trap") || doc.find("crystal") || doc.find("simulation");
    if (!doc.find("budget") || dynamics) {
        std::vector<std::string> missing;
        for (const char* name : {"trap", "crystal", "simulation"})
            if (!doc.find(name)) missing.push_back(name);
        bool any_beam = false;
        for (const auto& s : doc.sections)
            if (s.name.rfind("beam.", 0) == 0) any_beam = true;
        if (!any_beam) missing.push_back("beam.<label>");
        if (!missing.empty()) {
            std::string list;
            for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
            throw ConfigError("missing required sections: " + list + " (or a lone [budget] section)");
        }
    }

    Scenario sc;
    std::set<std::string> known{"scenario", "trap", "crystal", "simulation", "scan", "budget", "output"};
    for (const auto& s : doc.sections) {
        if (!known.count(s.name) && s.name.rfind("beam.", 0) != 0) {
            throw ConfigError("line " + std::to_string(s.line) + ": unknown section [" + s.name + "]");
        }
    }

    if (auto* s = doc.find("scenario")) {
        SectionReader r(*s);
        sc.name = r.text("name").value_or("");
        r.reject_unknown();
    }

    std::vector<std::string> labels;
    double start_temperature = SimulationConfig{}.start_temperature;
    if (auto* s = doc.find("crystal")) {
        SectionReader r(*s);
        auto list = r.text("species");
        if (!list) throw ConfigError("[crystal] missing required key 'species'");
        labels = split_list(*list);
        for (const auto& l : labels) sc.species.push_back(resolve_species(l, labels));
        sc.probe_ion = r.integer("probe_ion", 0);
        start_temperature = units::mk_to_k(r.number("start_temperature_mK", units::k_to_mk(start_temperature)));
        r.reject_unknown();
    }

    if (auto* s = doc.find("trap")) {
        SectionReader r(*s);
        const double rf_omega = units::mhz_to_angular(r.number("rf_frequency_MHz", 38.8));
        const double amplitude = r.number("rf_amplitude_V", 200.0);
        const double radius = units::um_to_m(r.number("electrode_radius_um", 200.0));
        TrapConfig t;
        if (r.has("geometric_factor")) {
            if (r.has("secular_x_MHz")) throw ConfigError(r.where("geometric_factor") + ": give either geometric_factor or secular_x_MHz");
            t.rf_omega = rf_omega;
            t.rf_amplitude = amplitude;
            t.electrode_radius = radius;
            t.geometric_factor = *r.vec3("geometric_factor");
        } else {
            const std::string cal = r.text("calibration_species").value_or(labels.empty() ? "Cd112" : labels[0]);
            const double wx = units::mhz_to_angular(r.number("secular_x_MHz", 2.8));
            const double ratio_y = r.number("radial_ratio_y", 1.4);
            const double ratio_z = r.number("radial_ratio_z", 1.5);
            if (!(wx > 0.0) || !(ratio_y > 0.0) || !(ratio_z > 0.0)) {
                throw ConfigError("[trap] secular_x_MHz and radial ratios must be > 0");
            }
            // kappa is a property of the electrodes: fit it at the calibration
            // amplitude, then drive the trap at the requested one
            const double cal_amplitude = r.number("calibration_rf_amplitude_V", 200.0);
            if (!(cal_amplitude > 0.0)) throw ConfigError("[trap] calibration_rf_amplitude_V must be > 0");
            t = TrapConfig::calibrated(resolve_species(cal, labels), wx, ratio_y, ratio_z, rf_omega, cal_amplitude, radius);
            t.rf_amplitude = amplitude;
        }
        if (auto a = r.vec3("static_a")) t.static_a = *a;
        if (auto n = r.vec3("rf_null_um")) t.rf_null = *n * 1e-6;
        const bool compensate = r.boolean("compensate", true);
        if (auto f = r.vec3("static_field_V_per_m")) {
            if (compensate) throw ConfigError(r.where("static_field_V_per_m") + ": set compensate = false to give an explicit field");
            t.static_field = *f;
        }
        sc.trap = t;
        r.reject_unknown();
        if (compensate && !sc.species.empty()) {
            Scenario probe_check = sc;
            probe_check.beams.clear();
            validate_scenario(probe_check);
            sc.trap = compensated_trap(t, sc.species, sc.probe_ion);
        }
    }

    for (auto& s : doc.sections) {
        if (s.name.rfind("beam.", 0) != 0) continue;
        SectionReader r(s);
        LaserBeam b;
        b.label = s.name.substr(5);
        if (b.label.empty()) throw ConfigError("line " + std::to_string(s.line) + ": beam section needs a label");
        const std::string ref = r.text("reference").value_or(labels.empty() ? "Cd114" : labels[0]);
        b.detuning = resolve_species(ref, labels).transition_offset + units::mhz_to_angular(r.number("detuning_MHz", 0.0));
        b.saturation = r.number("saturation", b.label == "refrigerator" ? 12.0 : 0.35);
        if (auto d = r.vec3("direction")) {
            if (!(d->norm() > 0.0)) throw ConfigError(r.where("direction") + ": zero vector");
            b.direction = d->normalized();
        }
        b.enabled = r.boolean("enabled", true);
        r.reject_unknown();
        sc.beams.push_back(b);
    }

    if (auto* s = doc.find("simulation")) {
        SectionReader r(*s);
        SimulationConfig sim;
        if (auto m = r.text("mode")) sim.mode = parse_mode(*m);
        if (auto f = r.text("force_model")) sim.force_model = parse_force_model(*f);
        sim.dt = units::ns_to_s(r.number("dt_ns", sim.mode == IntegrationMode::full_rf ? 0.5 : 1.5));
        sim.duration = units::us_to_s(r.number("duration_us", units::s_to_us(sim.duration)));
        sim.burn_in = units::us_to_s(r.number("burn_in_us", units::s_to_us(sim.burn_in)));
        sim.seed = r.integer("seed", sim.seed);
        sim.record_stride = r.integer("record_stride", sim.record_stride);
        sim.detection_efficiency = r.number("detection_efficiency", sim.detection_efficiency);
        sim.ejection_radius = units::um_to_m(r.number("ejection_radius_um", units::m_to_um(sim.ejection_radius)));
        sim.start_temperature = start_temperature;
        r.reject_unknown();
        sc.simulation = sim;
    }

    if (auto* s = doc.find("scan")) {
        SectionReader r(*s);
        ScanSettings scan;
        if (auto v = r.text("scenario")) scan.scenario = parse_scan_scenario(*v);
        if (r.has("grid_MHz")) {
            if (r.has("start_MHz") || r.has("stop_MHz") || r.has("step_MHz")) {
                throw ConfigError(r.where("grid_MHz") + ": give either grid_MHz or start/stop/step");
            }
            for (double d : r.numbers("grid_MHz")) scan.detuning_grid.push_back(units::mhz_to_angular(d));
        } else {
            const double a = r.number("start_MHz", -150.0), b = r.number("stop_MHz", 100.0), st = r.number("step_MHz", 5.0);
            for (double d : linear_grid(a, b, st)) scan.detuning_grid.push_back(units::mhz_to_angular(d));
        }
        scan.ensemble = r.integer("ensemble", scan.ensemble);
        scan.threads = r.integer("threads", scan.threads);
        r.reject_unknown();
        sc.scan = scan;
    }

    if (auto* s = doc.find("budget")) {
        SectionReader r(*s);
        BudgetInput in;
        in.heating_rate = r.number("heating_rate", in.heating_rate);
        const int given = int(r.has("isotope_shift_GHz")) + int(r.has("isotope_shift_MHz")) + int(r.has("isotope_pair"));
        if (given > 1) throw ConfigError("[budget] give only one of isotope_shift_GHz, isotope_shift_MHz, isotope_pair");
        if (r.has("isotope_shift_GHz")) in.isotope_shift = units::ghz_to_angular(r.required("isotope_shift_GHz"));
        if (r.has("isotope_shift_MHz")) in.isotope_shift = units::mhz_to_angular(r.required("isotope_shift_MHz"));
        if (auto pair = r.text("isotope_pair")) {
            const auto p = split_list(*pair);
            if (p.size() != 2) throw ConfigError(r.where("isotope_pair") + ": expected two isotope labels");
            in.isotope_shift = std::abs(species_catalog(p[0], p[1]).transition_offset -
                                        species_catalog(p[1], p[0]).transition_offset);
        }
        in.gamma = units::mhz_to_angular(r.number("gamma_MHz", units::angular_to_mhz(in.gamma)));
        in.refrigerator_saturation = r.number("refrigerator_saturation", in.refrigerator_saturation);
        r.reject_unknown();
        sc.budget = in;
    }

    if (auto* s = doc.find("output")) {
        SectionReader r(*s);
        sc.output.directory = r.text("directory").value_or("");
        sc.output.prefix = r.text("prefix").value_or(sc.output.prefix);
        r.reject_unknown();
    }
    return sc;
}

// --- JSON form --------------------------------------------------------------

inline nlohmann::json to_json(const Vec3& v) { return nlohmann::json::array({v[0], v[1], v[2]}); }

inline const nlohmann::json& member(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw ConfigError("resolved config: missing key '" + key + "'");
    return j.at(key);
}

inline Vec3 vec3_from(const nlohmann::json& j, const std::string& key) {
    const auto& a = member(j, key);
    if (!a.is_array() || a.size() != 3) throw ConfigError("resolved config: '" + key + "' must be a 3-array");
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
}

inline void only_keys(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw ConfigError("resolved config: '" + where + "' must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("resolved config: unknown key '" + it.key() + "' in '" + where + "'");
    }
}

}  // namespace detail

inline constexpr const char* schema_version = "1";

inline nlohmann::json resolved_json(const Scenario& sc) {
    using nlohmann::json;
    json j;
    j["schema_version"] = schema_version;
    j["units"] = "SI: rad/s, m, s, K, V, V/m, counts/s";
    j["name"] = sc.name;
    if (sc.trap) {
        const auto& t = *sc.trap;
        j["trap"] = {{"rf_omega", t.rf_omega},
                     {"rf_amplitude", t.rf_amplitude},
                     {"electrode_radius", t.electrode_radius},
                     {"geometric_factor", detail::to_json(t.geometric_factor)},
                     {"static_a", detail::to_json(t.static_a)},
                     {"rf_null", detail::to_json(t.rf_null)},
                     {"static_field", detail::to_json(t.static_field)}};
    }
    json species = json::array();
    for (const auto& s : sc.species) {
        species.push_back({{"label", s.label},
                           {"mass", s.mass},
                           {"transition_offset", s.transition_offset},
                           {"gamma", s.gamma},
                           {"i_sat", s.i_sat},
                           {"wavelength", s.wavelength}});
    }
    j["species"] = species;
    j["probe_ion"] = sc.probe_ion;
    json beams = json::array();
    for (const auto& b : sc.beams) {
        beams.push_back({{"label", b.label},
                         {"detuning", b.detuning},
                         {"saturation", b.saturation},
                         {"direction", detail::to_json(b.direction)},
                         {"enabled", b.enabled}});
    }
    j["beams"] = beams;
    if (sc.simulation) {
        const auto& s = *sc.simulation;
        j["simulation"] = {{"mode", to_string(s.mode)},
                           {"force_model", to_string(s.force_model)},
                           {"dt", s.dt},
                           {"duration", s.duration},
                           {"burn_in", s.burn_in},
                           {"seed", s.seed},
                           {"record_stride", s.record_stride},
                           {"start_temperature", s.start_temperature},
                           {"detection_efficiency", s.detection_efficiency},
                           {"ejection_radius", s.ejection_radius}};
    }
    if (sc.scan) {
        j["scan"] = {{"scenario", to_string(sc.scan->scenario)},
                     {"detuning_grid", sc.scan->detuning_grid},
                     {"ensemble", sc.scan->ensemble},
                     {"threads", sc.scan->threads}};
    }
    if (sc.budget) {
        const auto& b = *sc.budget;
        j["budget"] = {{"heating_rate", b.heating_rate},
                       {"isotope_shift", b.isotope_shift},
                       {"gamma", b.gamma},
                       {"refrigerator_saturation", b.refrigerator_saturation}};
    }
    j["output"] = {{"directory", sc.output.directory}, {"prefix", sc.output.prefix}};
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::member;
    detail::only_keys(j, {"schema_version", "units", "name", "trap", "species", "probe_ion", "beams", "simulation", "scan", "budget", "output"}, "top level");
    if (!j.contains("schema_version") || j.at("schema_version") != schema_version) {
        throw ConfigError(std::string("resolved config: schema_version must be \"") + schema_version + "\"");
    }
    Scenario sc;
    sc.name = j.value("name", "");
    if (j.contains("trap")) {
        const auto& t = j.at("trap");
        detail::only_keys(t, {"rf_omega", "rf_amplitude", "electrode_radius", "geometric_factor", "static_a", "rf_null", "static_field"}, "trap");
        TrapConfig tc;
        tc.rf_omega = member(t, "rf_omega").get<double>();
        tc.rf_amplitude = member(t, "rf_amplitude").get<double>();
        tc.electrode_radius = member(t, "electrode_radius").get<double>();
        tc.geometric_factor = detail::vec3_from(t, "geometric_factor");
        tc.static_a = detail::vec3_from(t, "static_a");
        tc.rf_null = detail::vec3_from(t, "rf_null");
        tc.static_field = detail::vec3_from(t, "static_field");
        sc.trap = tc;
    }
    if (j.contains("species")) {
        for (const auto& s : j.at("species")) {
            detail::only_keys(s, {"label", "mass", "transition_offset", "gamma", "i_sat", "wavelength"}, "species");
            IonSpecies sp;
            sp.label = member(s, "label").get<std::string>();
            sp.mass = member(s, "mass").get<double>();
            sp.transition_offset = member(s, "transition_offset").get<double>();
            sp.gamma = member(s, "gamma").get<double>();
            sp.i_sat = member(s, "i_sat").get<double>();
            sp.wavelength = member(s, "wavelength").get<double>();
            sc.species.push_back(sp);
        }
    }
    sc.probe_ion = j.value("probe_ion", std::size_t{0});
    if (j.contains("beams")) {
        for (const auto& b : j.at("beams")) {
            detail::only_keys(b, {"label", "detuning", "saturation", "direction", "enabled"}, "beams");
            LaserBeam lb;
            lb.label = member(b, "label").get<std::string>();
            lb.detuning = member(b, "detuning").get<double>();
            lb.saturation = member(b, "saturation").get<double>();
            lb.direction = detail::vec3_from(b, "direction");
            lb.enabled = member(b, "enabled").get<bool>();
            sc.beams.push_back(lb);
        }
    }
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        detail::only_keys(s, {"mode", "force_model", "dt", "duration", "burn_in", "seed", "record_stride", "start_temperature", "detection_efficiency", "ejection_radius"}, "simulation");
        SimulationConfig sim;
        sim.mode = detail::parse_mode(member(s, "mode").get<std::string>());
        sim.force_model = detail::parse_force_model(member(s, "force_model").get<std::string>());
        sim.dt = member(s, "dt").get<double>();
        sim.duration = member(s, "duration").get<double>();
        sim.burn_in = member(s, "burn_in").get<double>();
        sim.seed = member(s, "seed").get<std::uint64_t>();
        sim.record_stride = member(s, "record_stride").get<std::size_t>();
        sim.start_temperature = member(s, "start_temperature").get<double>();
        sim.detection_efficiency = member(s, "detection_efficiency").get<double>();
        sim.ejection_radius = member(s, "ejection_radius").get<double>();
        sc.simulation = sim;
    }
    if (j.contains("scan")) {
        const auto& s = j.at("scan");
        detail::only_keys(s, {"scenario", "detuning_grid", "ensemble", "threads"}, "scan");
        ScanSettings scan;
        scan.scenario = detail::parse_scan_scenario(member(s, "scenario").get<std::string>());
        scan.detuning_grid = member(s, "detuning_grid").get<std::vector<double>>();
        scan.ensemble = member(s, "ensemble").get<std::size_t>();
        scan.threads = member(s, "threads").get<std::size_t>();
        sc.scan = scan;
    }
    if (j.contains("budget")) {
        const auto& b = j.at("budget");
        detail::only_keys(b, {"heating_rate", "isotope_shift", "gamma", "refrigerator_saturation"}, "budget");
        BudgetInput in;
        in.heating_rate = member(b, "heating_rate").get<double>();
        in.isotope_shift = member(b, "isotope_shift").get<double>();
        in.gamma = member(b, "gamma").get<double>();
        in.refrigerator_saturation = member(b, "refrigerator_saturation").get<double>();
        sc.budget = in;
    }
    if (j.contains("output")) {
        const auto& o = j.at("output");
        detail::only_keys(o, {"directory", "prefix"}, "output");
        sc.output.directory = o.value("directory", "");
        sc.output.prefix = o.value("prefix", sc.output.prefix);
    }
    return sc;
}

inline Scenario parse_scenario_text(const std::string& text) {
    Scenario sc;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("resolved config: ") + e.what());
        }
        try {
            sc = scenario_from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("resolved config: ") + e.what());
        }
    } else {
        std::istringstream in(text);
        IniDocument doc = parse_ini(in);
        sc = detail::parse_ini_scenario(doc);
    }
    detail::validate_scenario(sc);
    return sc;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NotFoundError("cannot open scenario file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str());
}

}  // namespace symcool
