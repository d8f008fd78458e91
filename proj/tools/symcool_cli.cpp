// symcool: command-line front end for scenario simulation, scans, fits and
// decoherence budgets.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "symcool/symcool.hpp"

namespace fs = std::filesystem;
using namespace symcool;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string prefix;
};

Scenario load(const Common& c) {
    Scenario sc = parse_scenario(c.config);
    if (c.seed) {
        if (!sc.simulation) throw ConfigError("--seed given but the scenario has no [simulation] section");
        sc.simulation->seed = *c.seed;
    }
    if (!c.out_dir.empty()) sc.output.directory = c.out_dir;
    if (!c.prefix.empty()) sc.output.prefix = c.prefix;
    return sc;
}

fs::path output_path(const Scenario& sc, const std::string& suffix) {
    return fs::path(sc.output_directory()) / (sc.output.prefix + suffix);
}

void need_dynamics(const Scenario& sc) {
    if (!sc.has_dynamics()) throw ConfigError("scenario needs [trap], [crystal] and [simulation] sections");
}

int cmd_validate(const Common& c) {
    const Scenario sc = load(c);
    std::cout << dump_json(resolved_json(sc));
    return 0;
}

int cmd_simulate(const Common& c) {
    const Scenario sc = load(c);
    need_dynamics(sc);
    const SimulationConfig& sim = *sc.simulation;
    RngStream init(derive_seed(sim.seed, 0x1d17));
    const IonCrystal crystal = thermal_crystal(sc.species, *sc.trap, sim.start_temperature, sim.mode, init);
    const Trajectory traj = run(crystal, *sc.trap, sc.beams, sim);

    nlohmann::json summary;
    summary["schema_version"] = schema_version;
    summary["config"] = resolved_json(sc);
    summary["final_time_s"] = traj.final_time;
    summary["ejected"] = traj.ejection.ejected;
    if (traj.ejection.ejected) {
        summary["ejection"] = {{"time_s", traj.ejection.time},
                               {"ion", traj.ejection.ion},
                               {"kinetic_energy_J", traj.ejection.kinetic_energy}};
    }
    nlohmann::json ions = nlohmann::json::array();
    const double t_end = traj.final_time;
    for (std::size_t i = 0; i < traj.ion_count(); ++i) {
        nlohmann::json ion;
        ion["label"] = traj.species[i].label;
        if (t_end > sim.burn_in) ion["temperature_mK"] = units::k_to_mk(temperature(traj, i));
        nlohmann::json counts;
        for (std::size_t b = 0; b < traj.beam_count(); ++b) {
            counts[traj.beam_labels[b]] = traj.count(traj.sample_count() - 1, i, b);
        }
        ion["total_counts"] = counts;
        ions.push_back(ion);
    }
    summary["ions"] = ions;

    atomic_write(output_path(sc, "_trajectory.csv"), trajectory_csv(traj));
    atomic_write(output_path(sc, "_summary.json"), dump_json(summary));
    std::cout << "wrote " << output_path(sc, "_trajectory.csv").string() << "\n";
    for (std::size_t i = 0; i < traj.ion_count(); ++i) {
        std::cout << "ion " << i << " (" << traj.species[i].label << ")";
        if (ions[i].contains("temperature_mK")) std::cout << ": T = " << ions[i]["temperature_mK"].get<double>() << " mK";
        std::cout << "\n";
    }
    if (traj.ejection.ejected) std::cout << "ion " << traj.ejection.ion << " ejected at " << traj.ejection.time << " s\n";
    return 0;
}

int cmd_scan(const Common& c, std::optional<std::size_t> ensemble, std::optional<std::size_t> threads) {
    Scenario sc = load(c);
    need_dynamics(sc);
    if (!sc.scan) throw ConfigError("scenario has no [scan] section");
    if (ensemble) sc.scan->ensemble = *ensemble;
    ScanConfig cfg = sc.scan_config();
    if (threads) cfg.threads = *threads;
    const Spectrum s = scan_probe(cfg, sc.species, *sc.trap, sc.beam("probe"), sc.beam("refrigerator"));

    nlohmann::json side = spectrum_json(s);
    side["schema_version"] = schema_version;
    side["config"] = resolved_json(sc);
    const double g = sc.species[sc.probe_ion].gamma;
    try {
        side["asymmetry_metric"] = asymmetry_metric(s, 0.0);
    } catch (const Error&) {
        side["asymmetry_metric"] = nullptr;
    }
    try {
        side["blue_to_red_ratio"] = blue_to_red_ratio(s, 0.0, 0.5 * g, 2.0 * g);
    } catch (const Error&) {
        side["blue_to_red_ratio"] = nullptr;
    }
    atomic_write(output_path(sc, "_spectrum.csv"), spectrum_csv(s));
    atomic_write(output_path(sc, "_spectrum.json"), dump_json(side));
    std::cout << "wrote " << output_path(sc, "_spectrum.csv").string() << " (" << s.points.size() << " points)\n";
    if (!side["asymmetry_metric"].is_null()) std::cout << "asymmetry_metric = " << side["asymmetry_metric"].get<double>() << "\n";
    if (!side["blue_to_red_ratio"].is_null()) std::cout << "blue_to_red_ratio = " << side["blue_to_red_ratio"].get<double>() << "\n";
    for (const auto& f : s.failures) std::cerr << "warning: " << f << "\n";
    return 0;
}

int cmd_modes(const Common& c) {
    const Scenario sc = load(c);
    if (!sc.trap || sc.species.empty()) throw ConfigError("scenario needs [trap] and [crystal] sections");
    const SecularSpectrum sec = secular_spectrum(*sc.trap, sc.species);
    const Equilibrium eq = equilibrium_positions(sc.species, *sc.trap, sec);
    const NormalModes modes = normal_modes(sc.species, eq.positions, sec);
    const nlohmann::json j = modes_json(sc.species, eq.positions, modes);
    atomic_write(output_path(sc, "_modes.json"), dump_json(j));
    if (eq.positions.size() == 2) std::printf("separation_um %.6f\n", j["separation_um"].get<double>());
    for (const auto& m : j["modes"]) {
        std::printf("mode %-2s %.6f MHz\n", m["axis"].get<std::string>().c_str(), m["frequency_MHz"].get<double>());
    }
    return 0;
}

int cmd_fit(const std::string& input, const std::string& model, std::optional<double> split_mhz,
            const std::string& output) {
    const Spectrum s = read_spectrum_csv(input);
    FitResult r;
    if (model == "voigt") {
        r = fit_voigt(s);
    } else {
        if (!split_mhz) throw ArgumentError("piecewise fit needs --split-mhz");
        r = fit_piecewise(s, units::mhz_to_angular(*split_mhz));
    }
    const std::string text = dump_json(fit_json(r));
    if (output.empty()) {
        std::cout << text;
    } else {
        atomic_write(output, text);
        std::cout << "wrote " << output << "\n";
    }
    return r.converged ? 0 : 1;
}

struct BudgetFlags {
    std::string config;
    std::optional<double> ndot, delta_ghz, delta_mhz, gamma_mhz, saturation;
    std::string sweep;
    std::vector<double> grid;
    bool json = false;
    std::string output;
};

void print_budget_row(const BudgetReport& r) {
    std::printf("refrigerator_scatter  %.6g /s\n", r.refrigerator_scatter);
    std::printf("qubit_scatter         %.6g /s\n", r.qubit_scatter);
    std::printf("ac_stark_shift        %.6g Hz\n", r.ac_stark_shift_hz);
    std::printf("cooling_margin        %.6g\n", r.cooling_margin);
    for (const auto& w : r.warnings) std::printf("warning: %s\n", w.c_str());
}

int cmd_budget(const BudgetFlags& f) {
    BudgetInput in;
    if (!f.config.empty()) {
        const Scenario sc = parse_scenario(f.config);
        if (!sc.budget) throw ConfigError("scenario has no [budget] section");
        in = *sc.budget;
    }
    if (f.delta_ghz && f.delta_mhz) throw ArgumentError("give only one of --delta-ghz and --delta-mhz");
    if (f.ndot) in.heating_rate = *f.ndot;
    if (f.delta_ghz) in.isotope_shift = units::ghz_to_angular(*f.delta_ghz);
    if (f.delta_mhz) in.isotope_shift = units::mhz_to_angular(*f.delta_mhz);
    if (f.gamma_mhz) in.gamma = units::mhz_to_angular(*f.gamma_mhz);
    if (f.saturation) in.refrigerator_saturation = *f.saturation;

    nlohmann::json j;
    if (f.sweep.empty()) {
        const BudgetReport r = compute_budget(in);
        j = budget_json(in, r);
        if (!f.json) print_budget_row(r);
    } else {
        // grid values are in the same external units as the matching flag
        std::vector<double> grid = f.grid;
        for (double& v : grid) {
            if (f.sweep == "isotope_shift") v = units::ghz_to_angular(v);
            if (f.sweep == "gamma") v = units::mhz_to_angular(v);
        }
        const auto reports = sweep_budget(in, f.sweep, grid);
        j["schema_version"] = schema_version;
        j["sweep"] = f.sweep;
        j["rows"] = nlohmann::json::array();
        for (std::size_t k = 0; k < reports.size(); ++k) {
            BudgetInput row = in;
            budget_field(row, f.sweep) = grid[k];
            j["rows"].push_back(budget_json(row, reports[k]));
            if (!f.json) {
                std::printf("%s = %g\n", f.sweep.c_str(), f.grid[k]);
                print_budget_row(reports[k]);
            }
        }
    }
    if (f.json) std::cout << dump_json(j);
    if (!f.output.empty()) atomic_write(f.output, dump_json(j));
    return 0;
}

void add_common(CLI::App* app, Common& c, bool seed) {
    app->add_option("-c,--config", c.config, "scenario file (.scenario or resolved .json)")->required()->check(CLI::ExistingFile);
    if (seed) app->add_option("--seed", c.seed, "override the master seed");
    app->add_option("-o,--out", c.out_dir, "output directory (default: [output] directory, $SYMCOOL_OUTPUT_DIR, .)");
    app->add_option("--prefix", c.prefix, "output file prefix");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sympathetic-cooling simulator for two-ion Cd+ crystals"};
    app.require_subcommand(1);

    Common sim_c, scan_c, modes_c, val_c;
    auto* simulate = app.add_subcommand("simulate", "run one trajectory and write CSV + summary JSON");
    add_common(simulate, sim_c, true);

    std::optional<std::size_t> ensemble, threads;
    auto* scan = app.add_subcommand("scan", "scan the probe detuning and write a spectrum");
    add_common(scan, scan_c, true);
    scan->add_option("--ensemble", ensemble, "seeds per point");
    scan->add_option("--threads", threads, "worker threads");

    auto* modes = app.add_subcommand("modes", "equilibrium positions and normal modes");
    add_common(modes, modes_c, false);

    std::string fit_in, fit_model = "voigt", fit_out;
    std::optional<double> split;
    auto* fit = app.add_subcommand("fit", "fit a spectrum CSV");
    fit->add_option("-i,--input", fit_in, "spectrum CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--model", fit_model, "voigt | piecewise")->check(CLI::IsMember({"voigt", "piecewise"}));
    fit->add_option("--split-mhz", split, "split detuning for the piecewise model");
    fit->add_option("-o,--output", fit_out, "write the JSON result here instead of stdout");

    BudgetFlags bf;
    auto* budget = app.add_subcommand("budget", "decoherence budget of a sympathetically cooled qubit");
    budget->add_option("-c,--config", bf.config, "scenario with a [budget] section")->check(CLI::ExistingFile);
    budget->add_option("--ndot", bf.ndot, "heating rate, quanta/s");
    budget->add_option("--delta-ghz", bf.delta_ghz, "isotope shift, GHz");
    budget->add_option("--delta-mhz", bf.delta_mhz, "isotope shift, MHz");
    budget->add_option("--gamma-mhz", bf.gamma_mhz, "natural linewidth, MHz");
    budget->add_option("-s,--saturation", bf.saturation, "refrigerator saturation parameter");
    budget->add_option("--sweep", bf.sweep, "parameter to sweep (heating_rate, isotope_shift [GHz], gamma [MHz], refrigerator_saturation)");
    budget->add_option("--grid", bf.grid, "sweep values")->delimiter(',');
    budget->add_flag("--json", bf.json, "print JSON instead of a table");
    budget->add_option("-o,--output", bf.output, "also write JSON here");

    auto* validate = app.add_subcommand("validate", "parse a scenario and print the resolved JSON");
    add_common(validate, val_c, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*simulate) return cmd_simulate(sim_c);
        if (*scan) return cmd_scan(scan_c, ensemble, threads);
        if (*modes) return cmd_modes(modes_c);
        if (*fit) return cmd_fit(fit_in, fit_model, split, fit_out);
        if (*budget) return cmd_budget(bf);
        if (*validate) return cmd_validate(val_c);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
