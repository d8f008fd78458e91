#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "symcool/scenario.hpp"

using namespace symcool;

namespace {

std::string preset(const std::string& name) { return std::string(SYMCOOL_SOURCE_DIR) + "/scenarios/" + name; }

const char* minimal = R"(
[crystal]
species = Cd112, Cd114

[trap]
rf_frequency_MHz = 38.8
rf_amplitude_V = 200
electrode_radius_um = 200
secular_x_MHz = 2.8

[beam.probe]
reference = Cd112
detuning_MHz = -23.5
saturation = 0.35

[simulation]
dt_ns = 1.5
duration_us = 100
burn_in_us = 50
)";

std::string with(const std::string& base, const std::string& from, const std::string& to) {
    std::string s = base;
    const auto p = s.find(from);
    EXPECT_NE(p, std::string::npos) << from;
    s.replace(p, from.size(), to);
    return s;
}

std::string message(const std::string& text) {
    try {
        parse_scenario_text(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Scenario, PresetsResolve) {
    for (const char* name : {"fig2a.scenario", "fig2b.scenario", "fig4.scenario", "budget-111-116.scenario"}) {
        EXPECT_NO_THROW(parse_scenario(preset(name))) << name;
    }
}

TEST(Scenario, Fig2aDefaults) {
    const Scenario sc = parse_scenario(preset("fig2a.scenario"));
    ASSERT_TRUE(sc.has_dynamics());
    ASSERT_EQ(sc.species.size(), 2u);
    EXPECT_EQ(sc.species[0].label, "Cd112");
    EXPECT_EQ(sc.species[1].label, "Cd114");
    EXPECT_EQ(sc.probe_ion, 0u);
    EXPECT_NEAR(sc.trap->rf_omega, units::mhz_to_angular(38.8), 1e-3);
    EXPECT_NEAR(units::angular_to_mhz(secular_frequencies(sc.species[0], *sc.trap)[0]), 2.8, 2.8e-3);
    EXPECT_NEAR(sc.beam("probe").saturation, 0.35, 1e-15);
    EXPECT_NEAR(sc.beam("refrigerator").saturation, 12.0, 1e-15);
    EXPECT_TRUE(sc.beam("refrigerator").enabled);
    ASSERT_TRUE(sc.scan.has_value());
    EXPECT_EQ(sc.scan->scenario, ScanScenario::two_ion_ref_on);
    EXPECT_GT(sc.scan->detuning_grid.size(), 10u);
}

TEST(Scenario, EmptyFileListsMissingSections) {
    const std::string m = message("");
    for (const char* s : {"trap", "crystal", "simulation", "beam."}) EXPECT_NE(m.find(s), std::string::npos) << m;
    EXPECT_THROW(parse_scenario_text(""), ConfigError);
}

TEST(Scenario, MissingFile) { EXPECT_THROW(parse_scenario("/nonexistent/x.scenario"), NotFoundError); }

TEST(Scenario, MinimalResolvesWithDefaults) {
    const Scenario sc = parse_scenario_text(minimal);
    EXPECT_EQ(sc.beam("probe").direction, Vec3(1, 1, 1).normalized());
    EXPECT_EQ(sc.simulation->mode, IntegrationMode::secular);
    EXPECT_NEAR(sc.simulation->dt, 1.5e-9, 1e-21);
}

TEST(Scenario, UnstableTrap) {
    // calibrated at 200 V, driven at 2000 V
    const auto cal = with(minimal, "secular_x_MHz = 2.8", "secular_x_MHz = 2.8\ncalibration_rf_amplitude_V = 200");
    EXPECT_THROW(parse_scenario_text(with(cal, "rf_amplitude_V = 200\n", "rf_amplitude_V = 2000\n")), StabilityError);
}

TEST(Scenario, StrictParsing) {
    EXPECT_NE(message(with(minimal, "[simulation]", "[simulation]\nbogus = 1")).find("unknown key 'bogus'"), std::string::npos);
    EXPECT_NE(message(with(minimal, "saturation = 0.35", "saturation = 0.35\nsaturation = 1")).find("duplicate key"),
              std::string::npos);
    EXPECT_NE(message(with(minimal, "[simulation]", "[beam.probe]\n[simulation]")).find("duplicate section"),
              std::string::npos);
    EXPECT_NE(message(with(minimal, "[simulation]", "[simlation]\n[simulation]")).find("unknown section"),
              std::string::npos);
    EXPECT_NE(message(with(minimal, "dt_ns = 1.5", "dt_ns = fast")).find("expected a number"), std::string::npos);
    EXPECT_NE(message(with(minimal, "dt_ns = 1.5", "dt_ns = 1.5 ns")).find("expected a number"), std::string::npos);
    EXPECT_THROW(parse_scenario_text(with(minimal, "Cd112, Cd114", "Cd112, Cd999")), NotFoundError);
    EXPECT_THROW(parse_scenario_text(with(minimal, "Cd112, Cd114", "Cd112, Cd114, Cd116")), ConfigError);
}

TEST(Scenario, LineNumbersInErrors) {
    const std::string m = message(with(minimal, "[simulation]", "[simulation]\nbogus = 1"));
    EXPECT_NE(m.find("line "), std::string::npos) << m;
}

TEST(Scenario, TimestepContractChecked) {
    EXPECT_THROW(parse_scenario_text(with(minimal, "dt_ns = 1.5", "dt_ns = 5")), ConfigError);
    EXPECT_THROW(parse_scenario_text(with(minimal, "dt_ns = 1.5", "dt_ns = 1.5\nmode = full_rf")), ConfigError);
}

TEST(Scenario, BudgetOnly) {
    const Scenario sc = parse_scenario(preset("budget-111-116.scenario"));
    EXPECT_FALSE(sc.has_dynamics());
    ASSERT_TRUE(sc.budget.has_value());
    EXPECT_NEAR(sc.budget->isotope_shift / (2.0 * M_PI), 5.2e9, 0.2e9);
    EXPECT_THROW(parse_scenario_text("[budget]\nisotope_shift_GHz = 5\nisotope_pair = Cd111, Cd116\n"), ConfigError);
}

TEST(Scenario, ResolvedJsonRoundTrip) {
    for (const char* name : {"fig2a.scenario", "fig2b.scenario", "fig4.scenario", "budget-111-116.scenario"}) {
        const Scenario a = parse_scenario(preset(name));
        const auto ja = resolved_json(a);
        EXPECT_EQ(ja.at("schema_version"), "1");
        const Scenario b = parse_scenario_text(ja.dump());
        EXPECT_EQ(ja.dump(), resolved_json(b).dump()) << name;
    }
}

TEST(Scenario, ResolvedJsonRejectsUnknownKeys) {
    auto j = resolved_json(parse_scenario_text(minimal));
    j["extra"] = 1;
    EXPECT_THROW(parse_scenario_text(j.dump()), ConfigError);
    j = resolved_json(parse_scenario_text(minimal));
    j["schema_version"] = "2";
    EXPECT_THROW(parse_scenario_text(j.dump()), ConfigError);
}
