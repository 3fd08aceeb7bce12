#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "dmatch/simulator.hpp"
#include "dmatch/synthesis.hpp"

namespace dmatch {

// Parsed scenario file. TOML-style sections [chi], [model], [scenario],
// [plant] (optional) and [output]; unknown keys are rejected. Units are
// documented in the shipped example files.
struct ScenarioFile {
    ChiParams chi;
    ModelSpec model;

    struct ScenarioSection {
        double tau = 0.1;
        double step = 1e-4;
        double horizon = 1.5;
        double ybar1 = 0.5;
        double ybar2 = 0.5;
        double w1_step_frac = 0.1;
        double r_step_frac = 0.2;
        double lambda01 = kDefaultLambda01;
        double lambda11 = kDefaultLambda11;
        double y2_offset = 0.0; // initial angle offset from the equilibrium, rad
    };
    ScenarioSection scenario;
    bool has_scenario = false;

    std::optional<PlantConfig> plant;
    std::string csv_path; // [output] csv, may be empty

    SimScenario make_sim_scenario() const;
};

ScenarioFile parse_scenario_file(const std::filesystem::path& path);
ScenarioFile parse_scenario_text(const std::string& text);

} // namespace dmatch
