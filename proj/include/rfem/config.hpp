#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfem/problem.hpp"
#include "rfem/sampling.hpp"
#include "rfem/solver.hpp"
#include "rfem/training.hpp"

namespace rfem {

struct LandscapeConfig {
    double alpha = 50.0;
    double s = 0.5;
    int N = 10;
    int node = 5;
    int points = 200;
    double half_width = 0.1;
    std::vector<int> orders{2};

    bool operator==(const LandscapeConfig&) const = default;
};

/// Everything one CLI invocation needs. Serialised as a single JSON object.
struct RunConfig {
    std::string command;
    ProblemSpec problem = make_problem(Family::Arctan1D, 32);
    SolveMethod solver = SolveMethod::Auto;

    // non-parametric / convergence
    std::vector<int> N_list{32, 64, 128, 256};
    int iterations = 1000;
    int log_every = 1;
    OptimizerKind optimizer = OptimizerKind::Adam;
    LrSchedule schedule{{{0, 1e-2}}};

    // parametric
    std::vector<AxisSpec> grid;
    int epochs = 50;
    int batch = 10;
    int monitor_every = 10;
    int hidden = 10;
    double train_fraction = 0.7;
    int monitor_size = 10;
    std::string resume;

    LandscapeConfig landscape;

    std::uint64_t seed = 0;
    std::string output = "out";

    bool operator==(const RunConfig&) const = default;
};

nlohmann::json problem_to_json(const ProblemSpec& p);
/// Starts from the family template at (sigma, N) and overrides every field present.
ProblemSpec problem_from_json(const nlohmann::json& j, const std::string& where = "problem");

nlohmann::json to_json(const RunConfig& c);
RunConfig run_config_from_json(const nlohmann::json& j);

/// Parses JSON text. Syntax errors report line and column, field errors the field path.
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

/// Named presets: the published schedules and grids, plus desk-scale variants.
std::vector<std::string> preset_names();
nlohmann::json preset_json(const std::string& name);

/// preset (optional) <- config file (optional) merged in that order.
RunConfig load_run_config(const std::string& config_path, const std::string& preset);

} // namespace rfem
