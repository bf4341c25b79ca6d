#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfem/nn.hpp"
#include "rfem/problem.hpp"
#include "rfem/ritz.hpp"
#include "rfem/sampling.hpp"

namespace rfem {

enum class OptimizerKind { Adam, SgdNesterov };
std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

// --- non-parametric --------------------------------------------------------------

struct NonParametricConfig {
    int iterations = 1000;
    LrSchedule schedule{{{0, 1e-2}}}; // thresholds count iterations here
    OptimizerKind optimizer = OptimizerKind::Adam;
    int log_every = 1;
    SolveMethod solver = SolveMethod::Auto;
};

struct NonParametricRow {
    int iteration;
    double J;
    double e_theta; // NaN when no reference energy exists
};

struct NonParametricResult {
    std::vector<double> theta;
    std::vector<NonParametricRow> history;
    double J = 0.0;
    std::optional<double> e_theta;
    double J_uniform = 0.0;
    std::optional<double> e_h;
};

/// theta starts at 0. Logs (J, e_theta) at theta^(t) before step t+1 every
/// `log_every` iterations and always at the final iterate. Throws TrainingAborted
/// when the mesh degenerates.
NonParametricResult train_nonparametric(const ProblemSpec& problem, const NonParametricConfig& config,
                                        std::uint64_t seed = 0);

/// Reference energy J(u), or nullopt.
std::optional<double> reference_energy(const ProblemSpec& problem);

// --- parametric ------------------------------------------------------------------

/// The problem at parameters sigma, keeping the template's N and integration settings.
ProblemSpec instantiate(const ProblemSpec& tmpl, const std::vector<double>& sigma);

struct ParametricConfig {
    int epochs = 50;
    int batch = 10;
    LrSchedule schedule{{{0, 1e-2}, {20, 1e-3}}}; // thresholds count epochs
    int hidden = 10;
    int monitor_every = 10;
    std::uint64_t seed = 0;
    SolveMethod solver = SolveMethod::Auto;
};

struct ParametricRow {
    int iteration;
    double loss;   // mean batch loss since the previous row (monitor loss at iteration 0)
    double e_test; // mean relative error on the monitor subset
};

struct SkippedSample {
    int iteration;
    int tuple;
    std::string reason;
};

struct Checkpoint {
    MlpParams params;
    AdamState adam;
    int epoch = 0;
    int iteration = 0;
};

void save_checkpoint(const std::string& path, const Checkpoint& ck);
Checkpoint load_checkpoint(const std::string& path);

/// Per-tuple energies and errors.
struct SampleEval {
    int tuple = 0;
    std::vector<double> sigma;
    double J_exact = 0.0;
    double J_uniform = 0.0;
    double J_theta = 0.0;
    double e_theta = 0.0; // NaN if the predicted mesh degenerated
    double e_h = 0.0;
};

/// Uniform-mesh and exact energies for every tuple of the grid.
struct GridReferences {
    std::vector<double> J_uniform;
    std::vector<double> J_exact; // NaN when unavailable
};
GridReferences compute_references(const ProblemSpec& tmpl, const ParamGrid& grid, const std::vector<int>& tuples);

struct ParametricResult {
    Checkpoint state;
    std::vector<ParametricRow> history;
    std::vector<double> batch_losses; // per iteration
    std::vector<int> batch_epochs;    // epoch of each iteration
    std::vector<SkippedSample> skipped;
    int iterations_per_epoch = 0;
};

/// Network logits for one parameter tuple.
std::vector<double> predict_logits(const MlpParams& params, const ParamGrid& grid, const std::vector<double>& sigma);

/// Mean balanced loss over `tuples` and its gradient with respect to the network
/// weights (overwrites grad). Samples whose mesh degenerates are left out and
/// reported through `skipped`; NaN when none survive.
double batch_loss_gradient(const ProblemSpec& tmpl, const ParamGrid& grid, const MlpParams& net,
                           std::span<const int> tuples, const GridReferences& refs, std::span<double> grad,
                           std::vector<std::pair<int, std::string>>* skipped = nullptr,
                           SolveMethod solver = SolveMethod::Auto);

/// Trains an MLP sigma -> logits over grid.train (the grid must be split).
ParametricResult train_parametric(const ProblemSpec& tmpl, const ParamGrid& grid, const ParametricConfig& config,
                                  const std::optional<Checkpoint>& resume = std::nullopt);

/// Evaluates the trained network on the listed tuples.
std::vector<SampleEval> evaluate_network(const ProblemSpec& tmpl, const ParamGrid& grid, const MlpParams& params,
                                         const std::vector<int>& tuples, const GridReferences& refs);

struct ErrorSummary {
    ErrorStats e_theta;
    ErrorStats e_h;
};
ErrorSummary summarize(const std::vector<SampleEval>& evals);

} // namespace rfem
