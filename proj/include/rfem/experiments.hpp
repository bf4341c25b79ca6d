#pragma once

#include <span>
#include <vector>

#include "rfem/config.hpp"
#include "rfem/training.hpp"

namespace rfem {

/// Least-squares slope of log y against log x.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceRow {
    int N;
    double e_h;
    double e_theta;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    double slope_uniform = 0.0;
    double slope_adaptive = 0.0;
};

/// Uniform e_h and trained e_theta for each N (cfg.iterations = 0 gives the theta = 0 mesh).
ConvergenceResult run_convergence(const ProblemSpec& tmpl, const std::vector<int>& Ns, const NonParametricConfig& cfg);

/// The 1D arctan problem at (alpha, s) on a uniform N-element mesh whose node
/// `node` sits at its uniform position + theta.
Mesh1D landscape_mesh(const LandscapeConfig& cfg, double theta);
ProblemSpec landscape_problem(const LandscapeConfig& cfg);

struct LandscapeRow {
    double theta;
    double J_exact_min;
    std::vector<double> J_quad_min; // one per quadrature order
};

struct LandscapeResult {
    std::vector<LandscapeRow> rows;
    double J_exact = 0.0; // J(u)
    double argmin_exact = 0.0;
    std::vector<double> argmin_quad;
    double min_exact = 0.0;
    std::vector<double> min_quad;
};

/// Sweep of cfg.points thetas, symmetric and strictly inside (-half_width, half_width).
std::vector<double> landscape_thetas(const LandscapeConfig& cfg);
LandscapeResult run_landscape(const LandscapeConfig& cfg);

} // namespace rfem
