#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rfem/assembly.hpp"
#include "rfem/problem.hpp"
#include "rfem/solver.hpp"

namespace rfem {

/// 1/2 (Bc).c - l.c, the loss whose c-derivative vanishes at the solution.
double ritz_energy(const SparseSystem& system, std::span<const double> c);
/// J / |J_uniform|. Throws DegenerateProblem for a zero reference.
double balanced_ritz(double J, double J_uniform_ref);
/// sqrt((J_exact - J) / J_exact), clamping roundoff. Throws InconsistentReference
/// when J lies below J_exact by more than 1e-9.
double relative_error(double J_candidate, double J_exact);

struct RitzValue {
    double J = 0.0;
    std::optional<double> J_balanced;
    std::optional<double> reference_J_uniform;
};

/// Mesh, labels, system and solution for one problem on one mesh.
struct Discretization {
    int dim = 1;
    Mesh1D mesh;        // 1D
    TensorMesh2D mesh2; // 2D
    DofLabeling labeling;
    SparseSystem system;
    SolveReport solve;
    double J = 0.0;
};

Discretization discretize(const ProblemSpec& p, const Mesh1D& mesh, SolveMethod method = SolveMethod::Auto);
Discretization discretize(const ProblemSpec& p, const TensorMesh2D& mesh, SolveMethod method = SolveMethod::Auto);

/// Frozen-c gradient with respect to node coordinates.
NodeGradient node_gradient(const ProblemSpec& p, const Discretization& d);

/// Reduced gradient with respect to the logits (x logits first, then y).
/// The mesh must carry its construction record.
std::vector<double> ritz_gradient(const ProblemSpec& p, const Discretization& d);

/// Split of a logit vector into per-axis parameters.
MeshParams1D theta_axis(const ProblemSpec& p, std::span<const double> theta, int axis);

/// theta -> mesh -> assemble -> solve -> J (and gradient).
struct PipelineResult {
    double J = 0.0;
    std::vector<double> grad; // empty unless requested
    Discretization disc;
};
PipelineResult evaluate_theta(const ProblemSpec& p, std::span<const double> theta, bool with_gradient,
                              SolveMethod method = SolveMethod::Auto);

/// Minimum Ritz energy on the uniform mesh with p.elements per axis.
double uniform_ritz_energy(const ProblemSpec& p);

/// Mean and max of a list of per-sample errors.
struct ErrorStats {
    double mean = 0.0;
    double max = 0.0;
    int count = 0;
};
ErrorStats aggregate(std::span<const double> errors);

} // namespace rfem
