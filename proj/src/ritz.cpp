#include "rfem/ritz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfem/errors.hpp"

namespace rfem {

double ritz_energy(const SparseSystem& system, std::span<const double> c)
{
    if (static_cast<int>(c.size()) != system.B.n)
        throw InvalidInput("coefficient vector does not match the system");
    const std::vector<double> Bc = system.B.multiply(c);
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        quad += Bc[i] * c[i];
        lin += system.ell[i] * c[i];
    }
    return 0.5 * quad - lin;
}

double balanced_ritz(double J, double J_uniform_ref)
{
    if (J_uniform_ref == 0.0)
        throw DegenerateProblem("uniform-mesh reference energy is zero");
    return J / std::abs(J_uniform_ref);
}

double relative_error(double J_candidate, double J_exact)
{
    if (!(J_exact < 0.0))
        throw InvalidInput("relative error needs a negative exact energy");
    if (J_candidate < J_exact - 1e-9)
        throw InconsistentReference("candidate energy " + num(J_candidate) + " lies below the exact "
                                    + num(J_exact) + " (inexact integration?)");
    double radicand = (J_exact - J_candidate) / J_exact;
    if (radicand < 0.0)
        radicand = 0.0;
    return std::sqrt(radicand);
}

namespace {

void finish(Discretization& d, SolveMethod method)
{
    d.solve = solve_spd(d.system, method);
    d.J = ritz_energy(d.system, d.solve.c);
}

} // namespace

Discretization discretize(const ProblemSpec& p, const Mesh1D& mesh, SolveMethod method)
{
    Discretization d;
    d.dim = 1;
    d.mesh = mesh;
    d.labeling = label_dirichlet(mesh, p.boundary);
    d.system = assemble_system(mesh, d.labeling, p.material, p.load, p.neumann_g);
    finish(d, method);
    return d;
}

Discretization discretize(const ProblemSpec& p, const TensorMesh2D& mesh, SolveMethod method)
{
    Discretization d;
    d.dim = 2;
    d.mesh2 = mesh;
    d.labeling = label_dirichlet(mesh, p.boundary);
    d.system = assemble_system(mesh, d.labeling, p.material, p.load);
    finish(d, method);
    return d;
}

NodeGradient node_gradient(const ProblemSpec& p, const Discretization& d)
{
    if (d.dim == 1)
        return assembly_gradient_contraction(d.mesh, d.labeling, p.material, p.load, d.solve.c);
    return assembly_gradient_contraction(d.mesh2, d.labeling, p.material, p.load, d.solve.c);
}

MeshParams1D theta_axis(const ProblemSpec& p, std::span<const double> theta, int axis)
{
    if (static_cast<int>(theta.size()) != p.logit_count())
        throw InvalidInput("expected " + std::to_string(p.logit_count()) + " logits, got "
                           + std::to_string(theta.size()));
    if (axis == 0)
        return axis_params(p, 0, {theta.begin(), theta.begin() + p.adaptive_x()});
    return axis_params(p, 1, {theta.begin() + p.adaptive_x(), theta.end()});
}

std::vector<double> ritz_gradient(const ProblemSpec& p, const Discretization& d)
{
    const NodeGradient g = node_gradient(p, d);
    if (d.dim == 1) {
        if (d.mesh.record.empty())
            throw InvalidInput("mesh has no construction record");
        // only the sizes and interval of the params matter for the pullback
        MeshParams1D px = axis_params(p, 0, std::vector<double>(p.adaptive_x(), 0.0));
        return mesh_pullback(g.x, d.mesh.record, px);
    }
    if (d.mesh2.mesh_x.record.empty() || d.mesh2.mesh_y.record.empty())
        throw InvalidInput("mesh has no construction record");
    MeshParams1D px = axis_params(p, 0, std::vector<double>(p.adaptive_x(), 0.0));
    MeshParams1D py = axis_params(p, 1, std::vector<double>(p.adaptive_y(), 0.0));
    std::vector<double> out = mesh_pullback(g.x, d.mesh2.mesh_x.record, px);
    const std::vector<double> gy = mesh_pullback(g.y, d.mesh2.mesh_y.record, py);
    out.insert(out.end(), gy.begin(), gy.end());
    return out;
}

PipelineResult evaluate_theta(const ProblemSpec& p, std::span<const double> theta, bool with_gradient,
                              SolveMethod method)
{
    PipelineResult r;
    if (p.dim == 1)
        r.disc = discretize(p, build_mesh_1d(theta_axis(p, theta, 0)), method);
    else
        r.disc = discretize(p, build_tensor_mesh_2d(theta_axis(p, theta, 0), theta_axis(p, theta, 1)), method);
    r.J = r.disc.J;
    if (with_gradient)
        r.grad = ritz_gradient(p, r.disc);
    return r;
}

double uniform_ritz_energy(const ProblemSpec& p)
{
    const Mesh1D mx = Mesh1D::uniform(p.domain_x, p.elements);
    if (p.dim == 1)
        return discretize(p, mx).J;
    return discretize(p, TensorMesh2D{mx, Mesh1D::uniform(p.domain_y, p.elements)}).J;
}

ErrorStats aggregate(std::span<const double> errors)
{
    ErrorStats s;
    s.count = static_cast<int>(errors.size());
    if (errors.empty())
        return s;
    s.mean = std::accumulate(errors.begin(), errors.end(), 0.0) / errors.size();
    s.max = *std::max_element(errors.begin(), errors.end());
    return s;
}

} // namespace rfem
