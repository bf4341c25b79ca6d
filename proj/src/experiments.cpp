#include "rfem/experiments.hpp"

#include <cmath>
#include <limits>

#include "rfem/errors.hpp"

namespace rfem {

double fit_loglog_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidInput("slope fit needs at least two paired points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw InvalidInput("slope fit needs positive data");
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double den = n * sxx - sx * sx;
    if (den == 0.0)
        throw InvalidInput("slope fit needs distinct abscissae");
    return (n * sxy - sx * sy) / den;
}

ConvergenceResult run_convergence(const ProblemSpec& tmpl, const std::vector<int>& Ns, const NonParametricConfig& cfg)
{
    ConvergenceResult out;
    std::vector<double> xs, eh, et;
    for (int N : Ns) {
        ProblemSpec p = tmpl;
        p.elements = N;
        p.validate();
        const NonParametricResult r = train_nonparametric(p, cfg);
        if (!r.e_h || !r.e_theta)
            throw Unsupported("convergence study needs a reference energy");
        out.rows.push_back({N, *r.e_h, *r.e_theta});
        xs.push_back(N);
        eh.push_back(*r.e_h);
        et.push_back(*r.e_theta);
    }
    if (xs.size() >= 2) {
        out.slope_uniform = fit_loglog_slope(xs, eh);
        out.slope_adaptive = fit_loglog_slope(xs, et);
    }
    return out;
}

ProblemSpec landscape_problem(const LandscapeConfig& cfg)
{
    return make_problem(Family::Arctan1D, {cfg.alpha, cfg.s}, cfg.N);
}

Mesh1D landscape_mesh(const LandscapeConfig& cfg, double theta)
{
    if (cfg.node < 1 || cfg.node >= cfg.N)
        throw ConfigError("landscape node must be interior");
    Mesh1D m = Mesh1D::uniform({0.0, 1.0}, cfg.N);
    m.nodes[cfg.node] += theta;
    return Mesh1D::from_nodes(m.nodes);
}

std::vector<double> landscape_thetas(const LandscapeConfig& cfg)
{
    if (cfg.points < 1 || !(cfg.half_width > 0.0))
        throw ConfigError("landscape sweep needs points >= 1 and a positive half width");
    std::vector<double> t(cfg.points);
    for (int k = 0; k < cfg.points; ++k)
        t[k] = cfg.half_width * (2.0 * (k + 0.5) / cfg.points - 1.0);
    return t;
}

LandscapeResult run_landscape(const LandscapeConfig& cfg)
{
    const ProblemSpec exact = landscape_problem(cfg);
    std::vector<ProblemSpec> quad;
    for (int q : cfg.orders) {
        ProblemSpec p = exact;
        p.load.mode = IntegrationMode::Quadrature;
        p.load.order = q;
        p.validate();
        quad.push_back(p);
    }

    LandscapeResult res;
    res.J_exact = exact_ritz_energy(exact);
    res.min_exact = std::numeric_limits<double>::infinity();
    res.min_quad.assign(quad.size(), std::numeric_limits<double>::infinity());
    res.argmin_quad.assign(quad.size(), 0.0);
    for (double theta : landscape_thetas(cfg)) {
        const Mesh1D mesh = landscape_mesh(cfg, theta);
        LandscapeRow row;
        row.theta = theta;
        // the minimum over V_theta is the FEM solution: one solve per point
        row.J_exact_min = discretize(exact, mesh).J;
        if (row.J_exact_min < res.min_exact) {
            res.min_exact = row.J_exact_min;
            res.argmin_exact = theta;
        }
        for (std::size_t k = 0; k < quad.size(); ++k) {
            const double J = discretize(quad[k], mesh).J;
            row.J_quad_min.push_back(J);
            if (J < res.min_quad[k]) {
                res.min_quad[k] = J;
                res.argmin_quad[k] = theta;
            }
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

} // namespace rfem
