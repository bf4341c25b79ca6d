// rfem: r-adaptive Ritz FEM driver.
//
//   rfem solve       --config run.json
//   rfem adapt       --preset power-nonparametric --out out/power
//   rfem train       --preset arctan1d-desk --seed 3
//   rfem convergence --preset power-convergence
//   rfem landscape   --preset landscape
//   rfem report      --out out/arctan-desk
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rfem/config.hpp"
#include "rfem/csv.hpp"
#include "rfem/errors.hpp"
#include "rfem/experiments.hpp"
#include "rfem/ritz.hpp"
#include "rfem/training.hpp"

namespace fs = std::filesystem;
using namespace rfem;

namespace {

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    return (fs::path(cfg.output) / name).string();
}

void prepare_output(const RunConfig& cfg)
{
    std::error_code ec;
    fs::create_directories(cfg.output, ec);
    if (ec || !fs::is_directory(cfg.output))
        throw ConfigError("cannot create output directory " + cfg.output);
    // the effective config goes next to the results
    std::ofstream out(out_path(cfg, "config.json"));
    if (!out)
        throw ConfigError("output directory " + cfg.output + " is not writable");
    out << to_json(cfg).dump(2) << '\n';
}

void write_mesh_csv(const std::string& path, const std::vector<double>& x, const std::vector<double>& y)
{
    CsvWriter w(path, {"axis", "index", "coordinate"});
    for (std::size_t i = 0; i < x.size(); ++i)
        w.row({std::string("x"), static_cast<long long>(i), x[i]});
    for (std::size_t i = 0; i < y.size(); ++i)
        w.row({std::string("y"), static_cast<long long>(i), y[i]});
}

void write_solution_csv(const std::string& path, const Discretization& d)
{
    std::vector<double> u(d.labeling.node_count, 0.0);
    for (std::size_t k = 0; k < d.labeling.dirichlet.size(); ++k)
        u[d.labeling.dirichlet[k]] = d.labeling.dirichlet_values[k];
    for (int k = 0; k < d.labeling.dof_count(); ++k)
        u[d.labeling.free[k]] = d.solve.c[k];
    if (d.dim == 1) {
        CsvWriter w(path, {"x", "u"});
        for (int i = 0; i < d.mesh.node_count(); ++i)
            w.row({d.mesh.nodes[i], u[i]});
        return;
    }
    CsvWriter w(path, {"x", "y", "u"});
    const auto& xs = d.mesh2.mesh_x.nodes;
    const auto& ys = d.mesh2.mesh_y.nodes;
    for (std::size_t j = 0; j < ys.size(); ++j)
        for (std::size_t i = 0; i < xs.size(); ++i)
            w.row({xs[i], ys[j], u[d.mesh2.node_id(static_cast<int>(i), static_cast<int>(j))]});
}

std::string fmt(double v) { return format_double(v); }

int cmd_solve(const RunConfig& cfg)
{
    prepare_output(cfg);
    const ProblemSpec& p = cfg.problem;
    const Mesh1D mx = Mesh1D::uniform(p.domain_x, p.elements);
    const Discretization d = p.dim == 1 ? discretize(p, mx, cfg.solver)
                                          : discretize(p, TensorMesh2D{mx, Mesh1D::uniform(p.domain_y, p.elements)},
                                                       cfg.solver);
    write_solution_csv(out_path(cfg, "solution.csv"), d);
    std::cout << "problem " << to_string(p.family) << " N = " << p.elements << " dofs = " << d.labeling.dof_count()
              << "\n";
    std::cout << "J = " << fmt(d.J) << "\n";
    std::cout << "relative residual = " << fmt(d.solve.relative_residual) << "\n";
    if (auto Jex = reference_energy(p)) {
        std::cout << "J_exact = " << fmt(*Jex) << "\n";
        std::cout << "e_h = " << fmt(relative_error(d.J, *Jex)) << "\n";
    }
    return 0;
}

NonParametricConfig nonparametric_config(const RunConfig& cfg)
{
    NonParametricConfig n;
    n.iterations = cfg.iterations;
    n.schedule = cfg.schedule;
    n.optimizer = cfg.optimizer;
    n.log_every = cfg.log_every;
    n.solver = cfg.solver;
    return n;
}

int cmd_adapt(const RunConfig& cfg)
{
    prepare_output(cfg);
    const ProblemSpec& p = cfg.problem;
    const NonParametricResult r = train_nonparametric(p, nonparametric_config(cfg), cfg.seed);
    {
        CsvWriter w(out_path(cfg, "history.csv"), {"iteration", "J", "e_theta"});
        for (const auto& row : r.history)
            w.row({static_cast<long long>(row.iteration), row.J, row.e_theta});
    }
    const PipelineResult fin = evaluate_theta(p, r.theta, false, cfg.solver);
    if (p.dim == 1)
        write_mesh_csv(out_path(cfg, "mesh.csv"), fin.disc.mesh.nodes, {});
    else
        write_mesh_csv(out_path(cfg, "mesh.csv"), fin.disc.mesh2.mesh_x.nodes, fin.disc.mesh2.mesh_y.nodes);
    {
        CsvWriter w(out_path(cfg, "theta.csv"), {"index", "theta"});
        for (std::size_t i = 0; i < r.theta.size(); ++i)
            w.row({static_cast<long long>(i), r.theta[i]});
    }
    std::cout << "iterations = " << cfg.iterations << "\n";
    std::cout << "J = " << fmt(r.J) << "\n";
    std::cout << "J_uniform = " << fmt(r.J_uniform) << "\n";
    if (r.e_theta)
        std::cout << "e_theta = " << fmt(*r.e_theta) << "\ne_h = " << fmt(*r.e_h) << "\n";
    return 0;
}

ParamGrid split_grid(const RunConfig& cfg)
{
    if (cfg.grid.empty())
        throw ConfigError("train needs a parameter grid ('grid' or a parametric preset)");
    ParamGrid g = ParamGrid::build(cfg.grid);
    split_train_test(g, cfg.seed, cfg.train_fraction, cfg.monitor_size);
    return g;
}

void write_evals(const std::string& path, const ParamGrid& g, const std::vector<SampleEval>& train,
                 const std::vector<SampleEval>& test)
{
    std::vector<std::string> header{"tuple", "split"};
    for (int d = 0; d < g.dim(); ++d)
        header.push_back("sigma" + std::to_string(d + 1));
    for (const char* h : {"J_exact", "J_uniform", "J_theta", "e_theta", "e_h"})
        header.push_back(h);
    CsvWriter w(path, header);
    auto emit = [&](const std::vector<SampleEval>& evals, const char* split) {
        for (const SampleEval& s : evals) {
            std::vector<CsvCell> row{static_cast<long long>(s.tuple), std::string(split)};
            for (double v : s.sigma)
                row.push_back(v);
            for (double v : {s.J_exact, s.J_uniform, s.J_theta, s.e_theta, s.e_h})
                row.push_back(v);
            w.row(row);
        }
    };
    emit(train, "train");
    emit(test, "test");
}

void print_table(std::ostream& os, const ErrorSummary& train, const ErrorSummary& test)
{
    char line[256];
    os << "              mean e_theta     max e_theta      mean e_h         max e_h\n";
    std::snprintf(line, sizeof line, "train (%4d)  %-16.6g %-16.6g %-16.6g %-16.6g\n", train.e_theta.count,
                  train.e_theta.mean, train.e_theta.max, train.e_h.mean, train.e_h.max);
    os << line;
    std::snprintf(line, sizeof line, "test  (%4d)  %-16.6g %-16.6g %-16.6g %-16.6g\n", test.e_theta.count,
                  test.e_theta.mean, test.e_theta.max, test.e_h.mean, test.e_h.max);
    os << line;
}

int cmd_train(const RunConfig& cfg)
{
    prepare_output(cfg);
    const ParamGrid g = split_grid(cfg);
    ParametricConfig pc;
    pc.epochs = cfg.epochs;
    pc.batch = cfg.batch;
    pc.schedule = cfg.schedule;
    pc.hidden = cfg.hidden;
    pc.monitor_every = cfg.monitor_every;
    pc.seed = cfg.seed;
    pc.solver = cfg.solver;
    std::optional<Checkpoint> resume;
    if (!cfg.resume.empty())
        resume = load_checkpoint(cfg.resume);

    const ParametricResult r = train_parametric(cfg.problem, g, pc, resume);
    save_checkpoint(out_path(cfg, "checkpoint.json"), r.state);
    {
        CsvWriter w(out_path(cfg, "history.csv"), {"iteration", "loss", "e_test"});
        for (const auto& row : r.history)
            w.row({static_cast<long long>(row.iteration), row.loss, row.e_test});
    }
    {
        CsvWriter w(out_path(cfg, "skipped.csv"), {"iteration", "tuple", "reason"});
        for (const auto& s : r.skipped) {
            std::string reason = s.reason;
            std::replace(reason.begin(), reason.end(), ',', ';');
            w.row({static_cast<long long>(s.iteration), static_cast<long long>(s.tuple), reason});
        }
    }
    std::vector<int> all = g.train;
    all.insert(all.end(), g.test.begin(), g.test.end());
    const GridReferences refs = compute_references(cfg.problem, g, all);
    const auto train = evaluate_network(cfg.problem, g, r.state.params, g.train, refs);
    const auto test = evaluate_network(cfg.problem, g, r.state.params, g.test, refs);
    write_evals(out_path(cfg, "evals.csv"), g, train, test);

    std::cout << "iterations = " << r.state.iteration << " (" << r.iterations_per_epoch << " per epoch), skipped "
              << r.skipped.size() << " samples\n";
    print_table(std::cout, summarize(train), summarize(test));
    return 0;
}

int cmd_convergence(const RunConfig& cfg)
{
    prepare_output(cfg);
    const ConvergenceResult r = run_convergence(cfg.problem, cfg.N_list, nonparametric_config(cfg));
    {
        CsvWriter w(out_path(cfg, "convergence.csv"), {"N", "e_h", "e_theta"});
        for (const auto& row : r.rows)
            w.row({static_cast<long long>(row.N), row.e_h, row.e_theta});
    }
    {
        CsvWriter w(out_path(cfg, "rates.csv"), {"mesh", "slope"});
        w.row({std::string("uniform"), r.slope_uniform});
        w.row({std::string("adaptive"), r.slope_adaptive});
    }
    for (const auto& row : r.rows)
        std::cout << "N = " << row.N << "  e_h = " << fmt(row.e_h) << "  e_theta = " << fmt(row.e_theta) << "\n";
    std::cout << "slope uniform = " << fmt(r.slope_uniform) << "\nslope adaptive = " << fmt(r.slope_adaptive)
              << "\n";
    return 0;
}

int cmd_landscape(const RunConfig& cfg)
{
    prepare_output(cfg);
    const LandscapeResult r = run_landscape(cfg.landscape);
    std::vector<std::string> header{"theta", "J_exact_min"};
    for (int q : cfg.landscape.orders)
        header.push_back(cfg.landscape.orders.size() == 1 ? "J_quad_min" : "J_quad_min_q" + std::to_string(q));
    CsvWriter w(out_path(cfg, "landscape.csv"), header);
    for (const auto& row : r.rows) {
        std::vector<CsvCell> cells{row.theta, row.J_exact_min};
        for (double v : row.J_quad_min)
            cells.push_back(v);
        w.row(cells);
    }
    std::cout << "J(u) = " << fmt(r.J_exact) << "\n";
    std::cout << "exact: min = " << fmt(r.min_exact) << " at theta = " << fmt(r.argmin_exact) << "\n";
    for (std::size_t k = 0; k < cfg.landscape.orders.size(); ++k)
        std::cout << cfg.landscape.orders[k] << "-point quadrature: min = " << fmt(r.min_quad[k])
                  << " at theta = " << fmt(r.argmin_quad[k]) << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg)
{
    const CsvTable t = read_csv(out_path(cfg, "evals.csv"));
    const int cs = t.column("split"), ct = t.column("e_theta"), ch = t.column("e_h");
    std::vector<SampleEval> train, test;
    for (const auto& row : t.rows) {
        SampleEval s;
        s.e_theta = std::stod(row[ct]);
        s.e_h = std::stod(row[ch]);
        (row[cs] == "train" ? train : test).push_back(s);
    }
    const ErrorSummary tr = summarize(train), te = summarize(test);
    print_table(std::cout, tr, te);
    CsvWriter w(out_path(cfg, "report.csv"), {"split", "count", "e_theta_mean", "e_theta_max", "e_h_mean", "e_h_max"});
    w.row({std::string("train"), static_cast<long long>(tr.e_theta.count), tr.e_theta.mean, tr.e_theta.max,
           tr.e_h.mean, tr.e_h.max});
    w.row({std::string("test"), static_cast<long long>(te.e_theta.count), te.e_theta.mean, te.e_theta.max,
           te.e_h.mean, te.e_h.max});
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"r-adaptive finite elements by Ritz-energy minimisation"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, preset, out;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "random seed");
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--out", out, "output directory");
    app.add_option("--preset", preset, "named preset (see --list-presets)");
    bool list = false;
    app.add_flag("--list-presets", list, "print preset names and exit");

    struct Cmd {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Cmd cmds[] = {
        {"solve", "solve on the uniform mesh", cmd_solve},
        {"adapt", "non-parametric r-adaptation", cmd_adapt},
        {"train", "parametric network training", cmd_train},
        {"convergence", "uniform vs adaptive convergence study", cmd_convergence},
        {"landscape", "single-node energy landscape, exact vs quadrature loads", cmd_landscape},
        {"report", "aggregate per-sample errors of a finished training run", cmd_report},
    };
    for (const Cmd& c : cmds)
        app.add_subcommand(c.name, c.help);

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            if (list && e.get_exit_code() != 0) {
                for (const auto& n : preset_names())
                    std::cout << n << "\n";
                return 0;
            }
            app.exit(e);
            return 2;
        }
        RunConfig cfg = load_run_config(config_path, preset);
        if (*seed_opt)
            cfg.seed = seed;
        if (!out.empty())
            cfg.output = out;
        for (const Cmd& c : cmds)
            if (app.got_subcommand(c.name)) {
                cfg.command = c.name;
                return c.run(cfg);
            }
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
