#include "rfem/training.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include <json.hpp>

#include "rfem/errors.hpp"

namespace rfem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double safe_error(double J, double J_exact)
{
    if (!std::isfinite(J_exact))
        return kNaN;
    return relative_error(J, J_exact);
}

double mean_finite(const std::vector<double>& v)
{
    double s = 0.0;
    int n = 0;
    for (double x : v)
        if (std::isfinite(x)) {
            s += x;
            ++n;
        }
    return n ? s / n : kNaN;
}

} // namespace

std::string to_string(OptimizerKind k) { return k == OptimizerKind::Adam ? "adam" : "sgd_nesterov"; }

OptimizerKind optimizer_from_string(const std::string& s)
{
    if (s == "adam")
        return OptimizerKind::Adam;
    if (s == "sgd_nesterov")
        return OptimizerKind::SgdNesterov;
    throw ConfigError("unknown optimizer '" + s + "'");
}

std::optional<double> reference_energy(const ProblemSpec& p)
{
    if (p.family == Family::LShape) {
        if (auto J = lshape_reference(p.sigma[0], p.sigma[1]))
            return *J;
        return std::nullopt;
    }
    return exact_ritz_energy(p);
}

// --- non-parametric --------------------------------------------------------------

NonParametricResult train_nonparametric(const ProblemSpec& p, const NonParametricConfig& cfg, std::uint64_t)
{
    p.validate();
    cfg.schedule.validate();
    if (cfg.iterations < 0)
        throw ConfigError("iteration count must be non-negative");
    const int log_every = std::max(1, cfg.log_every);

    NonParametricResult res;
    res.theta.assign(p.logit_count(), 0.0);
    const std::optional<double> Jex = reference_energy(p);
    res.J_uniform = uniform_ritz_energy(p);
    if (Jex)
        res.e_h = relative_error(res.J_uniform, *Jex);

    AdamState adam;
    adam.schedule = cfg.schedule;
    SgdNesterovState sgd;
    sgd.schedule = cfg.schedule;

    for (int t = 0; t <= cfg.iterations; ++t) {
        const bool last = t == cfg.iterations;
        PipelineResult r;
        try {
            r = evaluate_theta(p, res.theta, !last, cfg.solver);
        } catch (const DegenerateMesh& e) {
            throw TrainingAborted("degenerate mesh at iteration " + std::to_string(t) + ": " + e.what(), t);
        }
        if (last || t % log_every == 0)
            res.history.push_back({t, r.J, Jex ? relative_error(r.J, *Jex) : kNaN});
        if (last) {
            res.J = r.J;
            if (Jex)
                res.e_theta = relative_error(r.J, *Jex);
            break;
        }
        if (cfg.optimizer == OptimizerKind::Adam)
            adam.step(res.theta, r.grad, t);
        else
            sgd.step(res.theta, r.grad, t);
    }
    return res;
}

// --- parametric ------------------------------------------------------------------

ProblemSpec instantiate(const ProblemSpec& tmpl, const std::vector<double>& sigma)
{
    ProblemSpec p = make_problem(tmpl.family, sigma, tmpl.elements);
    p.load.mode = tmpl.load.mode;
    p.load.order = tmpl.load.order;
    p.validate();
    return p;
}

std::vector<double> predict_logits(const MlpParams& params, const ParamGrid& grid, const std::vector<double>& sigma)
{
    return mlp_forward(params, grid.encode(sigma)).logits;
}

GridReferences compute_references(const ProblemSpec& tmpl, const ParamGrid& grid, const std::vector<int>& tuples)
{
    GridReferences refs;
    refs.J_uniform.assign(grid.size(), kNaN);
    refs.J_exact.assign(grid.size(), kNaN);
    for (int k : tuples) {
        const ProblemSpec p = instantiate(tmpl, grid.tuples[k]);
        refs.J_uniform[k] = uniform_ritz_energy(p);
        if (auto J = reference_energy(p))
            refs.J_exact[k] = *J;
    }
    return refs;
}

std::vector<SampleEval> evaluate_network(const ProblemSpec& tmpl, const ParamGrid& grid, const MlpParams& params,
                                         const std::vector<int>& tuples, const GridReferences& refs)
{
    std::vector<SampleEval> out;
    for (int k : tuples) {
        const ProblemSpec p = instantiate(tmpl, grid.tuples[k]);
        SampleEval s;
        s.tuple = k;
        s.sigma = grid.tuples[k];
        s.J_exact = refs.J_exact[k];
        s.J_uniform = refs.J_uniform[k];
        s.e_h = safe_error(s.J_uniform, s.J_exact);
        try {
            s.J_theta = evaluate_theta(p, predict_logits(params, grid, s.sigma), false).J;
            s.e_theta = safe_error(s.J_theta, s.J_exact);
        } catch (const DegenerateMesh&) {
            s.J_theta = kNaN;
            s.e_theta = kNaN;
        }
        out.push_back(std::move(s));
    }
    return out;
}

ErrorSummary summarize(const std::vector<SampleEval>& evals)
{
    std::vector<double> et, eh;
    for (const SampleEval& s : evals) {
        if (std::isfinite(s.e_theta))
            et.push_back(s.e_theta);
        if (std::isfinite(s.e_h))
            eh.push_back(s.e_h);
    }
    return {aggregate(et), aggregate(eh)};
}

double batch_loss_gradient(const ProblemSpec& tmpl, const ParamGrid& grid, const MlpParams& net,
                           std::span<const int> tuples, const GridReferences& refs, std::span<double> grad,
                           std::vector<std::pair<int, std::string>>* skipped, SolveMethod solver)
{
    std::fill(grad.begin(), grad.end(), 0.0);
    // evaluate every sample first so the mean uses the surviving count
    std::vector<MlpCache> caches;
    std::vector<std::vector<double>> glogits;
    double loss = 0.0;
    for (int k : tuples) {
        const ProblemSpec p = instantiate(tmpl, grid.tuples[k]);
        MlpCache cache = mlp_forward(net, grid.encode(grid.tuples[k]));
        try {
            PipelineResult r = evaluate_theta(p, cache.logits, true, solver);
            const double scale = 1.0 / std::abs(refs.J_uniform[k]);
            loss += balanced_ritz(r.J, refs.J_uniform[k]);
            for (double& g : r.grad)
                g *= scale;
            caches.push_back(std::move(cache));
            glogits.push_back(std::move(r.grad));
        } catch (const DegenerateMesh& e) {
            if (skipped)
                skipped->push_back({k, e.what()});
        }
    }
    const int used = static_cast<int>(caches.size());
    if (used == 0)
        return kNaN;
    for (int u = 0; u < used; ++u) {
        for (double& g : glogits[u])
            g /= used;
        mlp_backward(net, caches[u], glogits[u], grad);
    }
    return loss / used;
}

ParametricResult train_parametric(const ProblemSpec& tmpl, const ParamGrid& grid, const ParametricConfig& cfg,
                                  const std::optional<Checkpoint>& resume)
{
    tmpl.validate();
    cfg.schedule.validate();
    if (grid.train.empty())
        throw ConfigError("parameter grid has not been split into train and test sets");
    if (cfg.batch < 1 || cfg.epochs < 0)
        throw ConfigError("batch must be >= 1 and epochs >= 0");
    if (grid.dim() != parameter_count(tmpl.family))
        throw ConfigError("grid dimension does not match the problem's parameter count");

    ParametricResult res;
    const MlpShape shape{grid.dim(), cfg.hidden, tmpl.logit_count()};
    if (resume) {
        if (!(resume->params.shape == shape))
            throw ConfigError("checkpoint network shape does not match the problem");
        res.state = *resume;
    } else {
        res.state.params = lecun_init(shape, cfg.seed);
    }
    res.state.adam.schedule = cfg.schedule;

    std::vector<int> needed = grid.train;
    needed.insert(needed.end(), grid.monitor.begin(), grid.monitor.end());
    const GridReferences refs = compute_references(tmpl, grid, needed);

    const int ntrain = static_cast<int>(grid.train.size());
    res.iterations_per_epoch = (ntrain + cfg.batch - 1) / cfg.batch;
    const int monitor_every = std::max(1, cfg.monitor_every);

    auto monitor = [&](double* loss_out) {
        std::vector<double> errs, losses;
        for (int k : grid.monitor) {
            const ProblemSpec p = instantiate(tmpl, grid.tuples[k]);
            try {
                const double J = evaluate_theta(p, predict_logits(res.state.params, grid, grid.tuples[k]), false).J;
                errs.push_back(safe_error(J, refs.J_exact[k]));
                losses.push_back(balanced_ritz(J, refs.J_uniform[k]));
            } catch (const DegenerateMesh&) {
            }
        }
        if (loss_out)
            *loss_out = mean_finite(losses);
        return mean_finite(errs);
    };

    if (res.state.iteration == 0) {
        double loss0 = kNaN;
        const double e0 = monitor(&loss0);
        res.history.push_back({0, loss0, e0});
    }

    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    // replay the shuffles of completed epochs so resumed runs see the same order
    std::vector<int> order(grid.train);
    for (int e = 0; e < res.state.epoch; ++e)
        std::shuffle(order.begin(), order.end(), rng);

    const MlpParams& net = res.state.params;
    std::vector<double> grad(net.size());
    double loss_acc = 0.0;
    int loss_n = 0;
    int since_row = 0;

    for (int epoch = res.state.epoch; epoch < cfg.epochs; ++epoch) {
        order = grid.train;
        std::shuffle(order.begin(), order.end(), rng);
        for (int start = 0; start < ntrain; start += cfg.batch) {
            const int stop = std::min(ntrain, start + cfg.batch);
            const int iteration = res.state.iteration + 1;

            std::vector<std::pair<int, std::string>> bad;
            const std::span<const int> batch = std::span<const int>(order).subspan(start, stop - start);
            const double batch_loss = batch_loss_gradient(tmpl, grid, net, batch, refs, grad, &bad, cfg.solver);
            for (auto& [k, why] : bad)
                res.skipped.push_back({iteration, k, std::move(why)});
            if (std::isfinite(batch_loss)) {
                res.state.adam.step(res.state.params.values, grad, epoch);
                loss_acc += batch_loss;
                ++loss_n;
            }
            res.state.iteration = iteration;
            res.batch_losses.push_back(batch_loss);
            res.batch_epochs.push_back(epoch);
            if (++since_row == monitor_every) {
                res.history.push_back({iteration, loss_n ? loss_acc / loss_n : kNaN, monitor(nullptr)});
                loss_acc = 0.0;
                loss_n = 0;
                since_row = 0;
            }
        }
        res.state.epoch = epoch + 1;
    }
    if (since_row > 0)
        res.history.push_back({res.state.iteration, loss_n ? loss_acc / loss_n : kNaN, monitor(nullptr)});
    return res;
}

// --- checkpoints -----------------------------------------------------------------

void save_checkpoint(const std::string& path, const Checkpoint& ck)
{
    nlohmann::json j;
    j["format"] = "rfem-checkpoint";
    j["version"] = 1;
    j["shape"] = {{"inputs", ck.params.shape.inputs},
                  {"hidden", ck.params.shape.hidden},
                  {"outputs", ck.params.shape.outputs}};
    j["params"] = ck.params.values;
    j["adam"] = {{"beta1", ck.adam.beta1}, {"beta2", ck.adam.beta2}, {"eps", ck.adam.eps},
                 {"t", ck.adam.t},         {"m", ck.adam.m},         {"v", ck.adam.v}};
    j["epoch"] = ck.epoch;
    j["iteration"] = ck.iteration;
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write checkpoint " + path);
    out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open checkpoint " + path);
    nlohmann::json j;
    try {
        in >> j;
        if (j.at("format") != "rfem-checkpoint" || j.at("version") != 1)
            throw ConfigError(path + ": not a version-1 checkpoint");
        Checkpoint ck;
        const auto& s = j.at("shape");
        ck.params = MlpParams(MlpShape{s.at("inputs").get<int>(), s.at("hidden").get<int>(),
                                       s.at("outputs").get<int>()});
        auto values = j.at("params").get<std::vector<double>>();
        if (values.size() != ck.params.size())
            throw ConfigError(path + ": parameter count does not match the shape");
        ck.params.values = std::move(values);
        const auto& a = j.at("adam");
        ck.adam.beta1 = a.at("beta1");
        ck.adam.beta2 = a.at("beta2");
        ck.adam.eps = a.at("eps");
        ck.adam.t = a.at("t");
        ck.adam.m = a.at("m").get<std::vector<double>>();
        ck.adam.v = a.at("v").get<std::vector<double>>();
        ck.epoch = j.at("epoch");
        ck.iteration = j.at("iteration");
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": malformed checkpoint (" + e.what() + ")");
    }
}

} // namespace rfem
