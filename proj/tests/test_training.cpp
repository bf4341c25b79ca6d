#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "rfem/errors.hpp"
#include "rfem/training.hpp"
#include "support.hpp"

using namespace rfem;

TEST_CASE("zero iterations keeps the uniform mesh")
{
    const ProblemSpec p = make_problem(Family::Arctan1D, {10, 0.5}, 16);
    NonParametricConfig cfg;
    cfg.iterations = 0;
    const NonParametricResult r = train_nonparametric(p, cfg);
    CHECK(r.theta == std::vector<double>(16, 0.0));
    CHECK(r.J == r.J_uniform);
    REQUIRE(r.history.size() == 1);
    CHECK(r.history[0].iteration == 0);
}

TEST_CASE("arctan adaptivity beats uniform within 300 iterations")
{
    const ProblemSpec p = make_problem(Family::Arctan1D, {10, 0.5}, 32);
    NonParametricConfig cfg;
    cfg.iterations = 300;
    cfg.log_every = 50;
    const NonParametricResult r = train_nonparametric(p, cfg);
    REQUIRE(r.e_theta);
    CHECK(*r.e_theta < *r.e_h);
    CHECK(r.history.size() == 7);
    CHECK(r.history.back().iteration == 300);
}

TEST_CASE("non-parametric run aborts on a collapsing mesh")
{
    // a huge constant rate drives an element under the minimum length quickly
    const ProblemSpec p = make_problem(Family::Power, {0.7}, 8);
    NonParametricConfig cfg;
    cfg.iterations = 200;
    cfg.schedule = {{{0, 5.0}}};
    try {
        train_nonparametric(p, cfg);
        FAIL("expected TrainingAborted");
    } catch (const TrainingAborted& e) {
        CHECK(e.iteration() > 0);
    }
}

TEST_CASE("instantiate keeps N and integration settings")
{
    ProblemSpec tmpl = make_problem(Family::Arctan1D, 12);
    tmpl.load.mode = IntegrationMode::Quadrature;
    tmpl.load.order = 4;
    const ProblemSpec p = instantiate(tmpl, {20, 0.3});
    CHECK(p.elements == 12);
    CHECK(p.load.order == 4);
    CHECK(p.load.alpha == 20);
    CHECK(p.load.s == 0.3);
}

namespace {

ParamGrid small_grid()
{
    ParamGrid g = ParamGrid::build({{AxisDist::ReversedLog2, 1, 20, 4}, {AxisDist::Uniform, 0.3, 0.7, 3}});
    split_train_test(g, 7);
    return g;
}

} // namespace

TEST_CASE("balanced batch loss gradient against finite differences")
{
    const ProblemSpec tmpl = make_problem(Family::Arctan1D, 8);
    const ParamGrid g = small_grid();
    const std::vector<int> batch{g.train[0], g.train[1], g.train[2]};
    const GridReferences refs = compute_references(tmpl, g, batch);
    MlpParams net = lecun_init({2, 10, 8}, 3);
    std::mt19937_64 rng(1);
    for (double& v : net.values)
        v += 0.2 * testing::gaussian_vector(rng, 1)[0];

    std::vector<double> grad(net.size());
    batch_loss_gradient(tmpl, g, net, batch, refs, grad);
    std::vector<double> scratch(net.size());
    const auto fd = testing::central_fd(
        [&](const std::vector<double>& v) {
            MlpParams q = net;
            q.values = v;
            return batch_loss_gradient(tmpl, g, q, batch, refs, scratch);
        },
        net.values, 1e-6);
    CHECK(testing::rel_diff(grad, fd) < 1e-5);
}

TEST_CASE("parametric bookkeeping")
{
    const ProblemSpec tmpl = make_problem(Family::Arctan1D, 8);
    const ParamGrid g = small_grid();
    ParametricConfig cfg;
    cfg.epochs = 0;
    const ParametricResult z = train_parametric(tmpl, g, cfg);
    REQUIRE(z.history.size() == 1);
    CHECK(std::isfinite(z.history[0].e_test));

    cfg.epochs = 3;
    cfg.batch = 3;
    cfg.monitor_every = 2;
    const ParametricResult r = train_parametric(tmpl, g, cfg);
    CHECK(r.iterations_per_epoch == (static_cast<int>(g.train.size()) + 2) / 3);
    CHECK(r.state.iteration == 3 * r.iterations_per_epoch);
    CHECK(r.state.epoch == 3);
    CHECK(r.history.front().iteration == 0);
    CHECK(r.history.back().iteration == r.state.iteration);

    const ParametricResult again = train_parametric(tmpl, g, cfg);
    CHECK(again.batch_losses == r.batch_losses);
    CHECK(again.state.params.values == r.state.params.values);
}

TEST_CASE("checkpoint resume reproduces an uninterrupted run")
{
    const ProblemSpec tmpl = make_problem(Family::Arctan1D, 8);
    const ParamGrid g = small_grid();
    ParametricConfig cfg;
    cfg.batch = 2;
    cfg.epochs = 4;
    const ParametricResult full = train_parametric(tmpl, g, cfg);

    cfg.epochs = 2;
    const ParametricResult half = train_parametric(tmpl, g, cfg);
    const std::string path = (std::filesystem::temp_directory_path() / "rfem_ck_test.json").string();
    save_checkpoint(path, half.state);
    const Checkpoint ck = load_checkpoint(path);
    CHECK(ck.params.values == half.state.params.values);
    CHECK(ck.adam.m == half.state.adam.m);
    CHECK(ck.adam.t == half.state.adam.t);
    cfg.epochs = 4;
    const ParametricResult rest = train_parametric(tmpl, g, cfg, ck);
    CHECK(rest.state.params.values == full.state.params.values);
    std::remove(path.c_str());
}

TEST_CASE("degenerate samples are skipped, not fatal")
{
    const ProblemSpec tmpl = make_problem(Family::Arctan1D, 8);
    const ParamGrid g = small_grid();
    const GridReferences refs = compute_references(tmpl, g, g.train);
    MlpParams net({2, 10, 8});
    for (int r = 0; r < 10; ++r)
        net.b2(r) = 1.0;
    for (int r = 0; r < 10; ++r)
        net.W3(0, r) = -400.0;
    std::vector<double> grad(net.size());
    std::vector<std::pair<int, std::string>> skipped;
    const double loss = batch_loss_gradient(tmpl, g, net, std::vector<int>{g.train[0]}, refs, grad, &skipped);
    CHECK(std::isnan(loss));
    CHECK(skipped.size() == 1);
}

TEST_CASE("summary skips NaN errors")
{
    std::vector<SampleEval> ev(3);
    ev[0].e_theta = 0.1;
    ev[1].e_theta = NAN;
    ev[2].e_theta = 0.3;
    for (auto& e : ev)
        e.e_h = 0.5;
    const ErrorSummary s = summarize(ev);
    CHECK(s.e_theta.count == 2);
    CHECK(s.e_theta.mean == doctest::Approx(0.2));
    CHECK(s.e_h.mean == 0.5);
}
