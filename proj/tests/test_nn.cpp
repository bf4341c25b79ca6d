#include <doctest.h>

#include <cmath>
#include <random>

#include "rfem/errors.hpp"
#include "rfem/nn.hpp"
#include "support.hpp"

using namespace rfem;

TEST_CASE("lecun init")
{
    const MlpShape sh{2, 10, 7};
    const MlpParams a = lecun_init(sh, 42), b = lecun_init(sh, 42);
    CHECK(a.values == b.values);
    CHECK(lecun_init(sh, 43).values != a.values);
    for (int r = 0; r < 10; ++r) {
        CHECK(a.b1(r) == 0.0);
        CHECK(a.b2(r) == 0.0);
    }
    CHECK(a.size() == 2 * 10 + 10 + 100 + 10 + 70);
    CHECK_THROWS_AS(lecun_init({0, 10, 3}, 1), ConfigError);
    CHECK_THROWS_AS(lecun_init({1, 10, 1}, 1), ConfigError);
}

TEST_CASE("lecun variance of the middle layer")
{
    double s = 0, s2 = 0;
    long n = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const MlpParams p = lecun_init({1, 10, 4}, seed);
        for (int r = 0; r < 10; ++r)
            for (int c = 0; c < 10; ++c) {
                s += p.W2(r, c);
                s2 += p.W2(r, c) * p.W2(r, c);
                ++n;
            }
    }
    const double mean = s / n, var = s2 / n - mean * mean;
    CHECK(std::abs(var - 0.1) < 0.015);
}

TEST_CASE("forward with zero or constant weights")
{
    MlpParams p({2, 10, 5});
    const MlpCache c = mlp_forward(p, std::vector<double>{0.3, -0.4});
    for (double l : c.logits)
        CHECK(l == 0.0);

    MlpParams q = lecun_init({2, 10, 5}, 1);
    for (int r = 0; r < 10; ++r) {
        for (int k = 0; k < 2; ++k)
            q.W1(r, k) = 0.0;
        q.b1(r) = 0.3;
        for (int k = 0; k < 5; ++k)
            q.W3(k, r) = 0.7;
    }
    const MlpCache cq = mlp_forward(q, std::vector<double>{0.9, 0.1});
    for (double l : cq.logits)
        CHECK(l == doctest::Approx(cq.logits[0]));
}

TEST_CASE("backward against finite differences")
{
    std::mt19937_64 rng(9);
    const MlpShape sh{2, 10, 6};
    MlpParams p = lecun_init(sh, 5);
    for (double& v : p.values)
        v += 0.1 * testing::gaussian_vector(rng, 1)[0];
    const std::vector<double> x{0.4, -0.7};
    const std::vector<double> w = testing::gaussian_vector(rng, sh.outputs);
    auto scalar = [&](const MlpParams& q, const std::vector<double>& in) {
        const MlpCache c = mlp_forward(q, in);
        double s = 0;
        for (int k = 0; k < sh.outputs; ++k)
            s += w[k] * c.logits[k];
        return s;
    };
    std::vector<double> grad(p.size(), 0.0);
    const std::vector<double> gin = mlp_backward(p, mlp_forward(p, x), w, grad);

    const auto fd = testing::central_fd(
        [&](const std::vector<double>& v) {
            MlpParams q = p;
            q.values = v;
            return scalar(q, x);
        },
        p.values, 1e-6);
    CHECK(testing::rel_diff(grad, fd) < 1e-6);
    const auto fdx = testing::central_fd([&](const std::vector<double>& in) { return scalar(p, in); }, x, 1e-6);
    CHECK(testing::rel_diff(gin, fdx) < 1e-6);

    // accumulation is linear
    std::vector<double> twice(p.size(), 0.0);
    mlp_backward(p, mlp_forward(p, x), w, twice);
    mlp_backward(p, mlp_forward(p, x), w, twice);
    for (std::size_t i = 0; i < grad.size(); ++i)
        CHECK(twice[i] == doctest::Approx(2 * grad[i]));

    std::vector<double> zero(p.size(), 0.0);
    mlp_backward(p, mlp_forward(p, x), std::vector<double>(sh.outputs, 0.0), zero);
    for (double g : zero)
        CHECK(g == 0.0);
}

TEST_CASE("schedule")
{
    LrSchedule s{{{0, 1e-2}, {20, 1e-3}}};
    CHECK(s.at(0) == 1e-2);
    CHECK(s.at(19) == 1e-2);
    CHECK(s.at(20) == 1e-3);
    CHECK(s.at(1000) == 1e-3);
    CHECK(LrSchedule{{{5, 1e-2}}}.at(0) == 1e-2);
    CHECK_THROWS_AS((LrSchedule{{{0, 1e-2}, {0, 1e-3}}}.validate()), ConfigError);
    CHECK_THROWS_AS((LrSchedule{{{0, -1.0}}}.validate()), ConfigError);
}

TEST_CASE("adam first step and zero gradient")
{
    AdamState a;
    a.schedule = {{{0, 1e-2}}};
    std::vector<double> x{1.0, -2.0, 3.0};
    a.step(x, std::vector<double>{0.5, -3.0, 1e-3}, 0);
    CHECK(x[0] == doctest::Approx(1.0 - 1e-2).epsilon(1e-6));
    CHECK(x[1] == doctest::Approx(-2.0 + 1e-2).epsilon(1e-6));
    CHECK(x[2] == doctest::Approx(3.0 - 1e-2 * 1e-3 / (1e-3 + 1e-8)).epsilon(1e-9));

    AdamState b;
    std::vector<double> y{1.0, 2.0};
    b.step(y, std::vector<double>{0.0, 0.0}, 0);
    CHECK(y == std::vector<double>{1.0, 2.0});
}

TEST_CASE("adam on a quadratic bowl")
{
    AdamState a;
    a.schedule = {{{0, 1e-2}}};
    std::vector<double> x{1.0, -0.5, 2.0, 0.3};
    for (int t = 0; t < 5000; ++t) {
        std::vector<double> g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            g[i] = 2 * x[i];
        a.step(x, g, 0);
    }
    CHECK(testing::norm(x) < 1e-3);
}

TEST_CASE("nesterov sgd descends")
{
    SgdNesterovState s;
    std::vector<double> x{1.0, -1.0};
    for (int t = 0; t < 2000; ++t)
        s.step(x, std::vector<double>{2 * x[0], 2 * x[1]}, 0);
    CHECK(testing::norm(x) < 1e-6);
}
