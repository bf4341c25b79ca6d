#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rfem {

/// P -> hidden (tanh) -> hidden (tanh) -> n, no output bias.
struct MlpShape {
    int inputs = 1;
    int hidden = 10;
    int outputs = 2;

    bool operator==(const MlpShape&) const = default;
};

/// All weights in one flat vector, row-major blocks W1 | b1 | W2 | b2 | W3.
struct MlpParams {
    MlpShape shape;
    std::vector<double> values;

    explicit MlpParams(MlpShape s = {});

    std::size_t size() const { return values.size(); }
    std::size_t offset_W1() const { return 0; }
    std::size_t offset_b1() const { return offset_W1() + shape.hidden * shape.inputs; }
    std::size_t offset_W2() const { return offset_b1() + shape.hidden; }
    std::size_t offset_b2() const { return offset_W2() + shape.hidden * shape.hidden; }
    std::size_t offset_W3() const { return offset_b2() + shape.hidden; }

    double& W1(int r, int c) { return values[offset_W1() + r * shape.inputs + c]; }
    double& b1(int r) { return values[offset_b1() + r]; }
    double& W2(int r, int c) { return values[offset_W2() + r * shape.hidden + c]; }
    double& b2(int r) { return values[offset_b2() + r]; }
    double& W3(int r, int c) { return values[offset_W3() + r * shape.hidden + c]; }
    double W1(int r, int c) const { return values[offset_W1() + r * shape.inputs + c]; }
    double b1(int r) const { return values[offset_b1() + r]; }
    double W2(int r, int c) const { return values[offset_W2() + r * shape.hidden + c]; }
    double b2(int r) const { return values[offset_b2() + r]; }
    double W3(int r, int c) const { return values[offset_W3() + r * shape.hidden + c]; }
};

/// Normal(0, 1/fan_in) weights, zero biases. Requires inputs >= 1, outputs >= 2.
MlpParams lecun_init(MlpShape shape, std::uint64_t seed);

struct MlpCache {
    std::vector<double> input;
    std::vector<double> z1;
    std::vector<double> z2;
    std::vector<double> logits;
};

MlpCache mlp_forward(const MlpParams& params, std::span<const double> input);
/// Adds d(grad_logits . logits)/d(params) into grad (same layout as params.values).
/// Returns the gradient with respect to the input.
std::vector<double> mlp_backward(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_logits,
                                 std::span<double> grad);

/// Piecewise-constant learning rate: entry (e, lr) applies from epoch e on.
struct LrSchedule {
    std::vector<std::pair<int, double>> steps{{0, 1e-2}};

    double at(int epoch) const;
    void validate() const;
    bool operator==(const LrSchedule&) const = default;
};

struct AdamState {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long t = 0;
    std::vector<double> m;
    std::vector<double> v;
    LrSchedule schedule;

    /// One bias-corrected step with the schedule's rate for `epoch`.
    void step(std::span<double> params, std::span<const double> grads, int epoch);
};

/// SGD with Nesterov momentum (comparison variant).
struct SgdNesterovState {
    double momentum = 0.95;
    std::vector<double> velocity;
    LrSchedule schedule{{{0, 1e-2}}};

    void step(std::span<double> params, std::span<const double> grads, int epoch);
};

} // namespace rfem
