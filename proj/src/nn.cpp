#include "rfem/nn.hpp"

#include <cmath>
#include <random>

#include "rfem/errors.hpp"

namespace rfem {

MlpParams::MlpParams(MlpShape s) : shape(s)
{
    values.assign(static_cast<std::size_t>(s.hidden) * s.inputs + s.hidden + s.hidden * s.hidden + s.hidden
                      + static_cast<std::size_t>(s.outputs) * s.hidden,
                  0.0);
}

MlpParams lecun_init(MlpShape shape, std::uint64_t seed)
{
    if (shape.inputs < 1 || shape.outputs < 2 || shape.hidden < 1)
        throw InvalidInput("network needs >= 1 input, >= 1 hidden unit and >= 2 outputs");
    MlpParams p(shape);
    std::mt19937_64 rng(seed);
    auto fill = [&](std::size_t offset, std::size_t count, int fan_in) {
        std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(fan_in)));
        for (std::size_t k = 0; k < count; ++k)
            p.values[offset + k] = dist(rng);
    };
    fill(p.offset_W1(), static_cast<std::size_t>(shape.hidden) * shape.inputs, shape.inputs);
    fill(p.offset_W2(), static_cast<std::size_t>(shape.hidden) * shape.hidden, shape.hidden);
    fill(p.offset_W3(), static_cast<std::size_t>(shape.outputs) * shape.hidden, shape.hidden);
    return p;
}

MlpCache mlp_forward(const MlpParams& p, std::span<const double> input)
{
    const MlpShape& s = p.shape;
    if (static_cast<int>(input.size()) != s.inputs)
        throw InvalidInput("network input has the wrong size");
    MlpCache c;
    c.input.assign(input.begin(), input.end());
    c.z1.resize(s.hidden);
    c.z2.resize(s.hidden);
    c.logits.resize(s.outputs);
    for (int r = 0; r < s.hidden; ++r) {
        double a = p.b1(r);
        for (int k = 0; k < s.inputs; ++k)
            a += p.W1(r, k) * input[k];
        c.z1[r] = std::tanh(a);
    }
    for (int r = 0; r < s.hidden; ++r) {
        double a = p.b2(r);
        for (int k = 0; k < s.hidden; ++k)
            a += p.W2(r, k) * c.z1[k];
        c.z2[r] = std::tanh(a);
    }
    for (int r = 0; r < s.outputs; ++r) {
        double a = 0.0;
        for (int k = 0; k < s.hidden; ++k)
            a += p.W3(r, k) * c.z2[k];
        c.logits[r] = a;
    }
    return c;
}

std::vector<double> mlp_backward(const MlpParams& p, const MlpCache& c, std::span<const double> gl,
                                 std::span<double> grad)
{
    const MlpShape& s = p.shape;
    if (static_cast<int>(gl.size()) != s.outputs || grad.size() != p.size())
        throw InvalidInput("backward pass: size mismatch");

    std::vector<double> g2(s.hidden, 0.0);
    for (int r = 0; r < s.outputs; ++r)
        for (int k = 0; k < s.hidden; ++k) {
            grad[p.offset_W3() + r * s.hidden + k] += gl[r] * c.z2[k];
            g2[k] += p.W3(r, k) * gl[r];
        }
    // through tanh: 1 - z^2
    for (int k = 0; k < s.hidden; ++k)
        g2[k] *= 1.0 - c.z2[k] * c.z2[k];

    std::vector<double> g1(s.hidden, 0.0);
    for (int r = 0; r < s.hidden; ++r) {
        grad[p.offset_b2() + r] += g2[r];
        for (int k = 0; k < s.hidden; ++k) {
            grad[p.offset_W2() + r * s.hidden + k] += g2[r] * c.z1[k];
            g1[k] += p.W2(r, k) * g2[r];
        }
    }
    for (int k = 0; k < s.hidden; ++k)
        g1[k] *= 1.0 - c.z1[k] * c.z1[k];

    std::vector<double> gin(s.inputs, 0.0);
    for (int r = 0; r < s.hidden; ++r) {
        grad[p.offset_b1() + r] += g1[r];
        for (int k = 0; k < s.inputs; ++k) {
            grad[p.offset_W1() + r * s.inputs + k] += g1[r] * c.input[k];
            gin[k] += p.W1(r, k) * g1[r];
        }
    }
    return gin;
}

double LrSchedule::at(int epoch) const
{
    double lr = steps.empty() ? 0.0 : steps.front().second;
    for (const auto& [e, rate] : steps)
        if (epoch >= e)
            lr = rate;
    return lr;
}

void LrSchedule::validate() const
{
    if (steps.empty())
        throw ConfigError("learning-rate schedule is empty");
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!(steps[i].second > 0.0))
            throw ConfigError("learning rates must be positive");
        if (i > 0 && steps[i].first <= steps[i - 1].first)
            throw ConfigError("schedule thresholds must be strictly increasing");
    }
}

void AdamState::step(std::span<double> params, std::span<const double> grads, int epoch)
{
    if (params.size() != grads.size())
        throw InvalidInput("Adam: parameter and gradient sizes differ");
    if (m.empty()) {
        m.assign(params.size(), 0.0);
        v.assign(params.size(), 0.0);
    }
    if (m.size() != params.size())
        throw InvalidInput("Adam: state does not match the parameters");
    ++t;
    const double lr = schedule.at(epoch);
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double mh = m[i] / c1;
        const double vh = v[i] / c2;
        params[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
}

void SgdNesterovState::step(std::span<double> params, std::span<const double> grads, int epoch)
{
    if (params.size() != grads.size())
        throw InvalidInput("SGD: parameter and gradient sizes differ");
    if (velocity.empty())
        velocity.assign(params.size(), 0.0);
    const double lr = schedule.at(epoch);
    for (std::size_t i = 0; i < params.size(); ++i) {
        velocity[i] = momentum * velocity[i] + grads[i];
        params[i] -= lr * (grads[i] + momentum * velocity[i]);
    }
}

} // namespace rfem
