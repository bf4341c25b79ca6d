#include "rfem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rfem/errors.hpp"

namespace rfem {

namespace {

void check_lengths(std::span<const double> nodes, double eps)
{
    for (std::size_t e = 0; e + 1 < nodes.size(); ++e) {
        const double h = nodes[e + 1] - nodes[e];
        if (!(h >= eps)) {
            throw DegenerateMesh("element " + std::to_string(e) + " has length " + num(h)
                                     + " below the minimum " + num(eps),
                                 static_cast<int>(e));
        }
    }
}

} // namespace

void MeshParams1D::validate() const
{
    if (theta.empty())
        throw InvalidInput("mesh parameters need at least one logit");
    if (!(interval.lo < interval.hi))
        throw InvalidInput("mesh interval must satisfy a < b");
    for (std::size_t i = 0; i < fixed_interior.size(); ++i) {
        const double x = fixed_interior[i];
        if (!(x > interval.lo && x < interval.hi))
            throw InvalidInput("fixed node " + num(x) + " is not strictly inside the interval");
        if (i > 0 && !(x > fixed_interior[i - 1]))
            throw InvalidInput("fixed nodes must be strictly increasing");
    }
}

Mesh1D Mesh1D::from_nodes(std::vector<double> nodes)
{
    if (nodes.size() < 2)
        throw InvalidInput("a mesh needs at least two nodes");
    const Interval iv{nodes.front(), nodes.back()};
    if (!(iv.lo < iv.hi))
        throw InvalidInput("mesh nodes must be increasing");
    check_lengths(nodes, min_element_length(iv));
    Mesh1D m;
    m.nodes = std::move(nodes);
    return m;
}

Mesh1D Mesh1D::uniform(const Interval& iv, int elements)
{
    if (elements < 1)
        throw InvalidInput("uniform mesh needs at least one element");
    std::vector<double> x(elements + 1);
    for (int i = 0; i <= elements; ++i)
        x[i] = iv.lo + iv.length() * static_cast<double>(i) / elements;
    x.back() = iv.hi;
    return from_nodes(std::move(x));
}

std::vector<double> softmax_partition(std::span<const double> theta)
{
    if (theta.empty())
        throw InvalidInput("softmax of an empty vector");
    double m = -std::numeric_limits<double>::infinity();
    for (double t : theta) {
        if (!std::isfinite(t))
            throw InvalidInput("non-finite logit");
        m = std::max(m, t);
    }
    std::vector<double> delta(theta.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        delta[i] = std::exp(theta[i] - m);
        sum += delta[i];
    }
    for (double& d : delta)
        d /= sum;
    return delta;
}

std::vector<double> softmax_vjp(std::span<const double> delta, std::span<const double> grad_delta)
{
    double inner = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i)
        inner += delta[i] * grad_delta[i];
    std::vector<double> g(delta.size());
    for (std::size_t j = 0; j < delta.size(); ++j)
        g[j] = delta[j] * (grad_delta[j] - inner);
    return g;
}

Mesh1D build_mesh_1d(const MeshParams1D& params)
{
    params.validate();
    const int n = static_cast<int>(params.theta.size());
    const int m = static_cast<int>(params.fixed_interior.size());
    const double a = params.interval.lo;
    const double b = params.interval.hi;

    Mesh1D mesh;
    mesh.record.delta = softmax_partition(params.theta);

    // unsorted list: adaptive x_0..x_n followed by the fixed nodes
    std::vector<double> raw(n + 1 + m);
    raw[0] = a;
    for (int i = 1; i < n; ++i)
        raw[i] = raw[i - 1] + (b - a) * mesh.record.delta[i - 1];
    raw[n] = b;
    std::copy(params.fixed_interior.begin(), params.fixed_interior.end(), raw.begin() + n + 1);

    // both runs are already sorted, so a stable merge of index ranges suffices
    std::vector<int> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::inplace_merge(order.begin(), order.begin() + n + 1, order.end(),
                       [&](int l, int r) { return raw[l] < raw[r]; });

    mesh.nodes.resize(raw.size());
    mesh.record.source = order;
    mesh.record.origin.resize(raw.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        const int s = order[p];
        mesh.nodes[p] = raw[s];
        if (s == 0 || s == n)
            mesh.record.origin[p] = NodeOrigin::Endpoint;
        else if (s < n)
            mesh.record.origin[p] = NodeOrigin::Adaptive;
        else
            mesh.record.origin[p] = NodeOrigin::Fixed;
    }
    check_lengths(mesh.nodes, min_element_length(params.interval));
    return mesh;
}

TensorMesh2D build_tensor_mesh_2d(const MeshParams1D& params_x, const MeshParams1D& params_y)
{
    return TensorMesh2D{build_mesh_1d(params_x), build_mesh_1d(params_y)};
}

std::vector<double> mesh_pullback(std::span<const double> grad_nodes,
                                  const ConstructionRecord& record,
                                  const MeshParams1D& params)
{
    const int n = static_cast<int>(params.theta.size());
    if (record.empty() || grad_nodes.size() != record.source.size()
        || record.delta.size() != params.theta.size())
        throw InvalidInput("mesh_pullback: gradient length does not match the construction record");

    // undo the sort; only adaptive x_1..x_{n-1} depend on theta
    std::vector<double> grad_adaptive(n + 1, 0.0);
    for (std::size_t p = 0; p < grad_nodes.size(); ++p) {
        if (record.origin[p] == NodeOrigin::Adaptive)
            grad_adaptive[record.source[p]] = grad_nodes[p];
    }

    // x_k = a + (b-a) * sum_{i<=k} delta_i  =>  suffix sums
    const double scale = params.interval.length();
    std::vector<double> grad_delta(n, 0.0);
    double suffix = 0.0;
    for (int k = n - 1; k >= 1; --k) {
        suffix += grad_adaptive[k];
        grad_delta[k - 1] = scale * suffix;
    }
    return softmax_vjp(record.delta, grad_delta);
}

} // namespace rfem
