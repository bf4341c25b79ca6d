#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace rfem {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

/// Minimum admissible element length on an interval.
inline double min_element_length(const Interval& iv) { return 1e-10 * iv.length(); }

/// Trainable logits for one axis plus the fixed (non-adaptive) interior nodes.
struct MeshParams1D {
    std::vector<double> theta;
    std::vector<double> fixed_interior;
    Interval interval;

    /// Throws InvalidInput when the invariants do not hold.
    void validate() const;
};

enum class NodeOrigin : std::uint8_t { Endpoint, Adaptive, Fixed };

/// How the sorted node list was produced from the logits, for gradient pullback.
/// `source[p]` is the index of sorted node p in the unsorted list
/// [x_0, ..., x_n, fixed_0, ..., fixed_{m-1}].
struct ConstructionRecord {
    std::vector<double> delta;
    std::vector<NodeOrigin> origin;
    std::vector<int> source;

    bool empty() const { return source.empty(); }
};

struct Mesh1D {
    std::vector<double> nodes;
    ConstructionRecord record;

    int element_count() const { return static_cast<int>(nodes.size()) - 1; }
    int node_count() const { return static_cast<int>(nodes.size()); }
    double element_length(int e) const { return nodes[e + 1] - nodes[e]; }

    /// Mesh from explicit coordinates (no construction record). Throws
    /// DegenerateMesh when an element is shorter than the admissible minimum.
    static Mesh1D from_nodes(std::vector<double> nodes);
    static Mesh1D uniform(const Interval& iv, int elements);
};

struct TensorMesh2D {
    Mesh1D mesh_x;
    Mesh1D mesh_y;

    int nx() const { return mesh_x.element_count(); }
    int ny() const { return mesh_y.element_count(); }
    int node_count() const { return mesh_x.node_count() * mesh_y.node_count(); }
    int element_count() const { return nx() * ny(); }
    /// Global node id of grid point (i, j), x index fastest.
    int node_id(int i, int j) const { return j * mesh_x.node_count() + i; }
};

/// Numerically safe softmax (max subtraction). Throws InvalidInput on
/// non-finite entries.
std::vector<double> softmax_partition(std::span<const double> theta);

/// Vector-Jacobian product of the softmax: returns J_delta(theta)^T * grad_delta.
std::vector<double> softmax_vjp(std::span<const double> delta, std::span<const double> grad_delta);

Mesh1D build_mesh_1d(const MeshParams1D& params);
TensorMesh2D build_tensor_mesh_2d(const MeshParams1D& params_x, const MeshParams1D& params_y);

/// Gradient of a scalar with respect to the logits, given its gradient with
/// respect to all sorted node coordinates. Endpoint and fixed nodes contribute
/// nothing; x_n is pinned to b exactly.
std::vector<double> mesh_pullback(std::span<const double> grad_nodes,
                                  const ConstructionRecord& record,
                                  const MeshParams1D& params);

} // namespace rfem
