#pragma once

#include <array>
#include <span>
#include <vector>

#include "rfem/integration.hpp"
#include "rfem/mesh.hpp"
#include "rfem/problem.hpp"

namespace rfem {

/// Free / Dirichlet split of the mesh nodes. Free DOFs are numbered 0..|free|-1
/// in ascending node order.
struct DofLabeling {
    std::vector<int> free;
    std::vector<int> dirichlet;
    std::vector<double> dirichlet_values; // parallel to `dirichlet`
    std::vector<int> dof_of_node;         // -1 for Dirichlet nodes
    int node_count = 0;

    int dof_count() const { return static_cast<int>(free.size()); }
    bool is_free(int node) const { return dof_of_node[node] >= 0; }
};

/// Square CSR matrix with both triangles stored.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> col;
    std::vector<double> val;

    struct Triplet {
        int row;
        int col;
        double value;
    };
    /// Sums duplicates; column indices sorted within each row.
    static CsrMatrix from_triplets(int n, std::vector<Triplet> triplets);
    static CsrMatrix identity(int n);

    int nnz() const { return static_cast<int>(col.size()); }
    double at(int i, int j) const;
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    /// max |B_ij - B_ji| over stored entries.
    double asymmetry() const;
};

struct SparseSystem {
    CsrMatrix B;
    std::vector<double> ell;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;
using Matrix4 = std::array<std::array<double, 4>, 4>;

/// (coeff/h) [[1,-1],[-1,1]]. Throws DegenerateMesh below the minimum length.
Matrix2 element_stiffness_1d(double x_left, double x_right, double coeff);
/// Bilinear Laplace stiffness on an hx x hy rectangle, local nodes
/// counterclockwise from lower-left.
Matrix4 element_stiffness_quad(double hx, double hy, double coeff);

DofLabeling label_dirichlet(const Mesh1D& mesh, BoundarySpec spec);
DofLabeling label_dirichlet(const TensorMesh2D& mesh, BoundarySpec spec);

/// Coordinate tolerance used for boundary masks and interface checks.
inline constexpr double kCoordinateTol = 1e-12;

/// 1D system. `neumann_g` is added to the load of the right endpoint when that
/// node is free.
SparseSystem assemble_system(const Mesh1D& mesh, const DofLabeling& labeling, const MaterialField& material,
                             const LoadSpec& load, double neumann_g = 0.0);
/// 2D system. For the 2D sigmoid the manufactured flux is added on free nodes
/// of the right and top edges.
SparseSystem assemble_system(const TensorMesh2D& mesh, const DofLabeling& labeling, const MaterialField& material,
                             const LoadSpec& load);

/// Gradient of 1/2 c^T B c - l.c with c frozen, per node coordinate.
/// In 2D `x` and `y` hold the gradients with respect to the two axis node lists.
struct NodeGradient {
    std::vector<double> x;
    std::vector<double> y;
};

NodeGradient assembly_gradient_contraction(const Mesh1D& mesh, const DofLabeling& labeling,
                                           const MaterialField& material, const LoadSpec& load,
                                           std::span<const double> c);
NodeGradient assembly_gradient_contraction(const TensorMesh2D& mesh, const DofLabeling& labeling,
                                           const MaterialField& material, const LoadSpec& load,
                                           std::span<const double> c);

/// Throws ConfigError when an interior material-region boundary is not a mesh line.
void check_material_resolved(const Mesh1D& mesh, const MaterialField& material);
void check_material_resolved(const TensorMesh2D& mesh, const MaterialField& material);

} // namespace rfem
