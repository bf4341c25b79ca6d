#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rfem/integration.hpp"
#include "rfem/mesh.hpp"

namespace rfem {

/// Benchmark families. Constant1D is the toy Poisson problem
/// -u'' = f, u(0) = 0, u'(1) = g used for hand-checkable runs; it is not part
/// of the five-entry registry.
enum class Family { Arctan1D, Power, TwoMaterial, Arctan2D, LShape, Constant1D };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

enum class BoundarySpec {
    Left1D,       // u(a) = 0, natural condition at b
    Both1D,       // u(a) = u(b) = 0
    LeftBottom2D, // x = a or y = a Dirichlet, right/top natural
    All2D,        // whole boundary Dirichlet
    LShape2D      // whole boundary plus the quadrant x >= 0.5, y <= 0.5
};

std::string to_string(BoundarySpec b);
BoundarySpec boundary_from_string(const std::string& s);

/// Axis-aligned box; in 1D the y range is ignored.
struct Region {
    double x0 = 0.0, x1 = 1.0;
    double y0 = 0.0, y1 = 1.0;
    double value = 1.0;
    bool operator==(const Region&) const = default;
};

/// Piecewise-constant coefficient: first region containing the point wins,
/// otherwise the default value.
struct MaterialField {
    double default_value = 1.0;
    std::vector<Region> regions;

    double at(double x, double y = 0.0) const;
    void validate() const;
    bool operator==(const MaterialField&) const = default;
};

enum class ReferenceSource { Analytic, Quadrature, Table, None };
std::string to_string(ReferenceSource r);

struct ProblemSpec {
    Family family = Family::Arctan1D;
    int dim = 1;
    Interval domain_x;
    Interval domain_y;
    BoundarySpec boundary = BoundarySpec::Left1D;
    MaterialField material;
    LoadSpec load;
    double neumann_g = 0.0; // 1D natural endpoint flux
    std::vector<double> sigma;
    int elements = 16; // per axis
    std::vector<double> fixed_x;
    std::vector<double> fixed_y;
    ReferenceSource reference = ReferenceSource::Analytic;

    /// Adaptive (softmax) intervals per axis: elements minus fixed nodes.
    int adaptive_x() const { return elements - static_cast<int>(fixed_x.size()); }
    int adaptive_y() const { return elements - static_cast<int>(fixed_y.size()); }
    int logit_count() const { return dim == 1 ? adaptive_x() : adaptive_x() + adaptive_y(); }

    /// Throws ConfigError when fields are inconsistent with the family.
    void validate() const;
    bool operator==(const ProblemSpec&) const = default;
};

/// Parameter tuple arity and defaults.
int parameter_count(Family f);
std::vector<double> default_parameters(Family f);

/// Fully populated problem for a family at parameters sigma with N elements per axis.
ProblemSpec make_problem(Family f, std::vector<double> sigma, int elements);
inline ProblemSpec make_problem(Family f, int elements) { return make_problem(f, default_parameters(f), elements); }

/// The five benchmark templates at their default parameters.
std::vector<ProblemSpec> registry();

/// Mesh parameters for logits theta (size logit_count()), split per axis.
MeshParams1D axis_params(const ProblemSpec& p, int axis, std::vector<double> theta);

// L-shape reference energies J(u), keyed by (sigma1, sigma2).
struct ReferenceEntry {
    double sigma1;
    double sigma2;
    double J;
};

/// Published reference for sigma = (1, 1).
inline constexpr double kLShapeReferenceJ = -0.00668986;

std::vector<ReferenceEntry> read_reference_table(const std::string& path);
void write_reference_table(const std::string& path, const std::vector<ReferenceEntry>& rows);

/// Path of the shipped table (RFEM_LSHAPE_TABLE overrides).
std::string default_reference_table_path();
/// J(u) for the L-shape at (s1, s2), or nullopt when neither the published
/// value nor the table covers it.
std::optional<double> lshape_reference(double sigma1, double sigma2);

} // namespace rfem
