#pragma once

#include <array>
#include <string>

#include "rfem/quadrature.hpp"

namespace rfem {

enum class ForcingFamily { Constant, Arctan1D, Power, SineMaterial, Arctan2D };
enum class IntegrationMode { Exact, Quadrature };

std::string to_string(ForcingFamily f);
ForcingFamily forcing_family_from_string(const std::string& s);

/// Forcing term f (and, for the 2D sigmoid, the manufactured Neumann flux).
///   Constant      f = value
///   Arctan1D      f = 2 a^3 (x-s) / (1 + a^2 (x-s)^2)^2
///   Power         f = p (1-p) x^(p-2)          (p = sigma)
///   SineMaterial  f = 4 pi^2 sin(2 pi x)
///   Arctan2D      f = w(x) u2(y) + u1(x) w(y)  with u_j, w built from (alpha, s_j)
struct LoadSpec {
    ForcingFamily family = ForcingFamily::Constant;
    double value = 1.0;
    double alpha = 10.0;
    double s = 0.5;
    double s1 = 0.5;
    double s2 = 0.5;
    double sigma = 1.0;
    IntegrationMode mode = IntegrationMode::Exact;
    int order = 2;

    bool has_exact_routine() const;
    /// Throws ConfigError for out-of-range parameters or a forbidden mode.
    void validate() const;
    bool operator==(const LoadSpec&) const = default;
};

/// Which local hat function of a 1D element.
enum class Hat { Falling, Rising };

// Pointwise data. Arctan2D callers use the 2D overloads.
double forcing(const LoadSpec& load, double x);
double forcing_dx(const LoadSpec& load, double x);
double forcing(const LoadSpec& load, double x, double y);
std::array<double, 2> forcing_grad(const LoadSpec& load, double x, double y);

/// Closed-form integral of f times one hat over (xl, xr).
double load_element_exact(const LoadSpec& load, double xl, double xr, Hat hat);
/// Both hats {falling, rising}. The falling value is +inf for the power family
/// at xl = 0 with sigma < 1 (the integral diverges there).
std::array<double, 2> load_element_exact(const LoadSpec& load, double xl, double xr);

/// q-point rule mapped to (xl, xr); {falling, rising}.
std::array<double, 2> load_element_quadrature(const LoadSpec& load, double xl, double xr,
                                              const QuadratureRule& rule);
/// Tensorised rule on [x0,x1]x[y0,y1]; local nodes counterclockwise from lower-left.
std::array<double, 4> load_element_quadrature(const LoadSpec& load, double x0, double x1, double y0,
                                              double y1, const QuadratureRule& rule);

/// 1D element load values and d[i][k] = dL_i / dx_k (k = 0 left, 1 right node).
struct ElementLoad1D {
    std::array<double, 2> value{};
    std::array<std::array<double, 2>, 2> d{};
};
ElementLoad1D element_load_1d(const LoadSpec& load, double xl, double xr, bool with_derivatives);

/// 2D element load values and d[i][k], k indexing (x0, x1, y0, y1).
struct ElementLoad2D {
    std::array<double, 4> value{};
    std::array<std::array<double, 4>, 4> d{};
};
ElementLoad2D element_load_2d(const LoadSpec& load, double x0, double x1, double y0, double y1,
                              bool with_derivatives);

/// Manufactured Neumann flux of the 2D sigmoid on x = 1 (right) or y = 1 (top),
/// integrated against the two edge hats with the load's quadrature order.
/// Returns values {low end, high end} and d[i][k] with k over (low, high) edge coords.
enum class Edge { Right, Top };
ElementLoad1D neumann_edge_2d(const LoadSpec& load, Edge edge, double lo, double hi, bool with_derivatives);

/// g * v(endpoint) for a 1D Neumann endpoint: the load entry of that node gains g.
inline double neumann_term(double g) { return g; }

struct ProblemSpec;

/// ||u||_b^2 of the exact solution. Throws Unsupported when no reference exists.
double exact_energy(const ProblemSpec& problem);
/// J(u) = -||u||_b^2 / 2.
inline double exact_ritz_energy(const ProblemSpec& problem) { return -0.5 * exact_energy(problem); }

// 1D sigmoid u(t) = atan(a (t - s)) + atan(a s) and helpers, shared with tests.
double sigmoid_u(double alpha, double s, double t);
double sigmoid_du(double alpha, double s, double t);
/// int_0^1 u'(t)^2 dt in closed form.
double sigmoid_gradient_energy(double alpha, double s);
/// int_0^1 u(t)^2 dt by composite Gauss-Legendre.
double sigmoid_l2_energy(double alpha, double s);

} // namespace rfem
