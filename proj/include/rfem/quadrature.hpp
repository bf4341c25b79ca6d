#pragma once

#include <vector>

namespace rfem {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
    std::vector<double> points;
    std::vector<double> weights;

    int order() const { return static_cast<int>(points.size()); }
};

inline constexpr int kMaxQuadratureOrder = 64;

/// Nodes and weights by Newton iteration on P_q. Requires 1 <= q <= 64.
QuadratureRule gauss_legendre(int q);

/// Same rule, computed once per order and shared. Thread-safe.
const QuadratureRule& gauss_legendre_cached(int q);

/// Composite Gauss-Legendre over `panels` equal subintervals of [a, b].
template <typename F>
double integrate_composite(F&& f, double a, double b, int panels, int order)
{
    const QuadratureRule& rule = gauss_legendre_cached(order);
    const double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double mid = lo + 0.5 * h;
        double panel = 0.0;
        for (int q = 0; q < rule.order(); ++q)
            panel += rule.weights[q] * f(mid + 0.5 * h * rule.points[q]);
        total += 0.5 * h * panel;
    }
    return total;
}

} // namespace rfem
