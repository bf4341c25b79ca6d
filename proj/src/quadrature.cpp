#include "rfem/quadrature.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "rfem/errors.hpp"

namespace rfem {

namespace {

// P_q(z) and P_q'(z) by the three-term recurrence.
std::pair<double, double> legendre(int q, double z)
{
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if (q == 0)
        return {1.0, 0.0};
    const double dp = q * (z * p1 - p0) / (z * z - 1.0);
    return {p1, dp};
}

} // namespace

QuadratureRule gauss_legendre(int q)
{
    if (q < 1 || q > kMaxQuadratureOrder)
        throw InvalidInput("Gauss-Legendre order " + std::to_string(q) + " outside [1, 64]");

    QuadratureRule rule;
    rule.points.resize(q);
    rule.weights.resize(q);
    const int half = (q + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre(q, z);
            dp = d;
            const double dz = p / d;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        dp = legendre(q, z).second;
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        // ascending order: the cosine guess starts at the largest root
        rule.points[q - 1 - i] = z;
        rule.points[i] = -z;
        rule.weights[q - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (q % 2 == 1)
        rule.points[q / 2] = 0.0;
    return rule;
}

const QuadratureRule& gauss_legendre_cached(int q)
{
    if (q < 1 || q > kMaxQuadratureOrder)
        throw InvalidInput("Gauss-Legendre order " + std::to_string(q) + " outside [1, 64]");
    static std::array<std::once_flag, kMaxQuadratureOrder + 1> flags;
    static std::array<std::unique_ptr<QuadratureRule>, kMaxQuadratureOrder + 1> rules;
    std::call_once(flags[q], [q] { rules[q] = std::make_unique<QuadratureRule>(gauss_legendre(q)); });
    return *rules[q];
}

} // namespace rfem
