#include "rfem/integration.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "rfem/errors.hpp"

namespace rfem {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sigmoid {
    double alpha;
    double s;
    double u(double t) const { return std::atan(alpha * (t - s)) + std::atan(alpha * s); }
    double du(double t) const
    {
        const double z = alpha * (t - s);
        return alpha / (1.0 + z * z);
    }
    // w = -u''
    double w(double t) const
    {
        const double z = alpha * (t - s);
        const double d = 1.0 + z * z;
        return 2.0 * alpha * alpha * z / (d * d);
    }
    double dw(double t) const
    {
        const double z = alpha * (t - s);
        const double d = 1.0 + z * z;
        return 2.0 * alpha * alpha * alpha * (1.0 - 3.0 * z * z) / (d * d * d);
    }
};

// Every exact 1D family is written as f = -W''. With D = (W(xr) - W(xl)) / h
// the hat integrals are L_falling = W'(xl) - D and L_rising = D - W'(xr).
struct Potential {
    double dW_left;
    double dW_right;
    double quotient;
};

Potential potential(const LoadSpec& load, double xl, double xr)
{
    const double h = xr - xl;
    switch (load.family) {
    case ForcingFamily::Constant: {
        // W = -c x^2 / 2
        const double c = load.value;
        return {-c * xl, -c * xr, -0.5 * c * (xl + xr)};
    }
    case ForcingFamily::Arctan1D: {
        const Sigmoid sg{load.alpha, load.s};
        const double zl = load.alpha * (xl - load.s);
        const double zr = load.alpha * (xr - load.s);
        // atan difference without cancellation when both arguments are on the same branch
        const double den = 1.0 + zl * zr;
        const double datan = den > 0.0 ? std::atan((zr - zl) / den) : std::atan(zr) - std::atan(zl);
        return {sg.du(xl), sg.du(xr), datan / h};
    }
    case ForcingFamily::Power: {
        const double p = load.sigma;
        const double dl = xl > 0.0 ? p * std::pow(xl, p - 1.0) : (p < 1.0 ? kInf : (p == 1.0 ? 1.0 : 0.0));
        const double dr = p * std::pow(xr, p - 1.0);
        const double diff = xl > 0.0 ? std::pow(xl, p) * std::expm1(p * std::log1p(h / xl)) : std::pow(xr, p);
        return {dl, dr, diff / h};
    }
    case ForcingFamily::SineMaterial: {
        const double tau = 2.0 * kPi;
        const double diff = 2.0 * std::cos(kPi * (xl + xr)) * std::sin(kPi * h);
        return {tau * std::cos(tau * xl), tau * std::cos(tau * xr), diff / h};
    }
    case ForcingFamily::Arctan2D:
        break;
    }
    throw Unsupported("forcing family " + to_string(load.family) + " has no exact 1D routine");
}

// value and x-derivative of a 1D forcing at a point
std::pair<double, double> forcing_1d(const LoadSpec& load, double x)
{
    switch (load.family) {
    case ForcingFamily::Constant:
        return {load.value, 0.0};
    case ForcingFamily::Arctan1D: {
        const Sigmoid sg{load.alpha, load.s};
        return {sg.w(x), sg.dw(x)};
    }
    case ForcingFamily::Power: {
        const double p = load.sigma;
        const double c = p * (1.0 - p);
        return {c * std::pow(x, p - 2.0), c * (p - 2.0) * std::pow(x, p - 3.0)};
    }
    case ForcingFamily::SineMaterial: {
        const double tau = 2.0 * kPi;
        return {tau * tau * std::sin(tau * x), tau * tau * tau * std::cos(tau * x)};
    }
    case ForcingFamily::Arctan2D:
        break;
    }
    throw Unsupported("forcing family " + to_string(load.family) + " is not one-dimensional");
}

// hat loads of an arbitrary integrand g with derivative dg under a q-point rule
template <typename G, typename DG>
ElementLoad1D hat_loads_quadrature(G&& g, DG&& dg, double xl, double xr, const QuadratureRule& rule,
                                   bool with_derivatives)
{
    ElementLoad1D out;
    const double h = xr - xl;
    std::array<std::array<double, 2>, 2> moment{}; // moment[i][k] = sum w g' phi_k phi_i
    for (int q = 0; q < rule.order(); ++q) {
        const double xi = rule.points[q];
        const double w = rule.weights[q];
        const double x = xl + 0.5 * h * (1.0 + xi);
        const std::array<double, 2> phi{0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
        const double gv = g(x);
        out.value[0] += w * gv * phi[0];
        out.value[1] += w * gv * phi[1];
        if (with_derivatives) {
            const double dv = dg(x);
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < 2; ++k)
                    moment[i][k] += w * dv * phi[k] * phi[i];
        }
    }
    out.value[0] *= 0.5 * h;
    out.value[1] *= 0.5 * h;
    if (with_derivatives) {
        for (int i = 0; i < 2; ++i) {
            out.d[i][0] = -out.value[i] / h + 0.5 * h * moment[i][0];
            out.d[i][1] = out.value[i] / h + 0.5 * h * moment[i][1];
        }
    }
    return out;
}

// Separable 2D forcing: f(x, y) = sum_t X_t(x) Y_t(y).
struct SeparableTerm {
    std::function<double(double)> X, dX, Y, dY;
};

} // namespace

std::string to_string(ForcingFamily f)
{
    switch (f) {
    case ForcingFamily::Constant:
        return "constant";
    case ForcingFamily::Arctan1D:
        return "arctan1d";
    case ForcingFamily::Power:
        return "power";
    case ForcingFamily::SineMaterial:
        return "sine_material";
    case ForcingFamily::Arctan2D:
        return "arctan2d";
    }
    return "unknown";
}

ForcingFamily forcing_family_from_string(const std::string& s)
{
    for (auto f : {ForcingFamily::Constant, ForcingFamily::Arctan1D, ForcingFamily::Power,
                   ForcingFamily::SineMaterial, ForcingFamily::Arctan2D})
        if (to_string(f) == s)
            return f;
    throw ConfigError("unknown forcing family '" + s + "'");
}

bool LoadSpec::has_exact_routine() const { return family != ForcingFamily::Arctan2D; }

void LoadSpec::validate() const
{
    if (mode == IntegrationMode::Quadrature && (order < 1 || order > kMaxQuadratureOrder))
        throw ConfigError("quadrature order must be in [1, 64]");
    if (mode == IntegrationMode::Exact && !has_exact_routine())
        throw ConfigError(to_string(family) + " has no exact integration routine; use quadrature");
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    switch (family) {
    case ForcingFamily::Constant:
    case ForcingFamily::SineMaterial:
        break;
    case ForcingFamily::Arctan1D:
        if (!(alpha > 0.0) || !in_unit(s))
            throw ConfigError("arctan1d needs alpha > 0 and s in (0,1)");
        break;
    case ForcingFamily::Power:
        if (!(sigma > 0.5))
            throw ConfigError("power family needs sigma > 0.5");
        if (mode != IntegrationMode::Exact)
            throw ConfigError("power family requires exact integration");
        break;
    case ForcingFamily::Arctan2D:
        if (!(alpha > 0.0) || !in_unit(s1) || !in_unit(s2))
            throw ConfigError("arctan2d needs alpha > 0 and s1, s2 in (0,1)");
        break;
    }
}

double forcing(const LoadSpec& load, double x) { return forcing_1d(load, x).first; }
double forcing_dx(const LoadSpec& load, double x) { return forcing_1d(load, x).second; }

double forcing(const LoadSpec& load, double x, double y)
{
    if (load.family == ForcingFamily::Constant)
        return load.value;
    if (load.family != ForcingFamily::Arctan2D)
        throw Unsupported(to_string(load.family) + " is not a 2D forcing");
    const Sigmoid a{load.alpha, load.s1};
    const Sigmoid b{load.alpha, load.s2};
    return a.w(x) * b.u(y) + a.u(x) * b.w(y);
}

std::array<double, 2> forcing_grad(const LoadSpec& load, double x, double y)
{
    if (load.family == ForcingFamily::Constant)
        return {0.0, 0.0};
    if (load.family != ForcingFamily::Arctan2D)
        throw Unsupported(to_string(load.family) + " is not a 2D forcing");
    const Sigmoid a{load.alpha, load.s1};
    const Sigmoid b{load.alpha, load.s2};
    return {a.dw(x) * b.u(y) + a.du(x) * b.w(y), a.w(x) * b.du(y) + a.u(x) * b.dw(y)};
}

std::array<double, 2> load_element_exact(const LoadSpec& load, double xl, double xr)
{
    const Potential p = potential(load, xl, xr);
    return {p.dW_left - p.quotient, p.quotient - p.dW_right};
}

double load_element_exact(const LoadSpec& load, double xl, double xr, Hat hat)
{
    const auto v = load_element_exact(load, xl, xr);
    return hat == Hat::Falling ? v[0] : v[1];
}

std::array<double, 2> load_element_quadrature(const LoadSpec& load, double xl, double xr,
                                              const QuadratureRule& rule)
{
    auto f = [&](double x) { return forcing(load, x); };
    return hat_loads_quadrature(f, f, xl, xr, rule, false).value;
}

ElementLoad1D element_load_1d(const LoadSpec& load, double xl, double xr, bool with_derivatives)
{
    if (load.mode == IntegrationMode::Quadrature) {
        auto f = [&](double x) { return forcing(load, x); };
        auto df = [&](double x) { return forcing_dx(load, x); };
        return hat_loads_quadrature(f, df, xl, xr, gauss_legendre_cached(load.order), with_derivatives);
    }
    ElementLoad1D out;
    out.value = load_element_exact(load, xl, xr);
    if (with_derivatives) {
        const double h = xr - xl;
        const double fl = forcing(load, xl);
        const double fr = forcing(load, xr);
        out.d[0][0] = -fl + out.value[0] / h;
        out.d[0][1] = out.value[1] / h;
        out.d[1][0] = -out.value[0] / h;
        out.d[1][1] = fr - out.value[1] / h;
    }
    return out;
}

namespace {

std::vector<SeparableTerm> separable_terms(const LoadSpec& load)
{
    if (load.family == ForcingFamily::Constant) {
        const double c = load.value;
        auto one = [](double) { return 1.0; };
        auto zero = [](double) { return 0.0; };
        return {SeparableTerm{[c](double) { return c; }, zero, one, zero}};
    }
    if (load.family != ForcingFamily::Arctan2D)
        throw Unsupported(to_string(load.family) + " is not a 2D forcing");
    const Sigmoid a{load.alpha, load.s1};
    const Sigmoid b{load.alpha, load.s2};
    return {SeparableTerm{[a](double x) { return a.w(x); }, [a](double x) { return a.dw(x); },
                          [b](double y) { return b.u(y); }, [b](double y) { return b.du(y); }},
            SeparableTerm{[a](double x) { return a.u(x); }, [a](double x) { return a.du(x); },
                          [b](double y) { return b.w(y); }, [b](double y) { return b.dw(y); }}};
}

// local node i -> (x hat, y hat), 0 falling / 1 rising, counterclockwise from lower-left
constexpr std::array<int, 4> kHatX{0, 1, 1, 0};
constexpr std::array<int, 4> kHatY{0, 0, 1, 1};

} // namespace

ElementLoad2D element_load_2d(const LoadSpec& load, double x0, double x1, double y0, double y1,
                              bool with_derivatives)
{
    const int order = load.mode == IntegrationMode::Quadrature ? load.order : 2;
    if (load.mode == IntegrationMode::Exact && load.family != ForcingFamily::Constant)
        throw Unsupported(to_string(load.family) + " has no exact 2D routine");
    const QuadratureRule& rule = gauss_legendre_cached(order);

    ElementLoad2D out;
    // The tensorised rule factorises over separable terms into products of
    // 1D hat moments, which is the same sum evaluated in O(q) per axis.
    for (const SeparableTerm& term : separable_terms(load)) {
        const ElementLoad1D mx = hat_loads_quadrature(term.X, term.dX, x0, x1, rule, with_derivatives);
        const ElementLoad1D my = hat_loads_quadrature(term.Y, term.dY, y0, y1, rule, with_derivatives);
        for (int i = 0; i < 4; ++i) {
            const int a = kHatX[i];
            const int b = kHatY[i];
            out.value[i] += mx.value[a] * my.value[b];
            if (with_derivatives) {
                out.d[i][0] += mx.d[a][0] * my.value[b];
                out.d[i][1] += mx.d[a][1] * my.value[b];
                out.d[i][2] += mx.value[a] * my.d[b][0];
                out.d[i][3] += mx.value[a] * my.d[b][1];
            }
        }
    }
    return out;
}

std::array<double, 4> load_element_quadrature(const LoadSpec& load, double x0, double x1, double y0,
                                              double y1, const QuadratureRule& rule)
{
    const double hx = x1 - x0;
    const double hy = y1 - y0;
    std::array<double, 4> out{};
    for (int p = 0; p < rule.order(); ++p) {
        const double xi = rule.points[p];
        const double x = x0 + 0.5 * hx * (1.0 + xi);
        const std::array<double, 2> px{0.5 * (1.0 - xi), 0.5 * (1.0 + xi)};
        for (int q = 0; q < rule.order(); ++q) {
            const double eta = rule.points[q];
            const double y = y0 + 0.5 * hy * (1.0 + eta);
            const std::array<double, 2> py{0.5 * (1.0 - eta), 0.5 * (1.0 + eta)};
            const double fw = rule.weights[p] * rule.weights[q] * forcing(load, x, y);
            for (int i = 0; i < 4; ++i)
                out[i] += fw * px[kHatX[i]] * py[kHatY[i]];
        }
    }
    for (double& v : out)
        v *= 0.25 * hx * hy;
    return out;
}

ElementLoad1D neumann_edge_2d(const LoadSpec& load, Edge edge, double lo, double hi, bool with_derivatives)
{
    if (load.family != ForcingFamily::Arctan2D)
        return {};
    const Sigmoid a{load.alpha, load.s1};
    const Sigmoid b{load.alpha, load.s2};
    const QuadratureRule& rule = gauss_legendre_cached(load.order);
    if (edge == Edge::Right) {
        // du/dx at x = 1: u1'(1) u2(y)
        const double c = a.du(1.0);
        return hat_loads_quadrature([&](double y) { return c * b.u(y); }, [&](double y) { return c * b.du(y); },
                                    lo, hi, rule, with_derivatives);
    }
    const double c = b.du(1.0);
    return hat_loads_quadrature([&](double x) { return c * a.u(x); }, [&](double x) { return c * a.du(x); }, lo,
                                hi, rule, with_derivatives);
}

double sigmoid_u(double alpha, double s, double t) { return Sigmoid{alpha, s}.u(t); }
double sigmoid_du(double alpha, double s, double t) { return Sigmoid{alpha, s}.du(t); }

double sigmoid_gradient_energy(double alpha, double s)
{
    auto prim = [](double z) { return z / (2.0 * (1.0 + z * z)) + 0.5 * std::atan(z); };
    return alpha * (prim(alpha * (1.0 - s)) - prim(-alpha * s));
}

double sigmoid_l2_energy(double alpha, double s)
{
    const Sigmoid sg{alpha, s};
    return integrate_composite([&](double t) { const double u = sg.u(t); return u * u; }, 0.0, 1.0, 512, 16);
}

} // namespace rfem
