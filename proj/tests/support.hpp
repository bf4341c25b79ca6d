#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace testing {

inline std::vector<double> gaussian_vector(std::mt19937_64& rng, int n, double scale = 1.0)
{
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v)
        x = d(rng);
    return v;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Central differences of f at x, one coordinate at a time.
inline std::vector<double> central_fd(const std::function<double(const std::vector<double>&)>& f,
                                      std::vector<double> x, double step)
{
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double x0 = x[i];
        x[i] = x0 + step;
        const double fp = f(x);
        x[i] = x0 - step;
        const double fm = f(x);
        x[i] = x0;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

inline double norm(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v)
        s += x * x;
    return std::sqrt(s);
}

/// ||a - b|| / max(||b||, floor)
inline double rel_diff(std::span<const double> a, std::span<const double> b, double floor = 1e-300)
{
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(d) / std::max(norm(b), floor);
}

/// Adaptive Simpson, independent of the library's Gauss-Legendre code.
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol, int depth = 24)
{
    std::function<double(double, double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1)
                 + rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

/// Dense Cholesky solve, used as an oracle for the sparse paths.
inline std::vector<double> dense_spd_solve(std::vector<std::vector<double>> A, std::vector<double> b)
{
    const int n = static_cast<int>(b.size());
    for (int j = 0; j < n; ++j) {
        double d = A[j][j];
        for (int k = 0; k < j; ++k)
            d -= A[j][k] * A[j][k];
        A[j][j] = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = A[i][j];
            for (int k = 0; k < j; ++k)
                s -= A[i][k] * A[j][k];
            A[i][j] = s / A[j][j];
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < i; ++k)
            b[i] -= A[i][k] * b[k];
        b[i] /= A[i][i];
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k)
            b[i] -= A[k][i] * b[k];
        b[i] /= A[i][i];
    }
    return b;
}

} // namespace testing
