#include "rfem/solver.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "rfem/errors.hpp"

namespace rfem {

std::string to_string(SolveMethod m)
{
    switch (m) {
    case SolveMethod::Auto:
        return "auto";
    case SolveMethod::Direct:
        return "direct";
    case SolveMethod::CG:
        return "cg";
    }
    return "unknown";
}

SolveMethod solve_method_from_string(const std::string& s)
{
    for (auto m : {SolveMethod::Auto, SolveMethod::Direct, SolveMethod::CG})
        if (to_string(m) == s)
            return m;
    throw ConfigError("unknown solver '" + s + "'");
}

namespace {

double norm2(const std::vector<double>& v) { return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)); }

std::vector<double> residual(const SparseSystem& sys, const std::vector<double>& c)
{
    std::vector<double> r = sys.B.multiply(c);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = sys.ell[i] - r[i];
    return r;
}

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

SolveReport solve_direct(const SparseSystem& sys)
{
    const CsrMatrix& B = sys.B;
    // CSR of a symmetric matrix read as CSC is the same matrix
    Eigen::Map<const SpMat> A(B.n, B.n, B.nnz(), B.row_ptr.data(), B.col.data(), B.val.data());
    Eigen::SimplicialLLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> llt(A);
    if (llt.info() != Eigen::Success)
        throw SingularSystem("sparse Cholesky factorisation failed (matrix not positive definite)",
                             std::numeric_limits<double>::infinity());

    Eigen::Map<const Eigen::VectorXd> rhs(sys.ell.data(), B.n);
    SolveReport rep;
    rep.method = SolveMethod::Direct;
    rep.c.resize(B.n);
    Eigen::Map<Eigen::VectorXd> c(rep.c.data(), B.n);
    c = llt.solve(rhs);

    const double lnorm = norm2(sys.ell);
    std::vector<double> r = residual(sys, rep.c);
    double rnorm = norm2(r);
    // a couple of refinement sweeps for badly scaled systems
    for (int sweep = 0; sweep < 2 && rnorm > kSolveTolerance * lnorm; ++sweep) {
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), B.n);
        c += llt.solve(rv);
        r = residual(sys, rep.c);
        rnorm = norm2(r);
    }
    rep.residual_norm = rnorm;
    rep.relative_residual = lnorm > 0.0 ? rnorm / lnorm : rnorm;
    return rep;
}

SolveReport solve_cg(const SparseSystem& sys)
{
    const CsrMatrix& B = sys.B;
    const int n = B.n;
    std::vector<double> inv_diag(n);
    for (int i = 0; i < n; ++i) {
        const double d = B.at(i, i);
        if (!(d > 0.0))
            throw SingularSystem("non-positive diagonal entry in CG preconditioner", norm2(sys.ell));
        inv_diag[i] = 1.0 / d;
    }

    SolveReport rep;
    rep.method = SolveMethod::CG;
    rep.c.assign(n, 0.0);
    const double lnorm = norm2(sys.ell);
    if (lnorm == 0.0)
        return rep;

    std::vector<double> r = sys.ell;
    std::vector<double> z(n), p(n), q(n);
    for (int i = 0; i < n; ++i)
        z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
    double best = lnorm;
    const int max_iter = 20 * n;
    int it = 0;
    while (it < max_iter) {
        B.multiply(p, q);
        const double pq = std::inner_product(p.begin(), p.end(), q.begin(), 0.0);
        if (!(pq > 0.0))
            throw SingularSystem("CG breakdown: matrix not positive definite", best);
        const double step = rz / pq;
        for (int i = 0; i < n; ++i) {
            rep.c[i] += step * p[i];
            r[i] -= step * q[i];
        }
        ++it;
        const double rn = norm2(r);
        best = std::min(best, rn);
        if (rn <= kCgTolerance * lnorm)
            break;
        for (int i = 0; i < n; ++i)
            z[i] = inv_diag[i] * r[i];
        const double rz_new = std::inner_product(r.begin(), r.end(), z.begin(), 0.0);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    rep.iterations = it;
    // recurrence residual drifts; report the true one
    rep.residual_norm = norm2(residual(sys, rep.c));
    rep.relative_residual = rep.residual_norm / lnorm;
    return rep;
}

} // namespace

SolveReport solve_spd(const SparseSystem& system, SolveMethod method)
{
    const int n = system.B.n;
    if (static_cast<int>(system.ell.size()) != n)
        throw InvalidInput("load vector does not match the matrix");
    for (double v : system.ell)
        if (!std::isfinite(v))
            throw InvalidInput("load vector has non-finite entries");
    if (n == 0)
        return {};
    if (method == SolveMethod::Auto)
        method = n <= kDirectSolveLimit ? SolveMethod::Direct : SolveMethod::CG;

    SolveReport rep = method == SolveMethod::Direct ? solve_direct(system) : solve_cg(system);
    if (!(rep.relative_residual <= kSolveTolerance))
        throw SingularSystem(to_string(method) + " solve missed the residual contract (relative residual "
                                 + num(rep.relative_residual) + ")",
                             rep.residual_norm);
    return rep;
}

} // namespace rfem
