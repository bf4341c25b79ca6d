#include "rfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rfem/errors.hpp"

namespace rfem {

// --- CSR -----------------------------------------------------------------------

CsrMatrix CsrMatrix::from_triplets(int n, std::vector<Triplet> triplets)
{
    CsrMatrix m;
    m.n = n;
    // counting sort by row, then sort and merge columns within each row
    std::vector<int> count(n + 1, 0);
    for (const Triplet& t : triplets) {
        if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
            throw InvalidInput("triplet index out of range");
        ++count[t.row + 1];
    }
    for (int i = 0; i < n; ++i)
        count[i + 1] += count[i];
    std::vector<std::pair<int, double>> sorted(triplets.size());
    std::vector<int> cursor(count.begin(), count.end() - 1);
    for (const Triplet& t : triplets)
        sorted[cursor[t.row]++] = {t.col, t.value};

    m.row_ptr.assign(n + 1, 0);
    m.col.reserve(triplets.size());
    m.val.reserve(triplets.size());
    for (int i = 0; i < n; ++i) {
        auto first = sorted.begin() + count[i];
        auto last = sorted.begin() + count[i + 1];
        std::sort(first, last, [](const auto& a, const auto& b) { return a.first < b.first; });
        for (auto it = first; it != last; ++it) {
            if (!m.col.empty() && static_cast<int>(m.col.size()) > m.row_ptr[i] && m.col.back() == it->first)
                m.val.back() += it->second;
            else {
                m.col.push_back(it->first);
                m.val.push_back(it->second);
            }
        }
        m.row_ptr[i + 1] = static_cast<int>(m.col.size());
    }
    return m;
}

CsrMatrix CsrMatrix::identity(int n)
{
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i)
        t.push_back({i, i, 1.0});
    return from_triplets(n, std::move(t));
}

double CsrMatrix::at(int i, int j) const
{
    auto first = col.begin() + row_ptr[i];
    auto last = col.begin() + row_ptr[i + 1];
    auto it = std::lower_bound(first, last, j);
    if (it != last && *it == j)
        return val[it - col.begin()];
    return 0.0;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            s += val[k] * x[col[k]];
        y[i] = s;
    }
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const
{
    std::vector<double> y(n);
    multiply(x, y);
    return y;
}

double CsrMatrix::asymmetry() const
{
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            worst = std::max(worst, std::abs(val[k] - at(col[k], i)));
    return worst;
}

// --- element routines -------------------------------------------------------------

namespace {

constexpr Matrix2 kK1{{{1.0, -1.0}, {-1.0, 1.0}}};
constexpr Matrix2 kM1{{{2.0 / 6.0, 1.0 / 6.0}, {1.0 / 6.0, 2.0 / 6.0}}};
constexpr std::array<int, 4> kHatX{0, 1, 1, 0};
constexpr std::array<int, 4> kHatY{0, 0, 1, 1};

void check_length(double h, double scale, int element)
{
    if (!(h >= 1e-10 * std::max(1.0, scale)))
        throw DegenerateMesh("element of length " + num(h) + " is degenerate", element);
}

// A = K1 (x) M1 and Bm = M1 (x) K1 in local node order
struct QuadParts {
    Matrix4 A{};
    Matrix4 B{};
};

const QuadParts& quad_parts()
{
    static const QuadParts parts = [] {
        QuadParts p;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                p.A[a][b] = kK1[kHatX[a]][kHatX[b]] * kM1[kHatY[a]][kHatY[b]];
                p.B[a][b] = kM1[kHatX[a]][kHatX[b]] * kK1[kHatY[a]][kHatY[b]];
            }
        return p;
    }();
    return parts;
}

std::vector<double> node_values(const DofLabeling& lab)
{
    std::vector<double> u0(lab.node_count, 0.0);
    for (std::size_t k = 0; k < lab.dirichlet.size(); ++k)
        u0[lab.dirichlet[k]] = lab.dirichlet_values[k];
    return u0;
}

DofLabeling from_mask(const std::vector<bool>& dirichlet)
{
    DofLabeling lab;
    lab.node_count = static_cast<int>(dirichlet.size());
    lab.dof_of_node.assign(lab.node_count, -1);
    for (int i = 0; i < lab.node_count; ++i) {
        if (dirichlet[i]) {
            lab.dirichlet.push_back(i);
            lab.dirichlet_values.push_back(0.0);
        } else {
            lab.dof_of_node[i] = static_cast<int>(lab.free.size());
            lab.free.push_back(i);
        }
    }
    return lab;
}

void check_axis(const Mesh1D& mesh, double coord)
{
    const double lo = mesh.nodes.front();
    const double hi = mesh.nodes.back();
    const double tol = kCoordinateTol * std::max(1.0, hi - lo);
    if (!(coord > lo + tol && coord < hi - tol))
        return;
    auto it = std::lower_bound(mesh.nodes.begin(), mesh.nodes.end(), coord - tol);
    if (it == mesh.nodes.end() || std::abs(*it - coord) > tol)
        throw ConfigError("material interface at " + num(coord) + " is not a mesh line");
}

} // namespace

Matrix2 element_stiffness_1d(double x_left, double x_right, double coeff)
{
    const double h = x_right - x_left;
    check_length(h, std::max(std::abs(x_left), std::abs(x_right)), -1);
    const double k = coeff / h;
    return {{{k, -k}, {-k, k}}};
}

Matrix4 element_stiffness_quad(double hx, double hy, double coeff)
{
    check_length(hx, 1.0, -1);
    check_length(hy, 1.0, -1);
    const QuadParts& p = quad_parts();
    Matrix4 K{};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            K[a][b] = coeff * (hy / hx * p.A[a][b] + hx / hy * p.B[a][b]);
    return K;
}

// --- labeling ---------------------------------------------------------------------

DofLabeling label_dirichlet(const Mesh1D& mesh, BoundarySpec spec)
{
    const double lo = mesh.nodes.front();
    const double hi = mesh.nodes.back();
    std::vector<bool> mask(mesh.node_count(), false);
    for (int i = 0; i < mesh.node_count(); ++i) {
        const double x = mesh.nodes[i];
        switch (spec) {
        case BoundarySpec::Left1D:
            mask[i] = x <= lo + kCoordinateTol;
            break;
        case BoundarySpec::Both1D:
            mask[i] = x <= lo + kCoordinateTol || x >= hi - kCoordinateTol;
            break;
        default:
            throw ConfigError("boundary specification " + to_string(spec) + " is not one-dimensional");
        }
    }
    return from_mask(mask);
}

DofLabeling label_dirichlet(const TensorMesh2D& mesh, BoundarySpec spec)
{
    const auto& xs = mesh.mesh_x.nodes;
    const auto& ys = mesh.mesh_y.nodes;
    const double xlo = xs.front(), xhi = xs.back();
    const double ylo = ys.front(), yhi = ys.back();
    constexpr double tol = kCoordinateTol;
    std::vector<bool> mask(mesh.node_count(), false);
    for (int j = 0; j < static_cast<int>(ys.size()); ++j) {
        for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
            const double x = xs[i];
            const double y = ys[j];
            const bool left = x <= xlo + tol;
            const bool bottom = y <= ylo + tol;
            const bool any = left || bottom || x >= xhi - tol || y >= yhi - tol;
            bool d = false;
            switch (spec) {
            case BoundarySpec::LeftBottom2D:
                d = left || bottom;
                break;
            case BoundarySpec::All2D:
                d = any;
                break;
            case BoundarySpec::LShape2D:
                d = any || (x >= 0.5 - tol && y <= 0.5 + tol);
                break;
            default:
                throw ConfigError("boundary specification " + to_string(spec) + " is not two-dimensional");
            }
            mask[mesh.node_id(i, j)] = d;
        }
    }
    return from_mask(mask);
}

void check_material_resolved(const Mesh1D& mesh, const MaterialField& material)
{
    for (const Region& r : material.regions) {
        check_axis(mesh, r.x0);
        check_axis(mesh, r.x1);
    }
}

void check_material_resolved(const TensorMesh2D& mesh, const MaterialField& material)
{
    for (const Region& r : material.regions) {
        check_axis(mesh.mesh_x, r.x0);
        check_axis(mesh.mesh_x, r.x1);
        check_axis(mesh.mesh_y, r.y0);
        check_axis(mesh.mesh_y, r.y1);
    }
}

// --- assembly -----------------------------------------------------------------------

SparseSystem assemble_system(const Mesh1D& mesh, const DofLabeling& lab, const MaterialField& material,
                             const LoadSpec& load, double neumann_g)
{
    if (lab.node_count != mesh.node_count())
        throw InvalidInput("labeling does not match the mesh");
    check_material_resolved(mesh, material);
    const std::vector<double> u0 = node_values(lab);
    SparseSystem sys;
    sys.ell.assign(lab.dof_count(), 0.0);
    std::vector<CsrMatrix::Triplet> trip;
    trip.reserve(4 * mesh.element_count());

    for (int e = 0; e < mesh.element_count(); ++e) {
        const double xl = mesh.nodes[e];
        const double xr = mesh.nodes[e + 1];
        check_length(xr - xl, std::max(std::abs(xl), std::abs(xr)), e);
        const Matrix2 K = element_stiffness_1d(xl, xr, material.at(0.5 * (xl + xr)));
        const ElementLoad1D L = element_load_1d(load, xl, xr, false);
        const int g[2] = {e, e + 1};
        for (int a = 0; a < 2; ++a) {
            const int da = lab.dof_of_node[g[a]];
            if (da < 0)
                continue;
            sys.ell[da] += L.value[a];
            for (int b = 0; b < 2; ++b) {
                const int db = lab.dof_of_node[g[b]];
                if (db >= 0)
                    trip.push_back({da, db, K[a][b]});
                else
                    sys.ell[da] -= K[a][b] * u0[g[b]];
            }
        }
    }
    const int last = mesh.node_count() - 1;
    if (lab.is_free(last))
        sys.ell[lab.dof_of_node[last]] += neumann_term(neumann_g);
    sys.B = CsrMatrix::from_triplets(lab.dof_count(), std::move(trip));
    return sys;
}

SparseSystem assemble_system(const TensorMesh2D& mesh, const DofLabeling& lab, const MaterialField& material,
                             const LoadSpec& load)
{
    if (lab.node_count != mesh.node_count())
        throw InvalidInput("labeling does not match the mesh");
    check_material_resolved(mesh, material);
    const std::vector<double> u0 = node_values(lab);
    const auto& xs = mesh.mesh_x.nodes;
    const auto& ys = mesh.mesh_y.nodes;
    const int nx = mesh.nx();
    const int ny = mesh.ny();

    SparseSystem sys;
    sys.ell.assign(lab.dof_count(), 0.0);
    std::vector<CsrMatrix::Triplet> trip;
    trip.reserve(16 * mesh.element_count());

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double hx = xs[i + 1] - xs[i];
            const double hy = ys[j + 1] - ys[j];
            const double coeff = material.at(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
            const Matrix4 K = element_stiffness_quad(hx, hy, coeff);
            const ElementLoad2D L = element_load_2d(load, xs[i], xs[i + 1], ys[j], ys[j + 1], false);
            const int g[4] = {mesh.node_id(i, j), mesh.node_id(i + 1, j), mesh.node_id(i + 1, j + 1),
                              mesh.node_id(i, j + 1)};
            for (int a = 0; a < 4; ++a) {
                const int da = lab.dof_of_node[g[a]];
                if (da < 0)
                    continue;
                sys.ell[da] += L.value[a];
                for (int b = 0; b < 4; ++b) {
                    const int db = lab.dof_of_node[g[b]];
                    if (db >= 0)
                        trip.push_back({da, db, K[a][b]});
                    else
                        sys.ell[da] -= K[a][b] * u0[g[b]];
                }
            }
        }
    }

    // natural edges: only free nodes pick up the flux
    auto add_edge = [&](const ElementLoad1D& v, int n0, int n1) {
        if (lab.is_free(n0))
            sys.ell[lab.dof_of_node[n0]] += v.value[0];
        if (lab.is_free(n1))
            sys.ell[lab.dof_of_node[n1]] += v.value[1];
    };
    if (load.family == ForcingFamily::Arctan2D) {
        for (int j = 0; j < ny; ++j)
            add_edge(neumann_edge_2d(load, Edge::Right, ys[j], ys[j + 1], false), mesh.node_id(nx, j),
                     mesh.node_id(nx, j + 1));
        for (int i = 0; i < nx; ++i)
            add_edge(neumann_edge_2d(load, Edge::Top, xs[i], xs[i + 1], false), mesh.node_id(i, ny),
                     mesh.node_id(i + 1, ny));
    }
    sys.B = CsrMatrix::from_triplets(lab.dof_count(), std::move(trip));
    return sys;
}

// --- frozen-c contraction ---------------------------------------------------------

NodeGradient assembly_gradient_contraction(const Mesh1D& mesh, const DofLabeling& lab,
                                           const MaterialField& material, const LoadSpec& load,
                                           std::span<const double> c)
{
    if (static_cast<int>(c.size()) != lab.dof_count())
        throw InvalidInput("solution vector does not match the labeling");
    const std::vector<double> u0 = node_values(lab);
    const int nn = mesh.node_count();
    NodeGradient grad;
    grad.x.assign(nn, 0.0);
    auto interior = [nn](int node) { return node > 0 && node < nn - 1; };

    for (int e = 0; e < mesh.element_count(); ++e) {
        const double xl = mesh.nodes[e];
        const double xr = mesh.nodes[e + 1];
        const double h = xr - xl;
        const double coeff = material.at(0.5 * (xl + xr));
        const int g[2] = {e, e + 1};
        double ce[2], ue[2];
        for (int a = 0; a < 2; ++a) {
            const int d = lab.dof_of_node[g[a]];
            ce[a] = d >= 0 ? c[d] : 0.0;
            ue[a] = u0[g[a]];
        }
        // 1/2 c.K1 c + c.K1 u0 scaled by d(coeff/h)/dh
        const double dc = ce[0] - ce[1];
        const double dQdh = -coeff / (h * h) * (0.5 * dc * dc + dc * (ue[0] - ue[1]));
        const ElementLoad1D L = element_load_1d(load, xl, xr, true);
        for (int k = 0; k < 2; ++k) {
            if (!interior(g[k]))
                continue;
            double v = k == 1 ? dQdh : -dQdh;
            for (int a = 0; a < 2; ++a)
                if (lab.is_free(g[a]))
                    v -= ce[a] * L.d[a][k];
            grad.x[g[k]] += v;
        }
    }
    return grad;
}

NodeGradient assembly_gradient_contraction(const TensorMesh2D& mesh, const DofLabeling& lab,
                                           const MaterialField& material, const LoadSpec& load,
                                           std::span<const double> c)
{
    if (static_cast<int>(c.size()) != lab.dof_count())
        throw InvalidInput("solution vector does not match the labeling");
    const std::vector<double> u0 = node_values(lab);
    const auto& xs = mesh.mesh_x.nodes;
    const auto& ys = mesh.mesh_y.nodes;
    const int nx = mesh.nx();
    const int ny = mesh.ny();
    const QuadParts& parts = quad_parts();

    NodeGradient grad;
    grad.x.assign(nx + 1, 0.0);
    grad.y.assign(ny + 1, 0.0);

    auto form = [](const Matrix4& M, const double* ce, const double* ue) {
        double q = 0.0;
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                q += ce[a] * M[a][b] * (0.5 * ce[b] + ue[b]);
        return q;
    };

    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double hx = xs[i + 1] - xs[i];
            const double hy = ys[j + 1] - ys[j];
            const double coeff = material.at(0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1]));
            const int g[4] = {mesh.node_id(i, j), mesh.node_id(i + 1, j), mesh.node_id(i + 1, j + 1),
                              mesh.node_id(i, j + 1)};
            double ce[4], ue[4];
            bool any_free = false;
            for (int a = 0; a < 4; ++a) {
                const int d = lab.dof_of_node[g[a]];
                ce[a] = d >= 0 ? c[d] : 0.0;
                ue[a] = u0[g[a]];
                any_free = any_free || d >= 0;
            }
            if (!any_free)
                continue;
            const double qa = form(parts.A, ce, ue);
            const double qb = form(parts.B, ce, ue);
            const double dhx = coeff * (-hy / (hx * hx) * qa + qb / hy);
            const double dhy = coeff * (qa / hx - hx / (hy * hy) * qb);

            // coordinate slots (x0, x1, y0, y1)
            double v[4] = {-dhx, dhx, -dhy, dhy};
            const ElementLoad2D L = element_load_2d(load, xs[i], xs[i + 1], ys[j], ys[j + 1], true);
            for (int k = 0; k < 4; ++k)
                for (int a = 0; a < 4; ++a)
                    if (lab.is_free(g[a]))
                        v[k] -= ce[a] * L.d[a][k];
            if (i > 0)
                grad.x[i] += v[0];
            if (i + 1 < nx)
                grad.x[i + 1] += v[1];
            if (j > 0)
                grad.y[j] += v[2];
            if (j + 1 < ny)
                grad.y[j + 1] += v[3];
        }
    }

    if (load.family == ForcingFamily::Arctan2D) {
        auto edge = [&](const ElementLoad1D& e, int n0, int n1, std::vector<double>& out, int k0, int last) {
            const int nodes[2] = {n0, n1};
            for (int k = 0; k < 2; ++k) {
                const int coord = k0 + k;
                if (coord == 0 || coord == last)
                    continue;
                for (int a = 0; a < 2; ++a)
                    if (lab.is_free(nodes[a]))
                        out[coord] -= c[lab.dof_of_node[nodes[a]]] * e.d[a][k];
            }
        };
        for (int j = 0; j < ny; ++j)
            edge(neumann_edge_2d(load, Edge::Right, ys[j], ys[j + 1], true), mesh.node_id(nx, j),
                 mesh.node_id(nx, j + 1), grad.y, j, ny);
        for (int i = 0; i < nx; ++i)
            edge(neumann_edge_2d(load, Edge::Top, xs[i], xs[i + 1], true), mesh.node_id(i, ny),
                 mesh.node_id(i + 1, ny), grad.x, i, nx);
    }
    return grad;
}

} // namespace rfem
