#include <doctest.h>

#include <cmath>
#include <random>

#include "rfem/assembly.hpp"
#include "rfem/errors.hpp"
#include "rfem/ritz.hpp"
#include "support.hpp"

using namespace rfem;

TEST_CASE("1d element stiffness")
{
    const Matrix2 k = element_stiffness_1d(0.0, 1.0, 1.0);
    CHECK(k[0][0] == 1.0);
    CHECK(k[0][1] == -1.0);
    const Matrix2 k2 = element_stiffness_1d(0.25, 0.75, 10.0);
    CHECK(k2[0][0] == doctest::Approx(20.0));
    CHECK(k2[1][0] == doctest::Approx(-20.0));
    CHECK(k2[0][0] + k2[0][1] == 0.0);
    CHECK_THROWS_AS(element_stiffness_1d(0.5, 0.5, 1.0), DegenerateMesh);
}

TEST_CASE("quad stiffness on the unit square")
{
    // oracle: integrate grad N_i . grad N_j of the bilinear shapes with a
    // 3x3 midpoint-free product Simpson rule (exact for biquadratic integrands)
    auto grad = [](int i, double x, double y) {
        const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
        const double fx = (1 + sx[i] * (2 * x - 1)) / 2, fy = (1 + sy[i] * (2 * y - 1)) / 2;
        return std::array<double, 2>{sx[i] * fy, sy[i] * fx};
    };
    const double pts[3] = {0, 0.5, 1}, w[3] = {1.0 / 6, 4.0 / 6, 1.0 / 6};
    const Matrix4 k = element_stiffness_quad(1, 1, 1);
    const double ref[4][4] = {{4, -1, -2, -1}, {-1, 4, -1, -2}, {-2, -1, 4, -1}, {-1, -2, -1, 4}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double s = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) {
                    const auto gi = grad(i, pts[a], pts[b]), gj = grad(j, pts[a], pts[b]);
                    s += w[a] * w[b] * (gi[0] * gj[0] + gi[1] * gj[1]);
                }
            CHECK(k[i][j] == doctest::Approx(s).epsilon(1e-14));
            CHECK(k[i][j] == doctest::Approx(ref[i][j] / 6).epsilon(1e-14));
        }
}

TEST_CASE("quad stiffness rows and axis swap")
{
    const Matrix4 a = element_stiffness_quad(2, 1, 3);
    const Matrix4 b = element_stiffness_quad(1, 2, 3);
    for (int i = 0; i < 4; ++i) {
        double row = 0;
        for (int j = 0; j < 4; ++j)
            row += a[i][j];
        CHECK(std::abs(row) < 1e-14);
    }
    // swapping axes maps local nodes 0,1,2,3 -> 0,3,2,1
    const int perm[4] = {0, 3, 2, 1};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            CHECK(a[i][j] == doctest::Approx(b[perm[i]][perm[j]]));
    CHECK_THROWS_AS(element_stiffness_quad(0.0, 1.0, 1.0), DegenerateMesh);
}

TEST_CASE("dirichlet labels")
{
    const DofLabeling l1 = label_dirichlet(Mesh1D::from_nodes({0, 0.5, 1}), BoundarySpec::Left1D);
    CHECK(l1.dirichlet == std::vector<int>{0});
    CHECK(l1.free == std::vector<int>{1, 2});

    const Mesh1D m2 = Mesh1D::uniform({0, 1}, 2);
    const DofLabeling all = label_dirichlet(TensorMesh2D{m2, m2}, BoundarySpec::All2D);
    CHECK(all.dof_count() == 1);
    CHECK(all.free == std::vector<int>{4});

    // 5x5 node grid: interior (i,j) in {1,2,3}^2 minus the four with x >= .5, y <= .5
    const Mesh1D m4 = Mesh1D::uniform({0, 1}, 4);
    const DofLabeling ls = label_dirichlet(TensorMesh2D{m4, m4}, BoundarySpec::LShape2D);
    CHECK(ls.dof_count() == 5);
    CHECK(static_cast<int>(ls.dirichlet.size()) == 20);
    for (int node : ls.free) {
        const int i = node % 5, j = node / 5;
        CHECK(!(i >= 2 && j <= 2));
    }

    const DofLabeling lb = label_dirichlet(TensorMesh2D{m4, m4}, BoundarySpec::LeftBottom2D);
    CHECK(lb.dof_count() == 16);
}

TEST_CASE("toy poisson system with two elements")
{
    const ProblemSpec p = make_problem(Family::Constant1D, {1.0, 0.0}, 2);
    const Mesh1D m = Mesh1D::uniform({0, 1}, 2);
    const DofLabeling lab = label_dirichlet(m, p.boundary);
    const SparseSystem s = assemble_system(m, lab, p.material, p.load, p.neumann_g);
    REQUIRE(s.B.n == 2);
    CHECK(s.B.at(0, 0) == doctest::Approx(4));
    CHECK(s.B.at(0, 1) == doctest::Approx(-2));
    CHECK(s.B.at(1, 0) == doctest::Approx(-2));
    CHECK(s.B.at(1, 1) == doctest::Approx(2));
    CHECK(s.ell[0] == doctest::Approx(0.5));
    CHECK(s.ell[1] == doctest::Approx(0.25));
    CHECK(s.B.asymmetry() == 0.0);
}

TEST_CASE("two-material interface diagonal")
{
    ProblemSpec p = make_problem(Family::TwoMaterial, {10.0}, 4);
    const Mesh1D m = Mesh1D::uniform({0, 1}, 4);
    const DofLabeling lab = label_dirichlet(m, p.boundary);
    const SparseSystem s = assemble_system(m, lab, p.material, p.load, p.neumann_g);
    REQUIRE(lab.dof_of_node[2] >= 0);
    const int d = lab.dof_of_node[2];
    CHECK(s.B.at(d, d) == doctest::Approx(44.0));
}

TEST_CASE("unresolved material interface is a config error")
{
    const ProblemSpec p = make_problem(Family::TwoMaterial, {10.0}, 3);
    const Mesh1D m = Mesh1D::uniform({0, 1}, 3);
    CHECK_THROWS_AS(assemble_system(m, label_dirichlet(m, p.boundary), p.material, p.load), ConfigError);
}

TEST_CASE("csr from triplets")
{
    const CsrMatrix a = CsrMatrix::from_triplets(3, {{2, 0, 1.0}, {0, 0, 2.0}, {0, 0, 3.0}, {1, 2, -1.0}, {0, 2, 4.0}});
    CHECK(a.at(0, 0) == 5.0);
    CHECK(a.at(0, 2) == 4.0);
    CHECK(a.at(1, 1) == 0.0);
    CHECK(a.nnz() == 4);
    for (int r = 0; r < a.n; ++r)
        for (int k = a.row_ptr[r] + 1; k < a.row_ptr[r + 1]; ++k)
            CHECK(a.col[k - 1] < a.col[k]);
    const auto y = a.multiply(std::vector<double>{1, 2, 3});
    CHECK(y == std::vector<double>{17, -3, 1});
}

namespace {

ProblemSpec family_problem(Family f, int N)
{
    switch (f) {
    case Family::Arctan1D:
        return make_problem(f, {10, 0.5}, N);
    case Family::Power:
        return make_problem(f, {0.7}, N);
    case Family::TwoMaterial:
        return make_problem(f, {10}, N);
    case Family::Arctan2D:
        return make_problem(f, N);
    default:
        return make_problem(f, {1, 1}, N);
    }
}

} // namespace

TEST_CASE("assembled systems are symmetric and energy identity holds")
{
    for (const ProblemSpec& tmpl : registry()) {
        const ProblemSpec p = family_problem(tmpl.family, tmpl.dim == 1 ? 16 : 6);
        const PipelineResult r = evaluate_theta(p, std::vector<double>(p.logit_count(), 0.1), false);
        CHECK(r.disc.system.B.asymmetry() <= 1e-13);
        double lc = 0;
        for (int i = 0; i < r.disc.system.B.n; ++i)
            lc += r.disc.system.ell[i] * r.disc.solve.c[i];
        CHECK(std::abs(r.J + 0.5 * lc) <= 1e-12 * std::abs(r.J));
    }
}

TEST_CASE("bisection never raises the ritz energy")
{
    std::mt19937_64 rng(2);
    for (Family f : {Family::Arctan1D, Family::Power, Family::TwoMaterial, Family::Constant1D}) {
        ProblemSpec p = family_problem(f, 4);
        if (f == Family::Constant1D)
            p = make_problem(f, {1.0, 0.5}, 4);
        std::vector<double> x{0, 0.2, 0.5, 0.8, 1};
        if (f == Family::Power)
            x = {0, 0.05, 0.3, 0.5, 1};
        std::vector<double> fine;
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            fine.push_back(x[i]);
            fine.push_back(0.5 * (x[i] + x[i + 1]));
        }
        fine.push_back(1.0);
        const double Jc = discretize(p, Mesh1D::from_nodes(x)).J;
        const double Jf = discretize(p, Mesh1D::from_nodes(fine)).J;
        CHECK(Jf <= Jc + 1e-14);
    }
}

TEST_CASE("frozen-c gradient matches finite differences of node positions")
{
    std::mt19937_64 rng(17);
    for (const ProblemSpec& tmpl : registry()) {
        const int N = tmpl.dim == 1 ? 8 : 4;
        const ProblemSpec p = family_problem(tmpl.family, N);
        const std::vector<double> theta = testing::gaussian_vector(rng, p.logit_count(), 0.3);
        const PipelineResult r = evaluate_theta(p, theta, false);
        const Discretization& d = r.disc;
        const NodeGradient g = node_gradient(p, d);
        const std::vector<double> c = d.solve.c;

        // J with c frozen as a function of one axis' interior coordinates
        auto frozen = [&](int axis, const std::vector<double>& coords) {
            Discretization e = d;
            if (d.dim == 1)
                e.mesh = Mesh1D::from_nodes(coords);
            else if (axis == 0)
                e.mesh2.mesh_x = Mesh1D::from_nodes(coords);
            else
                e.mesh2.mesh_y = Mesh1D::from_nodes(coords);
            SparseSystem s = d.dim == 1 ? assemble_system(e.mesh, d.labeling, p.material, p.load, p.neumann_g)
                                        : assemble_system(e.mesh2, d.labeling, p.material, p.load);
            return ritz_energy(s, c);
        };
        for (int axis = 0; axis < d.dim; ++axis) {
            const std::vector<double>& nodes = d.dim == 1 ? d.mesh.nodes : (axis ? d.mesh2.mesh_y.nodes : d.mesh2.mesh_x.nodes);
            const std::vector<double>& an = axis ? g.y : g.x;
            std::vector<double> fd(nodes.size(), 0.0), ga(nodes.size(), 0.0);
            for (std::size_t k = 1; k + 1 < nodes.size(); ++k) {
                // fixed material lines keep their labels; perturbing them is still a valid frozen-c derivative
                const double h = 1e-6 * std::min(nodes[k + 1] - nodes[k], nodes[k] - nodes[k - 1]);
                std::vector<double> xp = nodes, xm = nodes;
                xp[k] += h;
                xm[k] -= h;
                if (p.family == Family::TwoMaterial || p.family == Family::LShape)
                    if (std::abs(nodes[k] - 0.5) < 1e-12)
                        continue;
                fd[k] = (frozen(axis, xp) - frozen(axis, xm)) / (2 * h);
                ga[k] = an[k];
            }
            INFO(to_string(p.family), " axis ", axis);
            CHECK(testing::rel_diff(ga, fd) < 1e-6);
        }
    }
}

TEST_CASE("node gradient is antisymmetric for a symmetric problem")
{
    const ProblemSpec p = make_problem(Family::Arctan1D, {10, 0.5}, 8);
    ProblemSpec sym = p;
    sym.boundary = BoundarySpec::Both1D;
    sym.neumann_g = 0.0;
    const Mesh1D m = Mesh1D::from_nodes({0, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 1});
    const Discretization d = discretize(sym, m);
    const NodeGradient g = node_gradient(sym, d);
    for (int k = 1; k < 8; ++k)
        CHECK(std::abs(g.x[k] + g.x[8 - k]) < 1e-10);
}

TEST_CASE("zero data gives zero gradient")
{
    const ProblemSpec p = make_problem(Family::Constant1D, {0.0, 0.0}, 6);
    const PipelineResult r = evaluate_theta(p, std::vector<double>{0.2, -0.1, 0.3, 0, 0, 0.4}, true);
    for (double c : r.disc.solve.c)
        CHECK(c == 0.0);
    for (double x : r.grad)
        CHECK(x == 0.0);
}
