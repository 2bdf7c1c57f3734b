#include "ufe/assembly.hpp"
#include "ufe/problems.hpp"
#include "ufe/solvers.hpp"
#include "ufe/study.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace ufe;

namespace {

double max_abs(const std::vector<double>& v)
{
    double s = 0.0;
    for (double x : v)
        s = std::max(s, std::abs(x));
    return s;
}

// Largest entry after summing repeated global dofs.
double assembled_max(const LocalMatrix& lm)
{
    std::map<std::pair<int, int>, double> g;
    for (int i = 0; i < lm.size(); ++i)
        for (int j = 0; j < lm.size(); ++j)
            g[{lm.dofs[i], lm.dofs[j]}] += lm.a[static_cast<std::size_t>(i) * lm.size() + j];
    double s = 0.0;
    for (const auto& [key, v] : g)
        s = std::max(s, std::abs(v));
    return s;
}

ModelProblem linear_boundary_problem()
{
    ModelProblem p;
    p.variant = Mode::Boundary;
    p.f = [](int, const Point&) { return 0.0; };
    p.g = [](const Point& x) { return x[0] + x[1]; };
    return p;
}

} // namespace

TEST_CASE("P1 stiffness of an uncut triangle")
{
    const auto problem = builtin_problem(1);
    const auto disc = discretize(problem, 10, 1, Continuity::C0);
    Assembler a(*disc->space, problem.ls, problem.problem, {0, 3, GeometryModel::Projected});
    int checked = 0;
    for (int k = 0; k < disc->mesh.num_elements() && checked < 5; ++k) {
        if (disc->cls.element_tag[k] != Tag::Side0)
            continue;
        ++checked;
        const auto lm = a.local_cell_matrix(k, 0);
        const auto e = disc->mesh.element(k);
        const double area = disc->mesh.volume(k);
        // classical formula: (b_i b_j + c_i c_j) / (4 area)
        double b[3], c[3];
        for (int i = 0; i < 3; ++i) {
            const Point& p1 = disc->mesh.vertex(e[(i + 1) % 3]);
            const Point& p2 = disc->mesh.vertex(e[(i + 2) % 3]);
            b[i] = p1[1] - p2[1];
            c[i] = p2[0] - p1[0];
        }
        const auto dofs = disc->space->element_dofs(k, 0);
        const auto pts = disc->space->node_points(k);
        // local node i sits at vertex e[i] for m = 1
        for (int i = 0; i < 3; ++i)
            CHECK(norm(pts[i] - disc->mesh.vertex(e[i])) < 1e-15);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                int li = -1, lj = -1;
                for (int t = 0; t < lm.size(); ++t) {
                    if (lm.dofs[t] == dofs[i])
                        li = t;
                    if (lm.dofs[t] == dofs[j])
                        lj = t;
                }
                REQUIRE(li >= 0);
                const double expect = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
                CHECK(lm.a[li * lm.size() + lj] == doctest::Approx(expect).epsilon(1e-12));
            }
    }
    CHECK(checked == 5);
}

TEST_CASE("symmetric variant yields an exactly symmetric matrix")
{
    for (int id : {1, 4}) {
        const auto problem = builtin_problem(id);
        const auto disc = discretize(problem, 10, 2, Continuity::C0);
        const auto sys = Assembler(*disc->space, problem.ls, problem.problem, {0, 3, GeometryModel::Projected}).assemble();
        CHECK(sys.A.is_symmetric());
        ModelProblem nonsym = problem.problem;
        nonsym.symmetry = Symmetry::Nonsym;
        const auto ns = Assembler(*disc->space, problem.ls, nonsym, {0, 3, GeometryModel::Projected}).assemble();
        CHECK_FALSE(ns.A.is_symmetric());
    }
}

TEST_CASE("skipped faces carry zero local matrices")
{
    const auto problem = builtin_problem(1);
    for (Continuity c : {Continuity::C0, Continuity::DG}) {
        const auto disc = discretize(problem, 10, 2, c);
        Assembler a(*disc->space, problem.ls, problem.problem, {0, 3, GeometryModel::Projected});
        int skipped = 0;
        for (int f = 0; f < disc->mesh.num_faces(); ++f) {
            if (!a.quadrature().face_active(f, 0, false) || a.quadrature().face_active(f, 0, true))
                continue;
            ++skipped;
            CHECK(assembled_max(a.local_face_matrix(f, 0)) < 1e-10);
        }
        CHECK(skipped > 0);
    }
}

TEST_CASE("sum of local matrices equals the assembled matrix")
{
    const auto problem = builtin_problem(4);
    const auto disc = discretize(problem, 8, 1, Continuity::C0);
    ModelProblem prob = problem.problem;
    prob.symmetry = Symmetry::Nonsym;
    Assembler a(*disc->space, problem.ls, prob, {0, 3, GeometryModel::Projected});
    const auto sys = a.assemble();
    const int n = disc->space->dof_count();
    std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0), rhs(n, 0.0);
    auto add = [&](const LocalMatrix& lm) {
        for (int i = 0; i < lm.size(); ++i) {
            rhs[lm.dofs[i]] += lm.rhs[i];
            for (int j = 0; j < lm.size(); ++j)
                dense[static_cast<std::size_t>(lm.dofs[i]) * n + lm.dofs[j]] += lm.a[i * lm.size() + j];
        }
    };
    for (int k = 0; k < disc->mesh.num_elements(); ++k)
        for (int s = 0; s < 2; ++s)
            add(a.local_cell_matrix(k, s));
    for (int f = 0; f < disc->mesh.num_faces(); ++f)
        for (int s = 0; s < 2; ++s)
            if (a.quadrature().face_active(f, s, true))
                add(a.local_face_matrix(f, s));
    for (int k = 0; k < disc->mesh.num_elements(); ++k)
        add(a.local_interface_matrix(k));
    const auto assembled = sys.A.to_dense();
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        diff = std::max(diff, std::abs(dense[i] - assembled[i]));
        scale = std::max(scale, std::abs(dense[i]));
    }
    CHECK(diff <= 1e-12 * scale);
    for (int i = 0; i < n; ++i)
        CHECK(rhs[i] == doctest::Approx(sys.rhs[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("patch test: linear solution is reproduced")
{
    const auto problem = builtin_problem(1);
    const auto disc = discretize(problem, 10, 1, Continuity::C0);
    const ModelProblem prob = linear_boundary_problem();
    const auto sys =
        Assembler(*disc->space, problem.ls, prob, {0, 3, GeometryModel::Polygonal}).assemble();
    const auto x = solve_direct_dense(sys.A, sys.rhs);
    double worst = 0.0;
    for (int i = 0; i < disc->space->dof_count(); ++i) {
        const Point& p = disc->space->dof_points()[i];
        worst = std::max(worst, std::abs(x[i] - (p[0] + p[1])));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("patch test with polynomial data in both modes")
{
    for (int id : {1, 4})
        for (int m : {1, 2}) {
            const auto problem = polynomial_problem(id, m);
            const auto disc = discretize(problem, 10, m, Continuity::C0);
            const QuadSettings quad{0, 3, GeometryModel::Polygonal};
            const auto sys = Assembler(*disc->space, problem.ls, problem.problem, quad).assemble();
            const auto x = solve_direct_dense(sys.A, sys.rhs);
            CHECK(l2_error(*disc->space, x, problem.exact, problem.ls, quad) <= 1e-9);
            Assembler res(*disc->space, problem.ls, problem.problem, quad, &problem.exact);
            CHECK(max_abs(res.galerkin_residual()) < 1e-11);
        }
}

TEST_CASE("Galerkin residual is driven by quadrature error only")
{
    const auto problem = builtin_problem(1);
    const auto disc = discretize(problem, 10, 2, Continuity::C0);
    auto residual = [&](int depth) {
        Assembler a(*disc->space, problem.ls, problem.problem, {0, depth, GeometryModel::Projected}, &problem.exact);
        return max_abs(a.galerkin_residual());
    };
    CHECK(residual(7) <= 1e-2 * residual(2));
}

TEST_CASE("equal coefficients without jumps behave like a one-domain problem")
{
    // Both sides carry the same smooth polynomial: the interface terms vanish on it.
    auto problem = builtin_problem(4);
    problem.problem.alpha = {1.0, 1.0};
    problem.problem.f = [](int, const Point&) { return -4.0; };
    problem.problem.g = [](const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[0]; };
    problem.problem.a = [](const Point&) { return 0.0; };
    problem.problem.b = [](const Point&, const Point&) { return 0.0; };
    problem.exact.u = [](int, const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[0]; };
    problem.exact.grad = [](int, const Point& x) { return Point{2 * x[0] + 1.0, 2 * x[1], 0.0}; };
    const auto disc = discretize(problem, 10, 2, Continuity::C0);
    const QuadSettings quad{0, 3, GeometryModel::Polygonal};
    const auto sys = Assembler(*disc->space, problem.ls, problem.problem, quad).assemble();
    const auto x = solve_cg(sys.A, sys.rhs, 1e-13, 10000).x;
    CHECK(l2_error(*disc->space, x, problem.exact, problem.ls, quad) < 1e-9);
}

TEST_CASE("assembler input checks")
{
    const auto p1 = builtin_problem(1);
    const auto disc = discretize(p1, 6, 1, Continuity::C0);
    CHECK_THROWS_AS(assemble_interface(*disc->space, p1.ls, p1.problem), InvalidArgument);
    Assembler a(*disc->space, p1.ls, p1.problem, {});
    CHECK_THROWS_AS(a.galerkin_residual(), InvalidArgument);
    CHECK(a.penalty() == doctest::Approx(default_penalty(1)));
}
