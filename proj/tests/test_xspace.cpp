#include "ufe/assembly.hpp"
#include "ufe/xspace.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace ufe;

namespace {

Box square() { return {2, {-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0}}; }

LevelSet circle(double r)
{
    return {[r](const Point& x) { return x[0] * x[0] + x[1] * x[1] - r * r; }, {}, "circle"};
}

struct Setup {
    SimplexMesh mesh;
    DomainClassification cls;
    Setup(int n, const LevelSet& ls, Mode mode = Mode::Boundary)
        : mesh(build_structured_mesh(square(), n)), cls(classify(mesh, ls, mode))
    {
        assign_hosts(mesh, cls);
    }
};

Point random_point(const SimplexMesh& mesh, int k, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double l[3] = {u(rng), u(rng), u(rng)};
    const double s = l[0] + l[1] + l[2];
    Point x{0.0, 0.0, 0.0};
    const auto e = mesh.element(k);
    for (int i = 0; i < 3; ++i)
        x = x + (l[i] / s) * mesh.vertex(e[i]);
    return x;
}

} // namespace

TEST_CASE("dof counts")
{
    const LevelSet inside{[](const Point&) { return -1.0; }, {}, "-1"};
    Setup all(6, inside);
    CHECK(ExtendedSpace(all.mesh, all.cls, 1, Continuity::C0).dof_count() == all.mesh.num_vertices());

    Setup s(10, circle(0.7));
    std::set<int> verts;
    for (int k = 0; k < s.mesh.num_elements(); ++k)
        if (s.cls.element_tag[k] == Tag::Side0)
            for (int v : s.mesh.element(k))
                verts.insert(v);
    CHECK(ExtendedSpace(s.mesh, s.cls, 1, Continuity::C0).dof_count() == static_cast<int>(verts.size()));
    CHECK(ExtendedSpace(s.mesh, s.cls, 2, Continuity::DG).dof_count() == 6 * s.cls.count(Tag::Side0));

    Setup two(10, circle(0.5), Mode::Interface);
    const ExtendedSpace xi(two.mesh, two.cls, 1, Continuity::C0);
    CHECK(xi.side_begin(0) == 0);
    CHECK(xi.side_end(0) == xi.side_begin(1));
    CHECK(xi.side_end(1) == xi.dof_count());
}

TEST_CASE("unsupported degree")
{
    Setup s(4, circle(0.7));
    CHECK_THROWS_AS(ExtendedSpace(s.mesh, s.cls, 0, Continuity::C0), UnsupportedDegree);
    CHECK_THROWS_AS(ExtendedSpace(s.mesh, s.cls, max_space_degree + 1, Continuity::C0), UnsupportedDegree);
}

TEST_CASE("Lagrange property on interior elements")
{
    Setup s(6, circle(0.7));
    for (int m = 1; m <= 3; ++m) {
        const ExtendedSpace space(s.mesh, s.cls, m, Continuity::C0);
        BasisValues bv;
        for (int k = 0; k < s.mesh.num_elements(); ++k) {
            if (s.cls.element_tag[k] != Tag::Side0)
                continue;
            const auto pts = space.node_points(k);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                REQUIRE(space.eval_basis(k, 0, pts[i], bv));
                for (int j = 0; j < bv.n; ++j)
                    CHECK(std::abs(bv.value[j] - (j == static_cast<int>(i) ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("delegates")
{
    Setup s(10, circle(0.7));
    const ExtendedSpace space(s.mesh, s.cls, 2, Continuity::C0);
    for (int k = 0; k < s.mesh.num_elements(); ++k) {
        switch (s.cls.element_tag[k]) {
        case Tag::Side0:
            CHECK(space.delegate(k, 0) == k);
            CHECK(space.owns_dofs(k, 0));
            break;
        case Tag::Cut:
            CHECK(space.delegate(k, 0) == s.cls.host0[k]);
            CHECK_FALSE(space.owns_dofs(k, 0));
            CHECK(std::vector<int>(space.dofs(k, 0).begin(), space.dofs(k, 0).end()) ==
                  std::vector<int>(space.element_dofs(s.cls.host0[k], 0).begin(),
                                   space.element_dofs(s.cls.host0[k], 0).end()));
            break;
        case Tag::Side1:
            CHECK(space.delegate(k, 0) == -1);
            CHECK(space.dofs(k, 0).empty());
            break;
        }
    }
}

TEST_CASE("global polynomials are reproduced through the extension")
{
    std::mt19937 rng(3);
    Setup s(10, circle(0.7));
    for (Continuity c : {Continuity::C0, Continuity::DG})
        for (int m = 1; m <= 3; ++m) {
            const ExtendedSpace space(s.mesh, s.cls, m, c);
            auto p = [m](int, const Point& x) { return std::pow(x[0], m) - 0.5 * std::pow(x[1], m) + x[0] + x[1]; };
            const auto coeffs = interpolate(space, p);
            double worst = 0.0;
            for (int k = 0; k < s.mesh.num_elements(); ++k) {
                if (s.cls.element_tag[k] == Tag::Side1)
                    continue;
                for (int t = 0; t < 100; ++t) {
                    const Point x = random_point(s.mesh, k, rng);
                    worst = std::max(worst, std::abs(space.evaluate(coeffs, k, 0, x) - p(0, x)));
                }
            }
            CHECK(worst < 1e-12);
        }
    const ExtendedSpace space(s.mesh, s.cls, 2, Continuity::C0);
    for (double v : interpolate(space, [](int, const Point&) { return 0.0; }))
        CHECK(v == 0.0);
}

TEST_CASE("gradients agree with finite differences")
{
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    Setup s(8, circle(0.7));
    const ExtendedSpace space(s.mesh, s.cls, 2, Continuity::C0);
    std::vector<double> c(space.dof_count());
    for (double& v : c)
        v = coef(rng);
    for (int k : s.cls.cut_elements()) {
        const Point x = random_point(s.mesh, k, rng);
        Point g;
        space.evaluate(c, k, 0, x, &g);
        const double h = 1e-6;
        for (int d = 0; d < 2; ++d) {
            Point xp = x, xm = x;
            xp[d] += h;
            xm[d] -= h;
            const double fd = (space.evaluate(c, k, 0, xp) - space.evaluate(c, k, 0, xm)) / (2.0 * h);
            CHECK(fd == doctest::Approx(g[d]).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("interpolation error on cut elements decays at the expected order")
{
    auto u = [](int, const Point& x) { return std::sin(2 * std::numbers::pi * x[0]) * std::sin(4 * std::numbers::pi * x[1]); };
    const LevelSet ls = circle(0.7);
    for (int m = 1; m <= 3; ++m) {
        std::vector<double> hs, es;
        for (int n : {10, 20, 40}) {
            Setup s(n, ls);
            const ExtendedSpace space(s.mesh, s.cls, m, Continuity::C0);
            const auto c = interpolate(space, u);
            SiteQuadrature sq(space, ls, {0, 5, GeometryModel::Projected});
            double worst = 0.0;
            for (int k : s.cls.cut_elements()) {
                const QuadRule r = sq.cell_rule(k, 0);
                double e2 = 0.0;
                for (std::size_t q = 0; q < r.size(); ++q) {
                    const double d = space.evaluate(c, k, 0, r.nodes[q]) - u(0, r.nodes[q]);
                    e2 += r.weights[q] * d * d;
                }
                worst = std::max(worst, std::sqrt(e2));
            }
            hs.push_back(2.0 / n);
            es.push_back(worst);
        }
        const double rate = std::log(es.front() / es.back()) / std::log(hs.front() / hs.back());
        CHECK(rate >= m + 0.7);
    }
}
