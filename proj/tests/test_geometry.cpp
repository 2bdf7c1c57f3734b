#include "ufe/geometry.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

using namespace ufe;

namespace {

Box square() { return {2, {-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0}}; }
Box unit_square() { return {2, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}}; }

LevelSet circle(double r, double cx = 0.0, double cy = 0.0)
{
    return {[=](const Point& x) { return (x[0] - cx) * (x[0] - cx) + (x[1] - cy) * (x[1] - cy) - r * r; }, {},
            "circle"};
}

LevelSet constant(double c)
{
    return {[c](const Point&) { return c; }, {}, "constant"};
}

// Strict-sign sampling on a 50-division lattice per element.
bool dense_cut(const SimplexMesh& mesh, const LevelSet& ls, int k)
{
    const auto e = mesh.element(k);
    const Point a = mesh.vertex(e[0]), b = mesh.vertex(e[1]), c = mesh.vertex(e[2]);
    bool neg = false, pos = false;
    const int n = 50;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
            const Point x = a + (double(i) / n) * (b - a) + (double(j) / n) * (c - a);
            const double p = ls.value(x);
            neg = neg || p < -1e-12;
            pos = pos || p > 1e-12;
        }
    return neg && pos;
}

double min_abs_vertex_phi(const SimplexMesh& mesh, const DomainClassification& cls, int k)
{
    double s = std::numeric_limits<double>::infinity();
    for (int v : mesh.element(k))
        s = std::min(s, std::abs(cls.vertex_phi[v]));
    return s;
}

} // namespace

TEST_CASE("constant negative level set: everything interior")
{
    const auto mesh = build_structured_mesh(square(), 4);
    auto cls = classify(mesh, constant(-1.0), Mode::Boundary);
    CHECK(cls.count(Tag::Side0) == mesh.num_elements());
    CHECK(cls.cut_elements().empty());
    assign_hosts(mesh, cls);
    const auto rep = verify_assumptions(mesh, constant(-1.0), cls);
    CHECK(rep.pass);
    CHECK(rep.cut_faces.empty());
}

TEST_CASE("positive level set in boundary mode is an empty domain")
{
    const auto mesh = build_structured_mesh(square(), 2);
    CHECK_THROWS_AS(classify(mesh, constant(1.0), Mode::Boundary), EmptyDomain);
    CHECK_NOTHROW(classify(mesh, constant(1.0), Mode::Interface));
}

TEST_CASE("circle classification matches dense sampling")
{
    const auto mesh = build_structured_mesh(square(), 10);
    const auto ls = circle(0.7);
    const auto cls = classify(mesh, ls, Mode::Boundary);
    int oracle = 0;
    for (int k = 0; k < mesh.num_elements(); ++k) {
        const bool cut = dense_cut(mesh, ls, k);
        oracle += cut;
        CHECK((cls.element_tag[k] == Tag::Cut) == cut);
    }
    CHECK(cls.count(Tag::Cut) == oracle);
}

TEST_CASE("zero vertices do not force a cut")
{
    const LevelSet ls{[](const Point& x) { return x[0] - 0.5; }, {}, "x - 0.5"};
    const auto mesh = build_structured_mesh(unit_square(), 2);
    const auto cls = classify(mesh, ls, Mode::Boundary);
    CHECK(cls.count(Tag::Cut) == 0);
    for (int k = 0; k < mesh.num_elements(); ++k) {
        const bool left = mesh.centroid(k)[0] < 0.5;
        CHECK(cls.element_tag[k] == (left ? Tag::Side0 : Tag::Side1));
    }
}

TEST_CASE("host rules agree with exhaustive search")
{
    const auto mesh = build_structured_mesh(square(), 10);
    auto cls = classify(mesh, circle(0.7), Mode::Boundary);
    for (HostRule rule : {HostRule::Maximin, HostRule::Nearest}) {
        assign_hosts(mesh, cls, rule, 1);
        for (int k : cls.cut_elements()) {
            int best = -1;
            double best_key = -1.0, best_score = -1.0;
            for (int c = 0; c < mesh.num_elements(); ++c) {
                if (cls.element_tag[c] != Tag::Side0)
                    continue;
                bool touch = false;
                for (int a : mesh.element(k))
                    for (int b : mesh.element(c))
                        touch = touch || a == b;
                if (!touch)
                    continue;
                const double score = min_abs_vertex_phi(mesh, cls, c);
                const double key = rule == HostRule::Maximin ? score : -norm(mesh.centroid(c) - mesh.centroid(k));
                if (key > best_key + 1e-12 || (std::abs(key - best_key) <= 1e-12 && score > best_score)) {
                    best = c;
                    best_key = key;
                    best_score = score;
                }
            }
            CHECK(cls.host0[k] == best);
        }
    }
}

TEST_CASE("unique candidate is chosen")
{
    const auto mesh = build_structured_mesh(unit_square(), 4);
    auto cls = classify(mesh, circle(0.45, 0.0, 0.0), Mode::Boundary);
    assign_hosts(mesh, cls);
    int unique = 0;
    for (int k : cls.cut_elements()) {
        std::vector<int> inside;
        for (int c : mesh.element_patch(k))
            if (cls.element_tag[c] == Tag::Side0)
                inside.push_back(c);
        if (inside.empty()) {
            CHECK(std::binary_search(cls.far_hosts.begin(), cls.far_hosts.end(), k));
            continue;
        }
        if (inside.size() == 1) {
            ++unique;
            CHECK(cls.host0[k] == inside[0]);
        }
    }
    CHECK(unique > 0);
}

TEST_CASE("cut element without interior candidates")
{
    const auto mesh = build_structured_mesh(unit_square(), 1);
    auto cls = classify(mesh, circle(0.1, 0.5, 0.5), Mode::Boundary);
    REQUIRE(cls.count(Tag::Cut) > 0);
    CHECK_THROWS_AS(assign_hosts(mesh, cls, HostRule::Nearest, 1), AssumptionViolation);
    CHECK_THROWS_AS(assign_hosts(mesh, cls, HostRule::Nearest, 2), AssumptionViolation);
    const auto rep = verify_assumptions(mesh, circle(0.1, 0.5, 0.5), cls);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.hostless_elements.empty());
}

TEST_CASE("second ring supplies hosts only when the patch has none")
{
    const auto mesh = build_structured_mesh(square(), 10);
    auto cls = classify(mesh, circle(0.7), Mode::Boundary);
    assign_hosts(mesh, cls, HostRule::Nearest, 2);
    CHECK(cls.far_hosts.empty());
    CHECK_THROWS_AS(assign_hosts(mesh, cls, HostRule::Nearest, 3), InvalidArgument);

    // Two-atom surface on a coarse Kuhn mesh: some cut tetrahedra touch the
    // inside only through a face, so their vertex patch has no interior element.
    const LevelSet atoms{[](const Point& x) {
                             const double a = 2.5 * (x[0] - 0.5), b = 4.0 * (x[1] - 0.5), c = 2.5 * (x[2] - 0.5);
                             const double q = a * a + b * b + c * c + 0.6;
                             return q * q - 3.5 * b * b - 0.6;
                         },
                         {}, "atoms"};
    const auto cube = build_structured_mesh({3, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}, 8);
    auto cls3 = classify(cube, atoms, Mode::Interface);
    const auto rep = verify_assumptions(cube, atoms, cls3);
    REQUIRE_FALSE(rep.hostless_elements.empty());
    CHECK_THROWS_AS(assign_hosts(cube, cls3, HostRule::Nearest, 1), AssumptionViolation);
    assign_hosts(cube, cls3, HostRule::Nearest, 2);
    CHECK(cls3.far_hosts == rep.hostless_elements);
    for (int k : cls3.cut_elements()) {
        CHECK(cls3.element_tag[cls3.host0[k]] == Tag::Side0);
        CHECK(cls3.element_tag[cls3.host1[k]] == Tag::Side1);
    }
}

TEST_CASE("interface mode hosts on both sides")
{
    const auto mesh = build_structured_mesh(square(), 10);
    auto cls = classify(mesh, circle(0.5), Mode::Interface);
    assign_hosts(mesh, cls);
    for (int k : cls.cut_elements()) {
        CHECK(cls.element_tag[cls.host0[k]] == Tag::Side0);
        CHECK(cls.element_tag[cls.host1[k]] == Tag::Side1);
    }
}

TEST_CASE("assumption checks")
{
    const auto mesh = build_structured_mesh(square(), 10);
    const auto cls = classify(mesh, circle(0.7), Mode::Boundary);
    const auto rep = verify_assumptions(mesh, circle(0.7), cls);
    CHECK(rep.pass);
    CHECK_FALSE(rep.cut_faces.empty());
    for (const auto& f : rep.cut_faces)
        CHECK(f.crossings == 1);

    const LevelSet wave{[](const Point& x) { return std::sin(20.0 * M_PI * x[0]); }, {}, "sin(20 pi x)"};
    const auto coarse = build_structured_mesh(unit_square(), 2);
    const auto wcls = classify(coarse, wave, Mode::Interface);
    const auto wrep = verify_assumptions(coarse, wave, wcls);
    CHECK_FALSE(wrep.pass);
    CHECK_FALSE(wrep.multi_crossing.empty());
}
