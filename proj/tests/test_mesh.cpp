#include "ufe/mesh.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

using namespace ufe;

namespace {

Box square() { return {2, {-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0}}; }
Box unit_square() { return {2, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}}; }
Box unit_cube() { return {3, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}; }

// Patch by pairwise comparison of vertex sets.
std::vector<int> brute_patch(const SimplexMesh& mesh, int k)
{
    std::vector<int> out;
    const auto ek = mesh.element(k);
    for (int c = 0; c < mesh.num_elements(); ++c) {
        const auto ec = mesh.element(c);
        bool touch = false;
        for (int a : ek)
            for (int b : ec)
                touch = touch || a == b;
        if (touch)
            out.push_back(c);
    }
    return out;
}

} // namespace

TEST_CASE("single cell splits into two triangles")
{
    const auto mesh = build_structured_mesh(unit_square(), 1);
    CHECK(mesh.num_elements() == 2);
    CHECK(mesh.num_vertices() == 4);
    CHECK(mesh.num_faces() == 5);
    CHECK(mesh.element_patch(0) == std::vector<int>{0, 1});
}

TEST_CASE("structured counts")
{
    for (int n : {1, 3, 10}) {
        const auto mesh = build_structured_mesh(square(), n);
        CHECK(mesh.num_elements() == 2 * n * n);
        CHECK(mesh.num_vertices() == (n + 1) * (n + 1));
        CHECK(mesh.num_faces() == 3 * n * n + 2 * n);
        int boundary = 0;
        for (const auto& f : mesh.faces())
            boundary += f.boundary();
        CHECK(boundary == 4 * n);
        CHECK(mesh.cell_width() == doctest::Approx(2.0 / n));
    }
    const auto cube = build_structured_mesh(unit_cube(), 2);
    CHECK(cube.num_elements() == 48);
    CHECK(cube.num_vertices() == 27);
}

TEST_CASE("element volumes tile the box")
{
    for (const Box& b : {square(), unit_cube()}) {
        const auto mesh = build_structured_mesh(b, 3);
        double total = 0.0;
        for (int k = 0; k < mesh.num_elements(); ++k) {
            CHECK(mesh.volume(k) > 0.0);
            total += mesh.volume(k);
        }
        CHECK(total == doctest::Approx(b.dim == 2 ? 4.0 : 1.0).epsilon(1e-13));
    }
}

TEST_CASE("faces are shared by at most two elements and normals point outward")
{
    for (const Box& b : {square(), unit_cube()}) {
        const auto mesh = build_structured_mesh(b, 3);
        for (int f = 0; f < mesh.num_faces(); ++f) {
            const auto& face = mesh.face(f);
            const Point n = mesh.face_normal(f);
            CHECK(norm(n) == doctest::Approx(1.0));
            const Point c0 = mesh.centroid(face.elements[0]);
            CHECK(dot(mesh.face_points(f)[0] - c0, n) > 0.0);
            if (!face.boundary()) {
                const Point c1 = mesh.centroid(face.elements[1]);
                CHECK(dot(mesh.face_points(f)[0] - c1, n) < 0.0);
            }
        }
        for (int k = 0; k < mesh.num_elements(); ++k)
            for (int i = 0; i <= mesh.dim(); ++i) {
                const auto& face = mesh.face(mesh.element_faces(k)[i]);
                CHECK((face.elements[0] == k || face.elements[1] == k));
                // local face i omits local vertex i
                const int v = mesh.element(k)[i];
                CHECK(std::find(face.vertices.begin(), face.vertices.begin() + mesh.dim(), v) ==
                      face.vertices.begin() + mesh.dim());
            }
    }
}

TEST_CASE("patches match brute-force vertex sharing")
{
    const auto mesh = build_structured_mesh(square(), 10);
    for (int k : {0, 19, 57, 110, 199})
        CHECK(mesh.element_patch(k) == brute_patch(mesh, k));
    for (int k = 0; k < mesh.num_elements(); ++k)
        for (int c : mesh.element_patch(k))
            CHECK((c >= 0 && c < mesh.num_elements()));
    const auto cube = build_structured_mesh(unit_cube(), 3);
    for (int k : {0, 50, 161})
        CHECK(cube.element_patch(k) == brute_patch(cube, k));
}

TEST_CASE("mesh text round trip")
{
    const auto mesh = build_structured_mesh(unit_cube(), 2);
    std::stringstream ss;
    write_mesh(ss, mesh);
    const auto back = read_mesh(ss);
    REQUIRE(back.num_elements() == mesh.num_elements());
    CHECK(back.num_faces() == mesh.num_faces());
    for (int v = 0; v < mesh.num_vertices(); ++v)
        CHECK(norm(back.vertex(v) - mesh.vertex(v)) == 0.0);
}

TEST_CASE("invalid input")
{
    CHECK_THROWS_AS(build_structured_mesh(square(), 0), InvalidArgument);
    CHECK_THROWS_AS(SimplexMesh(2, {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2, -1}}, 0.0), InvalidArgument);
    const auto mesh = build_structured_mesh(square(), 2);
    CHECK_THROWS_AS(mesh.element_patch(-1), InvalidArgument);
}
