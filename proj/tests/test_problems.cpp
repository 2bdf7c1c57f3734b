#include "ufe/cutquad.hpp"
#include "ufe/problems.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ufe;

namespace {

Point random_in_box(const Box& b, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Point x{0.0, 0.0, 0.0};
    for (int d = 0; d < b.dim; ++d)
        x[d] = b.lo[d] + (b.hi[d] - b.lo[d]) * (0.05 + 0.9 * u(rng));
    return x;
}

Point fd_gradient(const std::function<double(const Point&)>& f, const Point& x, int dim, double h = 1e-5)
{
    Point g{0.0, 0.0, 0.0};
    for (int d = 0; d < dim; ++d) {
        Point p = x, m = x;
        p[d] += h;
        m[d] -= h;
        g[d] = (f(p) - f(m)) / (2.0 * h);
    }
    return g;
}

double fd_laplacian(const std::function<double(const Point&)>& f, const Point& x, int dim, double h = 1e-4)
{
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        Point p = x, m = x;
        p[d] += h;
        m[d] -= h;
        s += (f(p) - 2.0 * f(x) + f(m)) / (h * h);
    }
    return s;
}

void check_data(const BuiltinProblem& p, int samples, unsigned seed)
{
    std::mt19937 rng(seed);
    const int dim = p.box.dim;
    int tested[2] = {0, 0};
    for (int t = 0; t < samples; ++t) {
        const Point x = random_in_box(p.box, rng);
        const double phi = p.ls.value(x);
        if (std::abs(phi) < 1e-3)
            continue;
        int side = phi < 0.0 ? 0 : 1;
        if (p.problem.variant == Mode::Boundary && side == 1)
            continue;
        ++tested[side];
        auto u = [&](const Point& y) { return p.exact.u(side, y); };
        const Point g = p.exact.grad(side, x);
        const Point gf = fd_gradient(u, x, dim);
        const double scale = 1.0 + norm(g);
        CHECK(norm(g - gf) <= 1e-6 * scale);
        const double lap = fd_laplacian(u, x, dim);
        const double f = p.problem.f(side, x);
        CHECK(std::abs(f + p.problem.alpha[side] * lap) <= 1e-4 * (1.0 + std::abs(f)));
    }
    CHECK(tested[0] > 0);
}

} // namespace

TEST_CASE("gradients and sources agree with finite differences")
{
    for (int id = 1; id <= 6; ++id) {
        CAPTURE(id);
        check_data(builtin_problem(id), 200, 11 + id);
    }
    check_data(builtin_problem(4, 1000.0), 200, 3);
    for (int id : {1, 3, 4, 6})
        for (int m = 1; m <= 3; ++m)
            check_data(polynomial_problem(id, m), 50, 7 * m + id);
}

TEST_CASE("level set gradients")
{
    std::mt19937 rng(21);
    for (int id = 1; id <= 6; ++id) {
        const auto p = builtin_problem(id);
        REQUIRE(p.ls.grad);
        for (int t = 0; t < 50; ++t) {
            const Point x = random_in_box(p.box, rng);
            if (std::hypot(x[0], x[1]) < 0.05)
                continue;
            const Point g = p.ls.gradient(x);
            const Point gf = fd_gradient(p.ls.phi, x, p.box.dim, 1e-6);
            CHECK(norm(g - gf) <= 1e-6 * (1.0 + norm(g)));
        }
    }
}

TEST_CASE("interface data match the exact jumps on the interface")
{
    std::mt19937 rng(31);
    for (int id : {4, 5, 6})
        for (double contrast : {10.0, 1000.0}) {
            const auto p = builtin_problem(id, contrast);
            const int dim = p.box.dim;
            for (int t = 0; t < 100; ++t) {
                Point x;
                try {
                    x = project_to_zero_set(p.ls, random_in_box(p.box, rng));
                } catch (const QuadratureError&) {
                    continue;
                }
                if (std::abs(p.ls.value(x)) > 1e-12)
                    continue;
                Point n = p.ls.gradient(x);
                n = (1.0 / norm(n)) * n;
                CHECK(p.problem.a(x) == doctest::Approx(p.exact.u(0, x) - p.exact.u(1, x)).epsilon(1e-10).scale(1.0));
                // flux jump from finite differences of each branch
                const double d0 = dot(fd_gradient([&](const Point& y) { return p.exact.u(0, y); }, x, dim), n);
                const double d1 = dot(fd_gradient([&](const Point& y) { return p.exact.u(1, y); }, x, dim), n);
                const double b = p.problem.alpha[0] * d0 - p.problem.alpha[1] * d1;
                CHECK(p.problem.b(x, n) == doctest::Approx(b).epsilon(1e-6).scale(1.0));
            }
        }
}

TEST_CASE("star solution guards its singular branch")
{
    const auto p = builtin_problem(5);
    CHECK_THROWS_AS(p.exact.u(1, {0.05, 0.0, 0.0}), AssumptionViolation);
    CHECK_NOTHROW(p.exact.u(0, {0.05, 0.0, 0.0}));
}

TEST_CASE("example metadata")
{
    CHECK_THROWS_AS(builtin_problem(0), InvalidArgument);
    CHECK_THROWS_AS(builtin_problem(7), InvalidArgument);
    CHECK_THROWS_AS(polynomial_problem(1, 0), InvalidArgument);
    CHECK(builtin_problem(1).problem.variant == Mode::Boundary);
    CHECK(builtin_problem(3).box.dim == 3);
    CHECK(builtin_problem(4).problem.variant == Mode::Interface);
    CHECK(builtin_problem(4, 1000.0).problem.alpha[1] == 1000.0);
    // the shifted circle is centred at (s, s)
    const auto shifted = builtin_problem(1, 10.0, 0.05);
    CHECK(std::abs(shifted.ls.value({0.75, 0.05, 0.0})) < 1e-14);
}
