#include "ufe/problems.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace ufe {
namespace {

constexpr double pi = std::numbers::pi;

Box square() { return {2, {-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0}}; }
Box unit_cube() { return {3, {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}}; }

LevelSet circle(double r, double cx, double cy)
{
    LevelSet ls;
    ls.phi = [=](const Point& p) { return (p[0] - cx) * (p[0] - cx) + (p[1] - cy) * (p[1] - cy) - r * r; };
    ls.grad = [=](const Point& p) { return Point{2.0 * (p[0] - cx), 2.0 * (p[1] - cy), 0.0}; };
    ls.descriptor = "circle r=" + std::to_string(r);
    ls.scale = 2.0;
    return ls;
}

// r - r0 - amp * trig(5 theta) with gradient e_r - (amp * trig'(5 theta) * 5 / r) e_theta
LevelSet polar_curve(double r0, double amp, bool use_cos, std::string name)
{
    LevelSet ls;
    ls.phi = [=](const Point& p) {
        const double r = std::hypot(p[0], p[1]);
        const double t = std::atan2(p[1], p[0]);
        return r - r0 - amp * (use_cos ? std::cos(5.0 * t) : std::sin(5.0 * t));
    };
    ls.grad = [=](const Point& p) {
        const double r = std::hypot(p[0], p[1]);
        if (r == 0.0)
            return Point{1.0, 0.0, 0.0};
        const double t = std::atan2(p[1], p[0]);
        // d/dtheta of -amp * trig(5t)
        const double dt = use_cos ? 5.0 * amp * std::sin(5.0 * t) : -5.0 * amp * std::cos(5.0 * t);
        const double c = p[0] / r, s = p[1] / r;
        return Point{c - dt / r * s, s + dt / r * c, 0.0};
    };
    ls.descriptor = std::move(name);
    ls.scale = 2.0;
    return ls;
}

// Global polynomial sum_k c_k x^a y^b z^c.
struct Poly {
    struct Term {
        double c;
        int a, b, e;
    };
    std::vector<Term> terms;

    static double pw(double x, int n) { return n <= 0 ? 1.0 : std::pow(x, n); }
    double value(const Point& p) const
    {
        double s = 0.0;
        for (const auto& t : terms)
            s += t.c * pw(p[0], t.a) * pw(p[1], t.b) * pw(p[2], t.e);
        return s;
    }
    Point grad(const Point& p) const
    {
        Point g{0.0, 0.0, 0.0};
        for (const auto& t : terms) {
            if (t.a > 0)
                g[0] += t.c * t.a * pw(p[0], t.a - 1) * pw(p[1], t.b) * pw(p[2], t.e);
            if (t.b > 0)
                g[1] += t.c * t.b * pw(p[0], t.a) * pw(p[1], t.b - 1) * pw(p[2], t.e);
            if (t.e > 0)
                g[2] += t.c * t.e * pw(p[0], t.a) * pw(p[1], t.b) * pw(p[2], t.e - 1);
        }
        return g;
    }
    double laplacian(const Point& p) const
    {
        double s = 0.0;
        for (const auto& t : terms) {
            if (t.a > 1)
                s += t.c * t.a * (t.a - 1) * pw(p[0], t.a - 2) * pw(p[1], t.b) * pw(p[2], t.e);
            if (t.b > 1)
                s += t.c * t.b * (t.b - 1) * pw(p[0], t.a) * pw(p[1], t.b - 2) * pw(p[2], t.e);
            if (t.e > 1)
                s += t.c * t.e * (t.e - 1) * pw(p[0], t.a) * pw(p[1], t.b) * pw(p[2], t.e - 2);
        }
        return s;
    }
};

void finish_interface(BuiltinProblem& p)
{
    const ExactSolution ex = p.exact;
    const auto alpha = p.problem.alpha;
    p.problem.variant = Mode::Interface;
    p.problem.a = [ex](const Point& x) { return ex.u(0, x) - ex.u(1, x); };
    p.problem.b = [ex, alpha](const Point& x, const Point& n) {
        return dot(alpha[0] * ex.grad(0, x) - alpha[1] * ex.grad(1, x), n);
    };
    p.problem.g = [ex](const Point& x) { return ex.u(1, x); };
}

void finish_boundary(BuiltinProblem& p)
{
    const ExactSolution ex = p.exact;
    p.problem.variant = Mode::Boundary;
    p.problem.g = [ex](const Point& x) { return ex.u(0, x); };
}

BuiltinProblem example1(double shift)
{
    BuiltinProblem p;
    p.id = 1;
    p.name = "disk r=0.7, u=sin(2 pi x) sin(4 pi y)";
    p.box = square();
    p.ls = circle(0.7, shift, shift);
    p.exact.u = [](int, const Point& x) { return std::sin(2 * pi * x[0]) * std::sin(4 * pi * x[1]); };
    p.exact.grad = [](int, const Point& x) {
        return Point{2 * pi * std::cos(2 * pi * x[0]) * std::sin(4 * pi * x[1]),
                     4 * pi * std::sin(2 * pi * x[0]) * std::cos(4 * pi * x[1]), 0.0};
    };
    p.problem.f = [](int, const Point& x) { return 20 * pi * pi * std::sin(2 * pi * x[0]) * std::sin(4 * pi * x[1]); };
    finish_boundary(p);
    p.default_grids = {10, 20, 40, 80};
    return p;
}

BuiltinProblem example2()
{
    BuiltinProblem p;
    p.id = 2;
    p.name = "flower r=0.6+0.2cos(5 theta), u=cos(2 pi (x-y))";
    p.box = square();
    p.ls = polar_curve(0.6, 0.2, true, "flower");
    // cos(2 pi x) cos(2 pi y) + sin(2 pi x) sin(2 pi y) = cos(2 pi (x - y))
    p.exact.u = [](int, const Point& x) { return std::cos(2 * pi * (x[0] - x[1])); };
    p.exact.grad = [](int, const Point& x) {
        const double s = -2 * pi * std::sin(2 * pi * (x[0] - x[1]));
        return Point{s, -s, 0.0};
    };
    p.problem.f = [](int, const Point& x) { return 8 * pi * pi * std::cos(2 * pi * (x[0] - x[1])); };
    finish_boundary(p);
    p.default_grids = {22, 30, 42};
    return p;
}

BuiltinProblem example3()
{
    BuiltinProblem p;
    p.id = 3;
    p.name = "sphere r=0.35, u=cos(pi x) cos(pi y) cos(pi z)";
    p.box = unit_cube();
    p.ls.phi = [](const Point& x) {
        return (x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5) + (x[2] - 0.5) * (x[2] - 0.5) - 0.35 * 0.35;
    };
    p.ls.grad = [](const Point& x) { return Point{2 * (x[0] - 0.5), 2 * (x[1] - 0.5), 2 * (x[2] - 0.5)}; };
    p.ls.descriptor = "sphere r=0.35";
    p.exact.u = [](int, const Point& x) { return std::cos(pi * x[0]) * std::cos(pi * x[1]) * std::cos(pi * x[2]); };
    p.exact.grad = [](int, const Point& x) {
        const double cx = std::cos(pi * x[0]), cy = std::cos(pi * x[1]), cz = std::cos(pi * x[2]);
        const double sx = std::sin(pi * x[0]), sy = std::sin(pi * x[1]), sz = std::sin(pi * x[2]);
        return Point{-pi * sx * cy * cz, -pi * cx * sy * cz, -pi * cx * cy * sz};
    };
    p.problem.f = [](int, const Point& x) {
        return 3 * pi * pi * std::cos(pi * x[0]) * std::cos(pi * x[1]) * std::cos(pi * x[2]);
    };
    finish_boundary(p);
    p.default_grids = {4, 8, 16};
    return p;
}

BuiltinProblem example4(double contrast, double shift)
{
    BuiltinProblem p;
    p.id = 4;
    p.name = "circular interface r=0.5, alpha=(1," + std::to_string(contrast) + ")";
    p.box = square();
    p.ls = circle(0.5, shift, shift);
    const double b = contrast, c = shift;
    p.problem.alpha = {1.0, b};
    p.exact.u = [b, c](int side, const Point& x) {
        const double X = x[0] - c, Y = x[1] - c;
        if (side == 0)
            return std::sin(2 * pi * X) * std::sin(pi * Y);
        const double r2 = X * X + Y * Y;
        return -(r2 * r2 / 2 + r2) / b;
    };
    p.exact.grad = [b, c](int side, const Point& x) {
        const double X = x[0] - c, Y = x[1] - c;
        if (side == 0)
            return Point{2 * pi * std::cos(2 * pi * X) * std::sin(pi * Y), pi * std::sin(2 * pi * X) * std::cos(pi * Y),
                         0.0};
        const double s = -(2 * (X * X + Y * Y) + 2) / b;
        return Point{s * X, s * Y, 0.0};
    };
    p.problem.f = [c](int side, const Point& x) {
        const double X = x[0] - c, Y = x[1] - c;
        if (side == 0)
            return 5 * pi * pi * std::sin(2 * pi * X) * std::sin(pi * Y);
        return 8 * (X * X + Y * Y) + 4;
    };
    finish_interface(p);
    p.default_grids = {10, 20, 40, 80};
    return p;
}

BuiltinProblem example5()
{
    BuiltinProblem p;
    p.id = 5;
    p.name = "star interface r=1/2+sin(5 theta)/7, alpha=(1,10)";
    p.box = square();
    p.ls = polar_curve(0.5, 1.0 / 7.0, false, "star");
    p.problem.alpha = {1.0, 10.0};
    auto outer_guard = [](double r) {
        if (r < 0.1)
            throw AssumptionViolation("outer branch of the star solution evaluated at r = " + std::to_string(r));
    };
    p.exact.u = [outer_guard](int side, const Point& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        if (side == 0)
            return std::exp(r2);
        const double r = std::sqrt(r2);
        outer_guard(r);
        return 0.1 * r2 - 0.01 * std::log(2 * r);
    };
    p.exact.grad = [outer_guard](int side, const Point& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        if (side == 0) {
            const double e = 2 * std::exp(r2);
            return Point{e * x[0], e * x[1], 0.0};
        }
        outer_guard(std::sqrt(r2));
        const double s = 0.2 - 0.01 / r2;
        return Point{s * x[0], s * x[1], 0.0};
    };
    p.problem.f = [](int side, const Point& x) {
        const double r2 = x[0] * x[0] + x[1] * x[1];
        if (side == 0)
            return -(4 + 4 * r2) * std::exp(r2);
        return -4.0;
    };
    finish_interface(p);
    p.default_grids = {26, 34, 46, 62};
    return p;
}

BuiltinProblem example6()
{
    BuiltinProblem p;
    p.id = 6;
    p.name = "two-atom molecular surface, alpha=1";
    p.box = unit_cube();
    p.ls.phi = [](const Point& x) {
        const double X = 2.5 * (x[0] - 0.5), Y = 4 * (x[1] - 0.5), Z = 2.5 * (x[2] - 0.5);
        const double s = X * X + Y * Y + Z * Z + 0.6;
        return s * s - 3.5 * Y * Y - 0.6;
    };
    p.ls.grad = [](const Point& x) {
        const double X = 2.5 * (x[0] - 0.5), Y = 4 * (x[1] - 0.5), Z = 2.5 * (x[2] - 0.5);
        const double s = X * X + Y * Y + Z * Z + 0.6;
        return Point{10 * s * X, 16 * s * Y - 28 * Y, 10 * s * Z};
    };
    p.ls.descriptor = "molecular surface";
    p.exact.u = [](int side, const Point& x) {
        if (side == 0)
            return std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]) * std::sin(2 * pi * x[2]);
        return std::exp(2 * (x[0] + x[1] + x[2]));
    };
    p.exact.grad = [](int side, const Point& x) {
        if (side == 0) {
            const double sx = std::sin(2 * pi * x[0]), sy = std::sin(2 * pi * x[1]), sz = std::sin(2 * pi * x[2]);
            const double cx = std::cos(2 * pi * x[0]), cy = std::cos(2 * pi * x[1]), cz = std::cos(2 * pi * x[2]);
            return Point{2 * pi * cx * sy * sz, 2 * pi * sx * cy * sz, 2 * pi * sx * sy * cz};
        }
        const double e = 2 * std::exp(2 * (x[0] + x[1] + x[2]));
        return Point{e, e, e};
    };
    p.problem.f = [](int side, const Point& x) {
        if (side == 0)
            return 12 * pi * pi * std::sin(2 * pi * x[0]) * std::sin(2 * pi * x[1]) * std::sin(2 * pi * x[2]);
        return -12 * std::exp(2 * (x[0] + x[1] + x[2]));
    };
    finish_interface(p);
    p.default_grids = {4, 8, 16};
    return p;
}

} // namespace

BuiltinProblem builtin_problem(int id, double contrast, double shift)
{
    switch (id) {
    case 1:
        return example1(shift);
    case 2:
        return example2();
    case 3:
        return example3();
    case 4:
        return example4(contrast, shift);
    case 5:
        return example5();
    case 6:
        return example6();
    default:
        throw InvalidArgument("unknown example id " + std::to_string(id) + " (expected 1..6)");
    }
}

BuiltinProblem polynomial_problem(int geometry_id, int m)
{
    if (m < 1)
        throw InvalidArgument("polynomial degree must be >= 1");
    BuiltinProblem p = builtin_problem(geometry_id);
    p.name += " with a degree-" + std::to_string(m) + " polynomial solution";
    const bool three_d = p.box.dim == 3;
    Poly u0{{{1.0, m, 0, 0}, {0.5, 1, m - 1, 0}, {1.0, 0, 0, 0}, {1.0, 1, 0, 0}, {1.0, 0, 1, 0}}};
    Poly u1{{{-1.0, 0, m, 0}, {0.3, m, 0, 0}, {2.0, 1, 0, 0}, {0.5, 0, 0, 0}}};
    if (three_d) {
        u0.terms.push_back({0.7, 0, 0, m});
        u1.terms.push_back({-0.4, 0, 1, m - 1});
    }
    const auto alpha = p.problem.alpha;
    p.exact.u = [u0, u1](int side, const Point& x) { return side == 0 ? u0.value(x) : u1.value(x); };
    p.exact.grad = [u0, u1](int side, const Point& x) { return side == 0 ? u0.grad(x) : u1.grad(x); };
    p.problem.f = [u0, u1, alpha](int side, const Point& x) {
        return -alpha[side] * (side == 0 ? u0.laplacian(x) : u1.laplacian(x));
    };
    if (p.problem.variant == Mode::Interface)
        finish_interface(p);
    else
        finish_boundary(p);
    return p;
}

} // namespace ufe
