#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ufe {

/// Points and vectors always carry three components; 2D data keeps z = 0.
using Point = std::array<double, 3>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline Point cross(const Point& a, const Point& b)
{
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Point midpoint(const Point& a, const Point& b) { return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])}; }

/// Axis-aligned box [lo, hi] in `dim` dimensions.
struct Box {
    int dim = 2;
    Point lo{0.0, 0.0, 0.0};
    Point hi{1.0, 1.0, 0.0};
};

/// Which side of the zero level set: NEG is {phi < 0} (Omega_0), POS is {phi >= 0}.
enum class Side { Neg = 0, Pos = 1 };

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class EmptyDomain : public Error {
public:
    using Error::Error;
};

/// A mesh-resolution assumption on the background mesh does not hold; refine.
class AssumptionViolation : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    using Error::Error;
};

class UnsupportedDegree : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    NonConvergence(const std::string& what, double residual, int iterations)
        : Error(what), residual_(residual), iterations_(iterations)
    {
    }
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

class SingularMatrix : public Error {
public:
    using Error::Error;
};

} // namespace ufe
