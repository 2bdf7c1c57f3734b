#pragma once

#include "ufe/types.hpp"

#include <span>
#include <vector>

namespace ufe {

/// Points, weights and (for surface rules) unit normals.
struct QuadRule {
    std::vector<Point> nodes;
    std::vector<double> weights;
    std::vector<Point> normals; ///< empty unless this is a surface rule
    int exactness_degree = 0;

    std::size_t size() const { return weights.size(); }
    bool empty() const { return weights.empty(); }
    double total_weight() const;
    void append(const QuadRule& other);
};

/// Rule on a reference simplex in barycentric form: `bary` holds dim+1
/// coordinates per node, weights sum to one (normalized to unit measure).
struct BarycentricRule {
    int dim = 0;
    int degree = 0;
    std::vector<double> bary;
    std::vector<double> weights;
    std::size_t size() const { return weights.size(); }
};

inline constexpr int max_rule_degree = 10;

/// Gauss-Jacobi nodes/weights on [0,1] for the weight (1-s)^alpha.
void gauss_jacobi_01(int npoints, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

/// Cached collapsed-coordinate rule exact for degree <= `degree` on the
/// dim-simplex; weights normalized to sum to 1. dim in {1,2,3}.
const BarycentricRule& barycentric_rule(int dim, int degree);

/// Rule on the unit simplex {x_i >= 0, sum x_i <= 1}; weights sum to 1/dim!.
QuadRule reference_simplex_rule(int dim, int degree);

/// Map a barycentric rule onto the simplex with the given vertices (k+1 of
/// them, embedded in 3D) of measure `measure`, appending to `out`.
void map_rule(const BarycentricRule& rule, std::span<const Point> vertices, double measure, QuadRule& out);

/// k-dimensional measure of a k-simplex embedded in 3D (Gram determinant).
double simplex_measure(std::span<const Point> vertices);

} // namespace ufe
