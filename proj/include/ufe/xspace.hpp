#pragma once

#include "ufe/geometry.hpp"
#include "ufe/mesh.hpp"

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace ufe {

enum class Continuity { C0, DG };

inline constexpr int max_space_degree = 4;
inline constexpr int max_local_dofs = 35; // P4 tetrahedron

/// Shape values and physical gradients at one point, stored by component.
struct BasisValues {
    int n = 0;
    std::array<double, max_local_dofs> value{};
    std::array<std::array<double, max_local_dofs>, 3> grad{}; ///< grad[d][i]
};

/// Finite element space carried by the elements away from the zero level set.
///
/// Elements strictly inside a side own Lagrange degrees of freedom. A cut
/// element owns none: on each side it evaluates the polynomial of its host
/// element, mapped through the host's affine map, so reference coordinates may
/// leave the unit simplex. In interface mode side 0 is numbered first.
class ExtendedSpace {
public:
    ExtendedSpace(const SimplexMesh& mesh, const DomainClassification& cls, int degree, Continuity continuity);

    const SimplexMesh& mesh() const { return *mesh_; }
    const DomainClassification& classification() const { return *cls_; }
    int degree() const { return degree_; }
    Continuity continuity() const { return continuity_; }
    Mode mode() const { return cls_->mode; }
    int num_sides() const { return cls_->mode == Mode::Interface ? 2 : 1; }
    int dof_count() const { return dof_count_; }
    /// First global dof of each side and one past the end.
    int side_begin(int side) const { return side_offset_[side]; }
    int side_end(int side) const { return side_offset_[side + 1]; }
    int local_size() const { return n_local_; }

    /// Host element evaluated on (K, side); K itself when K lies inside that
    /// side, -1 when K lies entirely on the other side.
    int delegate(int k, int side) const { return delegate_[side][k]; }
    /// Whether K carries its own dofs on this side.
    bool owns_dofs(int k, int side) const;
    /// Global dofs of an owning element (local Lagrange node order).
    std::span<const int> element_dofs(int k, int side) const;
    /// Dofs used on (K, side), i.e. those of the delegate; empty when inactive.
    std::span<const int> dofs(int k, int side) const;

    /// Lagrange multi-indices (dim+1 entries summing to the degree).
    const std::vector<std::array<int, 4>>& reference_nodes() const { return nodes_; }
    /// Physical Lagrange nodes of element k.
    std::vector<Point> node_points(int k) const;
    /// Position of every global dof.
    const std::vector<Point>& dof_points() const { return dof_points_; }

    /// Shape functions of element `host` evaluated at x (any x; extension by
    /// polynomial continuation).
    void eval_host(int host, const Point& x, BasisValues& out) const;
    /// Shape functions used on (K, side) at x; returns false when (K, side) is inactive.
    bool eval_basis(int k, int side, const Point& x, BasisValues& out) const;

    /// Value and gradient of the finite element function with coefficients c on (K, side).
    double evaluate(std::span<const double> c, int k, int side, const Point& x, Point* grad = nullptr) const;

private:
    void barycentric(int host, const Point& x, std::array<double, 4>& lambda) const;

    const SimplexMesh* mesh_;
    const DomainClassification* cls_;
    int degree_;
    Continuity continuity_;
    int n_local_ = 0;
    int dof_count_ = 0;
    std::array<int, 3> side_offset_{0, 0, 0};
    std::vector<std::array<int, 4>> nodes_;
    std::array<std::vector<int>, 2> delegate_;
    std::array<std::vector<int>, 2> element_dofs_; ///< n_local per element, -1 when not owning
    std::vector<Point> dof_points_;
    // barycentric map per element: lambda_i = c_i + g_i . x for i = 0..dim
    std::vector<std::array<double, 4>> bary_const_;
    std::vector<std::array<Point, 4>> bary_grad_;
};

/// Coefficients with c[dof] = u(side, dof position). u receives the side index.
std::vector<double> interpolate(const ExtendedSpace& space, const std::function<double(int, const Point&)>& u);

} // namespace ufe
