#pragma once

#include "ufe/types.hpp"

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

namespace ufe {

/// A (dim-1)-dimensional face shared by one or two elements.
struct Face {
    std::array<int, 3> vertices{-1, -1, -1}; ///< first `dim` entries used, sorted ascending
    std::array<int, 2> elements{-1, -1};     ///< elements[1] == -1 on the boundary
    bool boundary() const { return elements[1] < 0; }
};

/// Simplicial background mesh of triangles (dim 2) or tetrahedra (dim 3).
///
/// Elements are stored with positive signed volume. Faces are numbered in
/// order of first appearance while sweeping elements, so the numbering is a
/// pure function of the element list.
class SimplexMesh {
public:
    SimplexMesh() = default;
    /// A non-positive cell_width falls back to h (imported meshes).
    SimplexMesh(int dim, std::vector<Point> vertices, std::vector<std::array<int, 4>> elements, double cell_width);

    int dim() const { return dim_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_elements() const { return static_cast<int>(elements_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }
    int vertices_per_element() const { return dim_ + 1; }

    const Point& vertex(int v) const { return vertices_[v]; }
    const std::vector<Point>& vertices() const { return vertices_; }
    std::span<const int> element(int k) const { return {elements_[k].data(), static_cast<std::size_t>(dim_ + 1)}; }
    const Face& face(int f) const { return faces_[f]; }
    const std::vector<Face>& faces() const { return faces_; }
    /// Face indices of element k; local face i is opposite local vertex i.
    std::span<const int> element_faces(int k) const
    {
        return {element_faces_[k].data(), static_cast<std::size_t>(dim_ + 1)};
    }

    /// Longest edge of element k.
    double diameter(int k) const { return h_K_[k]; }
    /// max_K h_K
    double h() const { return h_; }
    double cell_width() const { return cell_width_; }
    double volume(int k) const;
    double inradius(int k) const;
    Point centroid(int k) const;

    /// Longest edge of face f (h_e).
    double face_diameter(int f) const;
    double face_measure(int f) const;
    /// Unit normal of face f pointing out of face(f).elements[0].
    Point face_normal(int f) const;
    std::array<Point, 3> face_points(int f) const;

    /// Elements whose closure meets the closure of k (shares a vertex), k included, sorted.
    std::vector<int> element_patch(int k) const;
    std::span<const int> vertex_elements(int v) const
    {
        return {vertex_elements_.data() + vertex_elements_ptr_[v],
                static_cast<std::size_t>(vertex_elements_ptr_[v + 1] - vertex_elements_ptr_[v])};
    }

private:
    void build_topology();

    int dim_ = 2;
    std::vector<Point> vertices_;
    std::vector<std::array<int, 4>> elements_;
    std::vector<Face> faces_;
    std::vector<std::array<int, 4>> element_faces_;
    std::vector<int> vertex_elements_ptr_;
    std::vector<int> vertex_elements_;
    std::vector<double> h_K_;
    double h_ = 0.0;
    double cell_width_ = 0.0;
};

/// Structured mesh of a box: 2D cells split along the (lo,lo)-(hi,hi) diagonal
/// into 2 triangles, 3D cubes Kuhn-split into 6 tetrahedra.
SimplexMesh build_structured_mesh(const Box& box, int n);

/// Plain-text mesh: `dim n_vertices n_elements`, then vertices, then zero-based elements.
SimplexMesh read_mesh(std::istream& in);
void write_mesh(std::ostream& out, const SimplexMesh& mesh);

} // namespace ufe
