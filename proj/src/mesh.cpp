#include "ufe/mesh.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace ufe {
namespace {

double signed_volume(int dim, const std::vector<Point>& x, const std::array<int, 4>& e)
{
    const Point a = x[e[1]] - x[e[0]];
    const Point b = x[e[2]] - x[e[0]];
    if (dim == 2)
        return 0.5 * (a[0] * b[1] - a[1] * b[0]);
    const Point c = x[e[3]] - x[e[0]];
    return dot(cross(a, b), c) / 6.0;
}

struct FaceKeyHash {
    std::size_t operator()(const std::array<int, 3>& k) const noexcept
    {
        std::size_t h = static_cast<std::size_t>(k[0]) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::size_t>(k[1]) + 0x7F4A7C15ull + (h << 6) + (h >> 2);
        h ^= static_cast<std::size_t>(k[2]) + 0x165667B1ull + (h << 6) + (h >> 2);
        return h;
    }
};

} // namespace

SimplexMesh::SimplexMesh(int dim, std::vector<Point> vertices, std::vector<std::array<int, 4>> elements,
                         double cell_width)
    : dim_(dim), vertices_(std::move(vertices)), elements_(std::move(elements)), cell_width_(cell_width)
{
    if (dim_ != 2 && dim_ != 3)
        throw InvalidArgument("mesh dimension must be 2 or 3");
    const int nv = num_vertices();
    for (auto& e : elements_) {
        for (int i = 0; i <= dim_; ++i)
            if (e[i] < 0 || e[i] >= nv)
                throw InvalidArgument("element references a vertex out of range");
        if (dim_ == 2)
            e[3] = -1;
        double v = signed_volume(dim_, vertices_, e);
        if (v < 0.0) {
            std::swap(e[dim_ - 1], e[dim_]);
            v = -v;
        }
        if (!(v > 0.0))
            throw InvalidArgument("degenerate element in mesh");
    }
    build_topology();
    if (!(cell_width_ > 0.0))
        cell_width_ = h_;
}

void SimplexMesh::build_topology()
{
    const int ne = num_elements();
    const int nv = num_vertices();

    h_K_.assign(ne, 0.0);
    for (int k = 0; k < ne; ++k) {
        double hk = 0.0;
        for (int i = 0; i <= dim_; ++i)
            for (int j = i + 1; j <= dim_; ++j)
                hk = std::max(hk, norm(vertices_[elements_[k][i]] - vertices_[elements_[k][j]]));
        h_K_[k] = hk;
    }
    h_ = ne > 0 ? *std::max_element(h_K_.begin(), h_K_.end()) : 0.0;

    faces_.clear();
    element_faces_.assign(ne, {-1, -1, -1, -1});
    std::unordered_map<std::array<int, 3>, int, FaceKeyHash> lookup;
    lookup.reserve(static_cast<std::size_t>(ne) * (dim_ + 1));
    for (int k = 0; k < ne; ++k) {
        for (int i = 0; i <= dim_; ++i) {
            std::array<int, 3> key{-1, -1, -1};
            int c = 0;
            for (int j = 0; j <= dim_; ++j)
                if (j != i)
                    key[c++] = elements_[k][j];
            std::sort(key.begin(), key.begin() + dim_);
            auto [it, inserted] = lookup.try_emplace(key, num_faces());
            if (inserted) {
                Face f;
                f.vertices = key;
                f.elements = {k, -1};
                faces_.push_back(f);
            } else {
                Face& f = faces_[it->second];
                if (f.elements[1] >= 0)
                    throw InvalidArgument("non-manifold mesh: face shared by more than two elements");
                f.elements[1] = k;
            }
            element_faces_[k][i] = it->second;
        }
    }

    vertex_elements_ptr_.assign(nv + 1, 0);
    for (int k = 0; k < ne; ++k)
        for (int i = 0; i <= dim_; ++i)
            ++vertex_elements_ptr_[elements_[k][i] + 1];
    for (int v = 0; v < nv; ++v)
        vertex_elements_ptr_[v + 1] += vertex_elements_ptr_[v];
    vertex_elements_.assign(vertex_elements_ptr_[nv], -1);
    std::vector<int> fill(vertex_elements_ptr_.begin(), vertex_elements_ptr_.end() - 1);
    for (int k = 0; k < ne; ++k)
        for (int i = 0; i <= dim_; ++i)
            vertex_elements_[fill[elements_[k][i]]++] = k;
}

double SimplexMesh::volume(int k) const { return signed_volume(dim_, vertices_, elements_[k]); }

Point SimplexMesh::centroid(int k) const
{
    Point c{0.0, 0.0, 0.0};
    for (int i = 0; i <= dim_; ++i)
        c = c + vertices_[elements_[k][i]];
    return (1.0 / (dim_ + 1)) * c;
}

double SimplexMesh::inradius(int k) const
{
    double boundary = 0.0;
    for (int f : element_faces(k))
        boundary += face_measure(f);
    return dim_ * volume(k) / boundary;
}

std::array<Point, 3> SimplexMesh::face_points(int f) const
{
    const Face& fc = faces_[f];
    std::array<Point, 3> p{};
    for (int i = 0; i < dim_; ++i)
        p[i] = vertices_[fc.vertices[i]];
    return p;
}

double SimplexMesh::face_diameter(int f) const
{
    const auto p = face_points(f);
    double h = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i + 1; j < dim_; ++j)
            h = std::max(h, norm(p[i] - p[j]));
    return h;
}

double SimplexMesh::face_measure(int f) const
{
    const auto p = face_points(f);
    if (dim_ == 2)
        return norm(p[1] - p[0]);
    return 0.5 * norm(cross(p[1] - p[0], p[2] - p[0]));
}

Point SimplexMesh::face_normal(int f) const
{
    const auto p = face_points(f);
    Point n;
    if (dim_ == 2) {
        const Point t = p[1] - p[0];
        n = {t[1], -t[0], 0.0};
    } else {
        n = cross(p[1] - p[0], p[2] - p[0]);
    }
    n = (1.0 / norm(n)) * n;
    Point fc{0.0, 0.0, 0.0};
    for (int i = 0; i < dim_; ++i)
        fc = fc + p[i];
    fc = (1.0 / dim_) * fc;
    if (dot(fc - centroid(faces_[f].elements[0]), n) < 0.0)
        n = -1.0 * n;
    return n;
}

std::vector<int> SimplexMesh::element_patch(int k) const
{
    if (k < 0 || k >= num_elements())
        throw InvalidArgument("element index out of range: " + std::to_string(k));
    std::vector<int> patch;
    for (int i = 0; i <= dim_; ++i)
        for (int e : vertex_elements(elements_[k][i]))
            patch.push_back(e);
    std::sort(patch.begin(), patch.end());
    patch.erase(std::unique(patch.begin(), patch.end()), patch.end());
    return patch;
}

SimplexMesh build_structured_mesh(const Box& box, int n)
{
    if (n < 1)
        throw InvalidArgument("cells per axis must be >= 1");
    if (box.dim != 2 && box.dim != 3)
        throw InvalidArgument("box dimension must be 2 or 3");
    for (int d = 0; d < box.dim; ++d)
        if (!(box.hi[d] > box.lo[d]))
            throw InvalidArgument("degenerate box");
    const double side = box.hi[0] - box.lo[0];
    for (int d = 1; d < box.dim; ++d)
        if (std::abs((box.hi[d] - box.lo[d]) - side) > 1e-12 * side)
            throw InvalidArgument("structured meshes require a cubic box");

    std::vector<Point> x;
    std::vector<std::array<int, 4>> elems;
    const int np = n + 1;
    auto coord = [&](int d, int i) { return i == n ? box.hi[d] : box.lo[d] + (box.hi[d] - box.lo[d]) * i / n; };

    if (box.dim == 2) {
        x.reserve(static_cast<std::size_t>(np) * np);
        for (int j = 0; j < np; ++j)
            for (int i = 0; i < np; ++i)
                x.push_back({coord(0, i), coord(1, j), 0.0});
        auto id = [np](int i, int j) { return j * np + i; };
        elems.reserve(2 * static_cast<std::size_t>(n) * n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const int v00 = id(i, j), v10 = id(i + 1, j), v11 = id(i + 1, j + 1), v01 = id(i, j + 1);
                elems.push_back({v00, v10, v11, -1});
                elems.push_back({v00, v11, v01, -1});
            }
    } else {
        x.reserve(static_cast<std::size_t>(np) * np * np);
        for (int k = 0; k < np; ++k)
            for (int j = 0; j < np; ++j)
                for (int i = 0; i < np; ++i)
                    x.push_back({coord(0, i), coord(1, j), coord(2, k)});
        auto id = [np](int i, int j, int k) { return (k * np + j) * np + i; };
        static constexpr std::array<std::array<int, 3>, 6> perms{
            {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
        elems.reserve(6 * static_cast<std::size_t>(n) * n * n);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    for (const auto& p : perms) {
                        std::array<int, 3> c{i, j, k};
                        std::array<int, 4> tet{};
                        tet[0] = id(c[0], c[1], c[2]);
                        for (int s = 0; s < 3; ++s) {
                            ++c[p[s]];
                            tet[s + 1] = id(c[0], c[1], c[2]);
                        }
                        elems.push_back(tet);
                    }
    }
    return SimplexMesh(box.dim, std::move(x), std::move(elems), side / n);
}

SimplexMesh read_mesh(std::istream& in)
{
    int dim = 0, nv = 0, ne = 0;
    if (!(in >> dim >> nv >> ne))
        throw InvalidArgument("mesh file: malformed header");
    if ((dim != 2 && dim != 3) || nv <= 0 || ne <= 0)
        throw InvalidArgument("mesh file: invalid header values");
    std::vector<Point> x(nv, Point{0.0, 0.0, 0.0});
    for (auto& p : x)
        for (int d = 0; d < dim; ++d)
            if (!(in >> p[d]))
                throw InvalidArgument("mesh file: truncated vertex list");
    std::vector<std::array<int, 4>> elems(ne, {-1, -1, -1, -1});
    for (auto& e : elems)
        for (int i = 0; i <= dim; ++i)
            if (!(in >> e[i]))
                throw InvalidArgument("mesh file: truncated element list");
    return SimplexMesh(dim, std::move(x), std::move(elems), 0.0);
}

void write_mesh(std::ostream& out, const SimplexMesh& mesh)
{
    const int dim = mesh.dim();
    out << dim << ' ' << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
    out << std::setprecision(17);
    for (const Point& p : mesh.vertices()) {
        for (int d = 0; d < dim; ++d)
            out << (d ? " " : "") << p[d];
        out << '\n';
    }
    for (int k = 0; k < mesh.num_elements(); ++k) {
        const auto e = mesh.element(k);
        for (int i = 0; i <= dim; ++i)
            out << (i ? " " : "") << e[i];
        out << '\n';
    }
}

} // namespace ufe
