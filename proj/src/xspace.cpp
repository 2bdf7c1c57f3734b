#include "ufe/xspace.hpp"

#include <algorithm>
#include <map>
#include <string>

namespace ufe {
namespace {

std::vector<std::array<int, 4>> lagrange_multi_indices(int dim, int m)
{
    std::vector<std::array<int, 4>> out;
    for (int a = m; a >= 0; --a)
        for (int b = m - a; b >= 0; --b) {
            if (dim == 2) {
                out.push_back({a, b, m - a - b, 0});
                continue;
            }
            for (int c = m - a - b; c >= 0; --c)
                out.push_back({a, b, c, m - a - b - c});
        }
    return out;
}

Tag owning_tag(int side) { return side == 0 ? Tag::Side0 : Tag::Side1; }

} // namespace

ExtendedSpace::ExtendedSpace(const SimplexMesh& mesh, const DomainClassification& cls, int degree,
                             Continuity continuity)
    : mesh_(&mesh), cls_(&cls), degree_(degree), continuity_(continuity)
{
    if (degree < 1 || degree > max_space_degree)
        throw UnsupportedDegree("polynomial degree " + std::to_string(degree) + " is outside [1, " +
                                std::to_string(max_space_degree) + "]");
    if (static_cast<int>(cls.element_tag.size()) != mesh.num_elements())
        throw InvalidArgument("classification does not match the mesh");
    const int dim = mesh.dim();
    const int ne = mesh.num_elements();
    nodes_ = lagrange_multi_indices(dim, degree);
    n_local_ = static_cast<int>(nodes_.size());

    bary_const_.resize(ne);
    bary_grad_.resize(ne);
    for (int k = 0; k < ne; ++k) {
        const auto e = mesh.element(k);
        const Point v0 = mesh.vertex(e[0]);
        std::array<Point, 3> cols{};
        for (int d = 0; d < dim; ++d)
            cols[d] = mesh.vertex(e[d + 1]) - v0;
        std::array<Point, 4> g{};
        if (dim == 2) {
            const double det = cols[0][0] * cols[1][1] - cols[1][0] * cols[0][1];
            g[1] = {cols[1][1] / det, -cols[1][0] / det, 0.0};
            g[2] = {-cols[0][1] / det, cols[0][0] / det, 0.0};
        } else {
            const double det = dot(cols[0], cross(cols[1], cols[2]));
            g[1] = (1.0 / det) * cross(cols[1], cols[2]);
            g[2] = (1.0 / det) * cross(cols[2], cols[0]);
            g[3] = (1.0 / det) * cross(cols[0], cols[1]);
        }
        g[0] = {0.0, 0.0, 0.0};
        std::array<double, 4> c{};
        c[0] = 1.0;
        for (int d = 1; d <= dim; ++d) {
            c[d] = -dot(g[d], v0);
            g[0] = g[0] - g[d];
            c[0] -= c[d];
        }
        bary_const_[k] = c;
        bary_grad_[k] = g;
    }

    const int sides = num_sides();
    for (int s = 0; s < 2; ++s) {
        delegate_[s].assign(ne, -1);
        element_dofs_[s].clear();
    }
    int next = 0;
    for (int s = 0; s < sides; ++s) {
        side_offset_[s] = next;
        element_dofs_[s].assign(static_cast<std::size_t>(ne) * n_local_, -1);
        std::map<std::array<int, 8>, int> shared;
        int owners = 0;
        for (int k = 0; k < ne; ++k) {
            const Tag t = cls.element_tag[k];
            if (t == owning_tag(s)) {
                delegate_[s][k] = k;
                ++owners;
                const auto e = mesh.element(k);
                for (int i = 0; i < n_local_; ++i) {
                    int dof;
                    if (continuity == Continuity::DG) {
                        dof = next++;
                    } else {
                        std::array<std::pair<int, int>, 4> key{};
                        int nk = 0;
                        for (int j = 0; j <= dim; ++j)
                            if (nodes_[i][j] > 0)
                                key[nk++] = {e[j], nodes_[i][j]};
                        std::sort(key.begin(), key.begin() + nk);
                        std::array<int, 8> flat;
                        flat.fill(-1);
                        for (int j = 0; j < nk; ++j) {
                            flat[2 * j] = key[j].first;
                            flat[2 * j + 1] = key[j].second;
                        }
                        auto [it, inserted] = shared.try_emplace(flat, next);
                        if (inserted)
                            ++next;
                        dof = it->second;
                    }
                    element_dofs_[s][static_cast<std::size_t>(k) * n_local_ + i] = dof;
                    if (dof == static_cast<int>(dof_points_.size())) {
                        Point x{0.0, 0.0, 0.0};
                        for (int j = 0; j <= dim; ++j)
                            x = x + (static_cast<double>(nodes_[i][j]) / degree) * mesh.vertex(e[j]);
                        dof_points_.push_back(x);
                    }
                }
            } else if (t == Tag::Cut) {
                const int host = s == 0 ? cls.host0[k] : cls.host1[k];
                if (host < 0)
                    throw InvalidArgument("cut element " + std::to_string(k) + " has no host; run assign_hosts first");
                delegate_[s][k] = host;
            }
        }
        if (owners == 0)
            throw EmptyDomain("no element lies strictly inside side " + std::to_string(s) +
                              "; the mesh does not resolve the domain");
    }
    side_offset_[sides] = next;
    if (sides == 1)
        side_offset_[2] = next;
    dof_count_ = next;
}

bool ExtendedSpace::owns_dofs(int k, int side) const { return delegate_[side][k] == k; }

std::span<const int> ExtendedSpace::element_dofs(int k, int side) const
{
    if (!owns_dofs(k, side))
        return {};
    return {element_dofs_[side].data() + static_cast<std::size_t>(k) * n_local_, static_cast<std::size_t>(n_local_)};
}

std::span<const int> ExtendedSpace::dofs(int k, int side) const
{
    if (side < 0 || side >= num_sides() || k < 0 || k >= mesh_->num_elements())
        throw InvalidArgument("element/side index out of range");
    const int h = delegate_[side][k];
    if (h < 0)
        return {};
    return element_dofs(h, side);
}

std::vector<Point> ExtendedSpace::node_points(int k) const
{
    const auto e = mesh_->element(k);
    std::vector<Point> out;
    for (const auto& a : nodes_) {
        Point x{0.0, 0.0, 0.0};
        for (int j = 0; j <= mesh_->dim(); ++j)
            x = x + (static_cast<double>(a[j]) / degree_) * mesh_->vertex(e[j]);
        out.push_back(x);
    }
    return out;
}

void ExtendedSpace::barycentric(int host, const Point& x, std::array<double, 4>& lambda) const
{
    for (int i = 0; i <= mesh_->dim(); ++i)
        lambda[i] = bary_const_[host][i] + dot(bary_grad_[host][i], x);
}

void ExtendedSpace::eval_host(int host, const Point& x, BasisValues& out) const
{
    const int dim = mesh_->dim();
    const int m = degree_;
    std::array<double, 4> lambda{};
    barycentric(host, x, lambda);
    // l[i][k] = prod_{j<k} (m lambda_i - j) / (j + 1) and its derivative in lambda_i
    double l[4][max_space_degree + 1], dl[4][max_space_degree + 1];
    for (int i = 0; i <= dim; ++i) {
        l[i][0] = 1.0;
        dl[i][0] = 0.0;
        const double t = m * lambda[i];
        for (int k = 0; k < m; ++k) {
            l[i][k + 1] = l[i][k] * (t - k) / (k + 1);
            dl[i][k + 1] = (dl[i][k] * (t - k) + l[i][k] * m) / (k + 1);
        }
    }
    const auto& g = bary_grad_[host];
    out.n = n_local_;
    for (int a = 0; a < n_local_; ++a) {
        const auto& al = nodes_[a];
        double v = 1.0;
        for (int i = 0; i <= dim; ++i)
            v *= l[i][al[i]];
        Point grad{0.0, 0.0, 0.0};
        for (int i = 0; i <= dim; ++i) {
            double p = dl[i][al[i]];
            if (p == 0.0)
                continue;
            for (int j = 0; j <= dim; ++j)
                if (j != i)
                    p *= l[j][al[j]];
            grad = grad + p * g[i];
        }
        out.value[a] = v;
        out.grad[0][a] = grad[0];
        out.grad[1][a] = grad[1];
        out.grad[2][a] = grad[2];
    }
}

bool ExtendedSpace::eval_basis(int k, int side, const Point& x, BasisValues& out) const
{
    const int h = delegate_[side][k];
    if (h < 0) {
        out.n = 0;
        return false;
    }
    eval_host(h, x, out);
    return true;
}

double ExtendedSpace::evaluate(std::span<const double> c, int k, int side, const Point& x, Point* grad) const
{
    BasisValues b;
    if (!eval_basis(k, side, x, b)) {
        if (grad)
            *grad = {0.0, 0.0, 0.0};
        return 0.0;
    }
    const auto d = dofs(k, side);
    double v = 0.0;
    Point g{0.0, 0.0, 0.0};
    for (int a = 0; a < b.n; ++a) {
        const double ca = c[d[a]];
        v += ca * b.value[a];
        g[0] += ca * b.grad[0][a];
        g[1] += ca * b.grad[1][a];
        g[2] += ca * b.grad[2][a];
    }
    if (grad)
        *grad = g;
    return v;
}

std::vector<double> interpolate(const ExtendedSpace& space, const std::function<double(int, const Point&)>& u)
{
    std::vector<double> c(space.dof_count(), 0.0);
    const auto& pts = space.dof_points();
    for (int s = 0; s < space.num_sides(); ++s)
        for (int d = space.side_begin(s); d < space.side_end(s); ++d)
            c[d] = u(s, pts[d]);
    return c;
}

} // namespace ufe
