#include "ufe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ufe {
namespace {

struct SignSummary {
    bool neg = false;
    bool pos = false;
};

// Visit the barycentric lattice with `n` divisions on the simplex spanned by `v`.
template <class F>
void for_each_lattice_point(std::span<const Point> v, int n, F&& f)
{
    const int k = static_cast<int>(v.size()) - 1;
    const double inv = 1.0 / n;
    auto at = [&](int a, int b, int c) {
        Point x = v[0];
        if (k >= 1)
            x = x + (a * inv) * (v[1] - v[0]);
        if (k >= 2)
            x = x + (b * inv) * (v[2] - v[0]);
        if (k >= 3)
            x = x + (c * inv) * (v[3] - v[0]);
        return x;
    };
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= (k >= 2 ? n - a : 0); ++b)
            for (int c = 0; c <= (k >= 3 ? n - a - b : 0); ++c)
                f(at(a, b, c));
}

SignSummary sample_signs(const LevelSet& ls, std::span<const Point> v, int n, double eps)
{
    SignSummary s;
    for_each_lattice_point(v, n, [&](const Point& x) {
        const double p = ls.value(x);
        if (p < -eps)
            s.neg = true;
        else if (p > eps)
            s.pos = true;
    });
    return s;
}

Tag tag_of(const SignSummary& s)
{
    if (s.neg && s.pos)
        return Tag::Cut;
    if (s.pos)
        return Tag::Side1;
    return Tag::Side0;
}

// Components of the strictly negative and strictly positive lattice samples
// on an edge (k = 1) or triangle (k = 2); returns neg + pos - 1 when both
// signs occur, i.e. the number of separate crossings.
int crossing_count(const LevelSet& ls, std::span<const Point> v, int n, double eps)
{
    const int k = static_cast<int>(v.size()) - 1;
    if (k == 1) {
        int changes = 0;
        int last = 0;
        for (int i = 0; i <= n; ++i) {
            const Point x = v[0] + (static_cast<double>(i) / n) * (v[1] - v[0]);
            const double p = ls.value(x);
            const int s = p < -eps ? -1 : (p > eps ? 1 : 0);
            if (s != 0) {
                if (last != 0 && s != last)
                    ++changes;
                last = s;
            }
        }
        return changes;
    }
    // triangle lattice
    auto index = [n](int a, int b) { return a * (n + 1) + b; };
    std::vector<int> sign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) {
            const Point x = v[0] + (static_cast<double>(a) / n) * (v[1] - v[0]) + (static_cast<double>(b) / n) * (v[2] - v[0]);
            const double p = ls.value(x);
            sign[index(a, b)] = p < -eps ? -1 : (p > eps ? 1 : 0);
        }
    std::vector<char> seen(sign.size(), 0);
    int comps[2] = {0, 0};
    std::vector<std::pair<int, int>> stack;
    static constexpr int da[6] = {1, -1, 0, 0, 1, -1};
    static constexpr int db[6] = {0, 0, 1, -1, -1, 1};
    for (int a = 0; a <= n; ++a)
        for (int b = 0; a + b <= n; ++b) {
            const int s = sign[index(a, b)];
            if (s == 0 || seen[index(a, b)])
                continue;
            ++comps[s > 0];
            stack.assign(1, {a, b});
            seen[index(a, b)] = 1;
            while (!stack.empty()) {
                auto [ca, cb] = stack.back();
                stack.pop_back();
                for (int d = 0; d < 6; ++d) {
                    const int na = ca + da[d], nb = cb + db[d];
                    if (na < 0 || nb < 0 || na + nb > n)
                        continue;
                    if (sign[index(na, nb)] != s || seen[index(na, nb)])
                        continue;
                    seen[index(na, nb)] = 1;
                    stack.push_back({na, nb});
                }
            }
        }
    if (comps[0] == 0 || comps[1] == 0)
        return 0;
    return comps[0] + comps[1] - 1;
}

std::array<Point, 4> element_points(const SimplexMesh& mesh, int k)
{
    std::array<Point, 4> p{};
    const auto e = mesh.element(k);
    for (std::size_t i = 0; i < e.size(); ++i)
        p[i] = mesh.vertex(e[i]);
    return p;
}

double host_score(const SimplexMesh& mesh, const DomainClassification& cls, int k)
{
    double s = std::numeric_limits<double>::infinity();
    for (int v : mesh.element(k))
        s = std::min(s, std::abs(cls.vertex_phi[v]));
    return s;
}

Point barycentre(const SimplexMesh& mesh, int k)
{
    Point c{0.0, 0.0, 0.0};
    const auto e = mesh.element(k);
    for (int v : e)
        c = c + mesh.vertex(v);
    return (1.0 / static_cast<double>(e.size())) * c;
}

template <class Range>
int best_host_in(const SimplexMesh& mesh, const DomainClassification& cls, int k, Tag wanted, HostRule rule,
                 const Range& candidates)
{
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    double best_score = -1.0;
    const Point xk = barycentre(mesh, k);
    const double tol = 1e-9 * mesh.diameter(k);
    for (int c : candidates) {
        if (cls.element_tag[c] != wanted)
            continue;
        const double s = host_score(mesh, cls, c);
        const double d = rule == HostRule::Nearest ? norm(barycentre(mesh, c) - xk) : 0.0;
        const bool better = d < best_dist - tol || (d <= best_dist + tol && s > best_score);
        if (better) {
            best_dist = std::min(best_dist, d);
            best_score = s;
            best = c;
        }
    }
    return best;
}

int best_host(const SimplexMesh& mesh, const DomainClassification& cls, int k, Tag wanted,
              HostRule rule = HostRule::Maximin)
{
    return best_host_in(mesh, cls, k, wanted, rule, mesh.element_patch(k));
}

// Elements touching the vertex patch of k, sorted.
std::vector<int> second_ring(const SimplexMesh& mesh, int k)
{
    std::vector<int> out;
    for (int c : mesh.element_patch(k)) {
        const auto p = mesh.element_patch(c);
        out.insert(out.end(), p.begin(), p.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

int find_host(const SimplexMesh& mesh, DomainClassification& cls, int k, Tag wanted, HostRule rule, int rings)
{
    int h = best_host(mesh, cls, k, wanted, rule);
    if (h < 0 && rings >= 2) {
        h = best_host_in(mesh, cls, k, wanted, rule, second_ring(mesh, k));
        if (h >= 0)
            cls.far_hosts.push_back(k);
    }
    return h;
}

} // namespace

Point LevelSet::gradient(const Point& x) const
{
    if (grad)
        return grad(x);
    const double h = 1e-6 * scale;
    Point g{0.0, 0.0, 0.0};
    for (int d = 0; d < 3; ++d) {
        Point xp = x, xm = x;
        xp[d] += h;
        xm[d] -= h;
        g[d] = (phi(xp) - phi(xm)) / (2.0 * h);
    }
    return g;
}

std::vector<int> DomainClassification::cut_elements() const
{
    std::vector<int> out;
    for (int k = 0; k < static_cast<int>(element_tag.size()); ++k)
        if (element_tag[k] == Tag::Cut)
            out.push_back(k);
    return out;
}

int DomainClassification::count(Tag t) const
{
    return static_cast<int>(std::count(element_tag.begin(), element_tag.end(), t));
}

DomainClassification classify(const SimplexMesh& mesh, const LevelSet& ls, Mode mode, int depth)
{
    if (depth < 0 || depth > 10)
        throw InvalidArgument("classification depth must be in [0, 10]");
    DomainClassification cls;
    cls.mode = mode;
    cls.sample_depth = depth;
    cls.vertex_phi.resize(mesh.num_vertices());
    double max_abs = 0.0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        cls.vertex_phi[v] = ls.value(mesh.vertex(v));
        max_abs = std::max(max_abs, std::abs(cls.vertex_phi[v]));
    }
    cls.eps_geom = 1e-12 * std::max(1.0, max_abs);
    const int n = 1 << depth;
    const int dim = mesh.dim();

    cls.element_tag.resize(mesh.num_elements());
    for (int k = 0; k < mesh.num_elements(); ++k) {
        const auto p = element_points(mesh, k);
        cls.element_tag[k] = tag_of(sample_signs(ls, std::span<const Point>(p.data(), dim + 1), n, cls.eps_geom));
    }
    cls.face_tag.resize(mesh.num_faces());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto p = mesh.face_points(f);
        cls.face_tag[f] = tag_of(sample_signs(ls, std::span<const Point>(p.data(), dim), n, cls.eps_geom));
    }
    if (mode == Mode::Boundary && cls.count(Tag::Side0) + cls.count(Tag::Cut) == 0)
        throw EmptyDomain("level set '" + ls.descriptor + "' is positive on the whole mesh: Omega_0 is empty");

    cls.host0.assign(mesh.num_elements(), -1);
    cls.host1.assign(mesh.num_elements(), -1);
    return cls;
}

void assign_hosts(const SimplexMesh& mesh, DomainClassification& cls, HostRule rule, int rings)
{
    if (rings < 1 || rings > 2)
        throw InvalidArgument("host search rings must be 1 or 2");
    cls.host0.assign(mesh.num_elements(), -1);
    cls.host1.assign(mesh.num_elements(), -1);
    cls.far_hosts.clear();
    for (int k = 0; k < mesh.num_elements(); ++k) {
        if (cls.element_tag[k] != Tag::Cut)
            continue;
        cls.host0[k] = find_host(mesh, cls, k, Tag::Side0, rule, rings);
        if (cls.host0[k] < 0)
            throw AssumptionViolation("cut element " + std::to_string(k) +
                                      " has no interior element of Omega_0 within " + std::to_string(rings) +
                                      " ring(s) of its patch; refine the mesh");
        if (cls.mode == Mode::Interface) {
            cls.host1[k] = find_host(mesh, cls, k, Tag::Side1, rule, rings);
            if (cls.host1[k] < 0)
                throw AssumptionViolation("cut element " + std::to_string(k) +
                                          " has no interior element of Omega_1 within " +
                                          std::to_string(rings) + " ring(s) of its patch; refine the mesh");
        }
    }
    std::sort(cls.far_hosts.begin(), cls.far_hosts.end());
    cls.far_hosts.erase(std::unique(cls.far_hosts.begin(), cls.far_hosts.end()), cls.far_hosts.end());
}

AssumptionReport verify_assumptions(const SimplexMesh& mesh, const LevelSet& ls, const DomainClassification& cls,
                                    int face_samples)
{
    AssumptionReport rep;
    const int dim = mesh.dim();
    const int n = dim == 2 ? face_samples : std::max(8, static_cast<int>(std::sqrt(static_cast<double>(face_samples))));
    for (int f = 0; f < mesh.num_faces(); ++f) {
        if (cls.face_tag[f] != Tag::Cut)
            continue;
        const auto p = mesh.face_points(f);
        const int c = crossing_count(ls, std::span<const Point>(p.data(), dim), n, cls.eps_geom);
        rep.cut_faces.push_back({f, c});
        if (c > 1)
            rep.multi_crossing.push_back({f, c});
    }
    for (int k = 0; k < mesh.num_elements(); ++k) {
        if (cls.element_tag[k] != Tag::Cut)
            continue;
        bool ok = best_host(mesh, cls, k, Tag::Side0) >= 0;
        if (cls.mode == Mode::Interface)
            ok = ok && best_host(mesh, cls, k, Tag::Side1) >= 0;
        if (!ok)
            rep.hostless_elements.push_back(k);
    }
    rep.pass = rep.multi_crossing.empty() && rep.hostless_elements.empty();
    return rep;
}

} // namespace ufe
