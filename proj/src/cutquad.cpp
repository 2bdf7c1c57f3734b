#include "ufe/cutquad.hpp"

#include <array>
#include <cmath>
#include <string>

namespace ufe {
namespace {

constexpr std::array<std::array<int, 2>, 6> kEdges3{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 2>, 3> kEdges2{{{0, 1}, {0, 2}, {1, 2}}};

struct Leaf {
    int k = 0; // simplex dimension; k + 1 vertices
    std::array<Point, 4> x{};
    std::array<double, 4> v{};
};

int edge_slot(int k, int i, int j)
{
    if (i > j)
        std::swap(i, j);
    if (k == 1)
        return 0;
    if (k == 2)
        return i == 0 ? j - 1 : 2;
    for (int e = 0; e < 6; ++e)
        if (kEdges3[e][0] == i && kEdges3[e][1] == j)
            return e;
    return -1;
}

class Subdivider {
public:
    Subdivider(const LevelSet& ls, const CutQuadOptions& opt, int k, bool want_surface, CutCellRules& out)
        : ls_(ls), opt_(opt), k_(k), want_surface_(want_surface && k >= 2), out_(out),
          vol_rule_(barycentric_rule(k, opt.degree)),
          surf_rule_(k >= 2 ? &barycentric_rule(k - 1, opt.degree) : nullptr)
    {
    }

    void run(const Leaf& root)
    {
        root_measure_ = simplex_measure(std::span<const Point>(root.x.data(), root.k + 1));
        recurse(root, 0);
    }

private:
    void emit(QuadRule& rule, std::span<const Point> s)
    {
        const double m = simplex_measure(s);
        if (m <= 1e-15 * root_measure_ * std::pow(0.5, k_ * opt_.depth))
            return;
        const std::size_t before = rule.weights.size();
        map_rule(vol_rule_, s, m, rule);
        for (std::size_t q = before; q < rule.weights.size(); ++q)
            if (!(rule.weights[q] > 0.0))
                throw QuadratureError("cut quadrature produced a nonpositive weight");
    }

    void emit_full(const Leaf& l, bool neg) { emit(neg ? out_.neg : out_.pos, std::span<const Point>(l.x.data(), l.k + 1)); }

    void emit_tri(QuadRule& r, const Point& a, const Point& b, const Point& c)
    {
        const std::array<Point, 3> s{a, b, c};
        emit(r, s);
    }
    void emit_tet(QuadRule& r, const Point& a, const Point& b, const Point& c, const Point& d)
    {
        const std::array<Point, 4> s{a, b, c, d};
        emit(r, s);
    }
    // Convex prism (a,b,c | a2,b2,c2) with a-a2, b-b2, c-c2 as lateral edges.
    void emit_prism(QuadRule& r, const Point& a, const Point& b, const Point& c, const Point& a2, const Point& b2,
                    const Point& c2)
    {
        emit_tet(r, a, b, c, a2);
        emit_tet(r, b, c, a2, b2);
        emit_tet(r, c, a2, b2, c2);
    }

    // `ref` is a leaf vertex off the piece; `ref_pos` tells on which side it lies.
    void emit_surface(std::span<const Point> piece, const Point& ref, bool ref_pos)
    {
        if (!want_surface_)
            return;
        const double m = simplex_measure(piece);
        if (m <= 1e-15 * std::pow(root_measure_ * std::pow(0.5, k_ * opt_.depth), double(k_ - 1) / k_))
            return;
        Point n;
        if (piece.size() == 2) {
            const Point t = piece[1] - piece[0];
            n = {t[1], -t[0], 0.0};
        } else {
            n = cross(piece[1] - piece[0], piece[2] - piece[0]);
        }
        n = (1.0 / norm(n)) * n;
        if ((dot(ref - piece[0], n) < 0.0) == ref_pos)
            n = -1.0 * n;

        QuadRule& s = out_.surface;
        const std::size_t before = s.weights.size();
        map_rule(*surf_rule_, piece, m, s);
        for (std::size_t q = before; q < s.weights.size(); ++q) {
            if (opt_.model == GeometryModel::Projected) {
                s.nodes[q] = project_to_zero_set(ls_, s.nodes[q]);
                Point g = ls_.gradient(s.nodes[q]);
                s.normals.push_back((1.0 / norm(g)) * g);
            } else {
                s.normals.push_back(n);
            }
        }
    }

    void clip(const Leaf& l)
    {
        int negs[4], poss[4];
        int nn = 0, np = 0;
        for (int i = 0; i <= l.k; ++i) {
            if (l.v[i] < 0.0)
                negs[nn++] = i;
            else
                poss[np++] = i;
        }
        if (np == 0)
            return emit_full(l, true);
        int far = 0;
        for (int i = 1; i <= l.k; ++i)
            if (std::abs(l.v[i]) > std::abs(l.v[far]))
                far = i;
        const Point& ref = l.x[far];
        const bool ref_pos = l.v[far] > 0.0;
        if (nn == 0)
            return emit_full(l, false);
        auto cross_pt = [&](int i, int j) {
            const double t = l.v[i] / (l.v[i] - l.v[j]);
            return l.x[i] + t * (l.x[j] - l.x[i]);
        };
        if (l.k == 1) {
            const int a = negs[0], b = poss[0];
            const Point p = cross_pt(a, b);
            const std::array<Point, 2> sn{l.x[a], p}, sp{p, l.x[b]};
            emit(out_.neg, sn);
            emit(out_.pos, sp);
            return;
        }
        if (l.k == 2) {
            // the lone vertex gets a triangle, the pair gets a quadrilateral
            const bool lone_neg = nn == 1;
            const int a = lone_neg ? negs[0] : poss[0];
            const int b = lone_neg ? poss[0] : negs[0];
            const int c = lone_neg ? poss[1] : negs[1];
            const Point pab = lone_neg ? cross_pt(a, b) : cross_pt(b, a);
            const Point pac = lone_neg ? cross_pt(a, c) : cross_pt(c, a);
            QuadRule& lone = lone_neg ? out_.neg : out_.pos;
            QuadRule& pair = lone_neg ? out_.pos : out_.neg;
            emit_tri(lone, l.x[a], pab, pac);
            emit_tri(pair, l.x[b], l.x[c], pac);
            emit_tri(pair, l.x[b], pac, pab);
            const std::array<Point, 2> seg{pab, pac};
            emit_surface(seg, ref, ref_pos);
            return;
        }
        if (nn == 1 || np == 1) {
            const bool lone_neg = nn == 1;
            const int a = lone_neg ? negs[0] : poss[0];
            const int* rest = lone_neg ? poss : negs;
            const int b = rest[0], c = rest[1], d = rest[2];
            auto p = [&](int other) { return lone_neg ? cross_pt(a, other) : cross_pt(other, a); };
            const Point pab = p(b), pac = p(c), pad = p(d);
            QuadRule& lone = lone_neg ? out_.neg : out_.pos;
            QuadRule& triple = lone_neg ? out_.pos : out_.neg;
            emit_tet(lone, l.x[a], pab, pac, pad);
            emit_prism(triple, l.x[b], l.x[c], l.x[d], pab, pac, pad);
            const std::array<Point, 3> tri{pab, pac, pad};
            emit_surface(tri, ref, ref_pos);
            return;
        }
        // two negative (a, b), two nonnegative (c, d)
        const int a = negs[0], b = negs[1], c = poss[0], d = poss[1];
        const Point pac = cross_pt(a, c), pad = cross_pt(a, d), pbc = cross_pt(b, c), pbd = cross_pt(b, d);
        emit_prism(out_.neg, l.x[a], pac, pad, l.x[b], pbc, pbd);
        emit_prism(out_.pos, l.x[c], pac, pbc, l.x[d], pad, pbd);
        const std::array<Point, 3> t1{pac, pad, pbd}, t2{pac, pbd, pbc};
        emit_surface(t1, ref, ref_pos);
        emit_surface(t2, ref, ref_pos);
    }

    void recurse(const Leaf& l, int level)
    {
        const int ne = l.k == 1 ? 1 : (l.k == 2 ? 3 : 6);
        std::array<Point, 6> mx{};
        std::array<double, 6> mv{};
        bool any_neg = false, any_pos = false;
        for (int i = 0; i <= l.k; ++i)
            (l.v[i] < 0.0 ? any_neg : any_pos) = true;
        for (int e = 0; e < ne; ++e) {
            const auto [i, j] = l.k == 3 ? kEdges3[e] : (l.k == 2 ? kEdges2[e] : std::array<int, 2>{0, 1});
            mx[e] = midpoint(l.x[i], l.x[j]);
            mv[e] = ls_.value(mx[e]);
            (mv[e] < 0.0 ? any_neg : any_pos) = true;
        }
        if (!any_pos)
            return emit_full(l, true);
        if (!any_neg)
            return emit_full(l, false);
        if (level >= opt_.depth)
            return clip(l);

        auto mid = [&](int i, int j) { return edge_slot(l.k, i, j); };
        auto child = [&](std::initializer_list<int> verts) {
            // non-negative entries are parent vertices, negative ones encode midpoints as -(slot+1)
            Leaf c;
            c.k = l.k;
            int idx = 0;
            for (int s : verts) {
                if (s >= 0) {
                    c.x[idx] = l.x[s];
                    c.v[idx] = l.v[s];
                } else {
                    c.x[idx] = mx[-s - 1];
                    c.v[idx] = mv[-s - 1];
                }
                ++idx;
            }
            recurse(c, level + 1);
        };
        auto M = [&](int i, int j) { return -(mid(i, j) + 1); };

        if (l.k == 1) {
            child({0, M(0, 1)});
            child({M(0, 1), 1});
        } else if (l.k == 2) {
            child({0, M(0, 1), M(0, 2)});
            child({M(0, 1), 1, M(1, 2)});
            child({M(0, 2), M(1, 2), 2});
            child({M(0, 1), M(1, 2), M(0, 2)});
        } else {
            child({0, M(0, 1), M(0, 2), M(0, 3)});
            child({M(0, 1), 1, M(1, 2), M(1, 3)});
            child({M(0, 2), M(1, 2), 2, M(2, 3)});
            child({M(0, 3), M(1, 3), M(2, 3), 3});
            // octahedron: split along its shortest diagonal (A,B)-(C,D)
            static constexpr std::array<std::array<int, 4>, 3> diag{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
            int best = 0;
            double best_len = 1e300;
            for (int t = 0; t < 3; ++t) {
                const auto& d = diag[t];
                const double len = norm(mx[mid(d[0], d[1])] - mx[mid(d[2], d[3])]);
                if (len < best_len) {
                    best_len = len;
                    best = t;
                }
            }
            const auto& d = diag[best];
            const int A = d[0], B = d[1], C = d[2], D = d[3];
            const int ring[4] = {M(A, C), M(A, D), M(B, D), M(B, C)};
            for (int r = 0; r < 4; ++r)
                child({M(A, B), M(C, D), ring[r], ring[(r + 1) % 4]});
        }
    }

    const LevelSet& ls_;
    const CutQuadOptions& opt_;
    int k_;
    bool want_surface_;
    CutCellRules& out_;
    const BarycentricRule& vol_rule_;
    const BarycentricRule* surf_rule_;
    double root_measure_ = 1.0;
};

Leaf make_leaf(std::span<const Point> s, const LevelSet& ls)
{
    if (s.size() < 2 || s.size() > 4)
        throw InvalidArgument("simplex must have 2 to 4 vertices");
    Leaf l;
    l.k = static_cast<int>(s.size()) - 1;
    for (std::size_t i = 0; i < s.size(); ++i) {
        l.x[i] = s[i];
        l.v[i] = ls.value(s[i]);
    }
    return l;
}

void check_options(const CutQuadOptions& opt)
{
    if (opt.depth < 0)
        throw InvalidArgument("subdivision depth must be >= 0");
}

// Edge cut by bisection on the exact level set (2D faces, projected model).
std::pair<QuadRule, QuadRule> bisected_edge_rules(std::span<const Point> e, const LevelSet& ls, const CutQuadOptions& opt)
{
    const int samples = 1 << std::max(opt.depth, 6);
    const Point a = e[0], b = e[1];
    auto at = [&](double t) { return a + t * (b - a); };
    int changes = 0;
    bool prev_neg = ls.value(a) < 0.0;
    const bool first_neg = prev_neg;
    double lo = 0.0, hi = 1.0;
    for (int i = 1; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        const bool neg = ls.value(at(t)) < 0.0;
        if (neg != prev_neg) {
            ++changes;
            lo = static_cast<double>(i - 1) / samples;
            hi = t;
        }
        prev_neg = neg;
    }
    std::pair<QuadRule, QuadRule> out;
    const BarycentricRule& rule = barycentric_rule(1, opt.degree);
    if (changes > 1)
        throw AssumptionViolation("level set crosses a face " + std::to_string(changes) +
                                  " times; the mesh does not resolve the geometry");
    if (changes == 0) {
        map_rule(rule, e, norm(b - a), first_neg ? out.first : out.second);
        return out;
    }
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if ((ls.value(at(mid)) < 0.0) == first_neg)
            lo = mid;
        else
            hi = mid;
    }
    const Point root = at(0.5 * (lo + hi));
    const std::array<Point, 2> s0{a, root}, s1{root, b};
    map_rule(rule, s0, norm(root - a), first_neg ? out.first : out.second);
    map_rule(rule, s1, norm(b - root), first_neg ? out.second : out.first);
    return out;
}

} // namespace

Point project_to_zero_set(const LevelSet& ls, const Point& x0)
{
    Point x = x0;
    for (int it = 0; it < 20; ++it) {
        const double v = ls.value(x);
        const Point g = ls.gradient(x);
        const double g2 = dot(g, g);
        if (!(g2 > 0.0))
            break;
        const Point step = (v / g2) * g;
        x = x - step;
        if (norm(step) <= 1e-13)
            return x;
    }
    throw QuadratureError("Newton projection onto the zero level set failed near (" + std::to_string(x0[0]) + ", " +
                          std::to_string(x0[1]) + ", " + std::to_string(x0[2]) + ")");
}

QuadRule full_simplex_rule(std::span<const Point> simplex, int degree)
{
    QuadRule r;
    map_rule(barycentric_rule(static_cast<int>(simplex.size()) - 1, degree), simplex, simplex_measure(simplex), r);
    return r;
}

CutCellRules cut_cell_rules(std::span<const Point> simplex, const LevelSet& ls, const CutQuadOptions& opt)
{
    check_options(opt);
    CutCellRules out;
    const Leaf root = make_leaf(simplex, ls);
    Subdivider(ls, opt, root.k, true, out).run(root);
    out.neg.exactness_degree = out.pos.exactness_degree = out.surface.exactness_degree = opt.degree;
    return out;
}

QuadRule cut_volume_rule(std::span<const Point> simplex, const LevelSet& ls, Side side, int degree, int depth)
{
    CutQuadOptions opt{degree, depth, GeometryModel::Projected};
    check_options(opt);
    CutCellRules out;
    const Leaf root = make_leaf(simplex, ls);
    Subdivider(ls, opt, root.k, false, out).run(root);
    QuadRule r = side == Side::Neg ? std::move(out.neg) : std::move(out.pos);
    r.exactness_degree = degree;
    return r;
}

QuadRule cut_surface_rule(std::span<const Point> simplex, const LevelSet& ls, int degree, int depth, GeometryModel model)
{
    return cut_cell_rules(simplex, ls, {degree, depth, model}).surface;
}

std::pair<QuadRule, QuadRule> cut_face_rules(std::span<const Point> face, const LevelSet& ls, const CutQuadOptions& opt)
{
    check_options(opt);
    if (face.size() == 2 && opt.model == GeometryModel::Projected)
        return bisected_edge_rules(face, ls, opt);
    CutCellRules out;
    const Leaf root = make_leaf(face, ls);
    Subdivider(ls, opt, root.k, false, out).run(root);
    return {std::move(out.neg), std::move(out.pos)};
}

QuadRule cut_face_rule(std::span<const Point> face, const LevelSet& ls, Side side, int degree, int depth,
                       GeometryModel model)
{
    auto r = cut_face_rules(face, ls, {degree, depth, model});
    return side == Side::Neg ? std::move(r.first) : std::move(r.second);
}

} // namespace ufe
