#include "ufe/assembly.hpp"

#include "ufe/kernels.hpp"

#include <algorithm>
#include <string>

namespace ufe {
namespace {

Tag owning_tag(int side) { return side == 0 ? Tag::Side0 : Tag::Side1; }

std::span<const Point> element_span(const SimplexMesh& mesh, int k, std::array<Point, 4>& buf)
{
    const auto e = mesh.element(k);
    for (std::size_t i = 0; i < e.size(); ++i)
        buf[i] = mesh.vertex(e[i]);
    return {buf.data(), e.size()};
}

// Per-point traces of the local test functions on a face or on Gamma:
// jump J (scalar factor of the normal), normal flux average F, plain average V.
struct TraceArrays {
    std::vector<double> J, F, V;
    void resize(int n)
    {
        J.assign(n, 0.0);
        F.assign(n, 0.0);
        V.assign(n, 0.0);
    }
};

void append_dofs(std::vector<int>& out, std::span<const int> d) { out.insert(out.end(), d.begin(), d.end()); }

double normal_derivative(const BasisValues& b, int a, const Point& n)
{
    return b.grad[0][a] * n[0] + b.grad[1][a] * n[1] + b.grad[2][a] * n[2];
}

} // namespace

// ---------------------------------------------------------------------------

SiteQuadrature::SiteQuadrature(const ExtendedSpace& space, const LevelSet& ls, QuadSettings quad)
    : space_(&space), ls_(&ls)
{
    opt_.degree = quad.degree > 0 ? quad.degree : std::min(2 * space.degree() + 2, max_rule_degree);
    opt_.depth = quad.depth;
    opt_.model = quad.model;
}

const CutCellRules& SiteQuadrature::cut_rules(int k)
{
    auto it = cell_cache_.find(k);
    if (it != cell_cache_.end())
        return it->second;
    std::array<Point, 4> buf;
    const auto pts = element_span(space_->mesh(), k, buf);
    try {
        return cell_cache_.emplace(k, cut_cell_rules(pts, *ls_, opt_)).first->second;
    } catch (const Error& e) {
        throw QuadratureError("element " + std::to_string(k) + ": " + e.what());
    }
}

QuadRule SiteQuadrature::cell_rule(int k, int side)
{
    const Tag t = space_->classification().element_tag[k];
    if (t == Tag::Cut)
        return side == 0 ? cut_rules(k).neg : cut_rules(k).pos;
    if (t != owning_tag(side))
        return {};
    std::array<Point, 4> buf;
    return full_simplex_rule(element_span(space_->mesh(), k, buf), opt_.degree);
}

QuadRule SiteQuadrature::face_rule(int f, int side)
{
    const SimplexMesh& mesh = space_->mesh();
    const Tag t = space_->classification().face_tag[f];
    const auto p = mesh.face_points(f);
    const std::span<const Point> pts(p.data(), mesh.dim());
    if (t == Tag::Cut) {
        try {
            auto r = cut_face_rules(pts, *ls_, opt_);
            return side == 0 ? std::move(r.first) : std::move(r.second);
        } catch (const Error& e) {
            throw QuadratureError("face " + std::to_string(f) + ": " + e.what());
        }
    }
    if (t != owning_tag(side))
        return {};
    return full_simplex_rule(pts, opt_.degree);
}

const QuadRule& SiteQuadrature::interface_rule(int k)
{
    if (space_->classification().element_tag[k] != Tag::Cut)
        return empty_;
    return cut_rules(k).surface;
}

bool SiteQuadrature::face_active(int f, int side, bool skip_zero_jump) const
{
    const DomainClassification& cls = space_->classification();
    const Tag t = cls.face_tag[f];
    if (t != Tag::Cut && t != owning_tag(side))
        return false;
    const Face& face = space_->mesh().face(f);
    if (face.boundary()) {
        if (cls.mode == Mode::Boundary)
            throw AssumptionViolation("face " + std::to_string(f) +
                                      " on the box boundary meets Omega_0; the box must contain the domain");
        return space_->delegate(face.elements[0], side) >= 0;
    }
    const int d1 = space_->delegate(face.elements[0], side);
    const int d2 = space_->delegate(face.elements[1], side);
    if (d1 < 0 || d2 < 0)
        return false;
    if (skip_zero_jump) {
        if (d1 == d2)
            return false;
        if (space_->continuity() == Continuity::C0 && space_->owns_dofs(face.elements[0], side) &&
            space_->owns_dofs(face.elements[1], side))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------------------

Assembler::Assembler(const ExtendedSpace& space, const LevelSet& ls, const ModelProblem& problem, QuadSettings quad,
                     const ExactSolution* exact)
    : space_(space), ls_(ls), problem_(problem), exact_(exact), quad_(space, ls, quad),
      penalty_(problem.penalty > 0.0 ? problem.penalty : default_penalty(space.degree())),
      sign_(problem.symmetry == Symmetry::Sym ? 1.0 : -1.0)
{
    if (problem.variant != space.mode())
        throw InvalidArgument("problem variant does not match the space mode");
    if (!(problem.alpha[0] > 0.0) || !(problem.alpha[1] > 0.0))
        throw InvalidArgument("diffusion coefficients must be positive");
    if (!problem.f || !problem.g)
        throw InvalidArgument("problem data f and g are required");
    if (problem.variant == Mode::Interface && (!problem.a || !problem.b))
        throw InvalidArgument("interface problems need jump data a and b");
}

LocalMatrix Assembler::local_cell_matrix(int k, int side)
{
    LocalMatrix lm;
    const auto dofs = space_.dofs(k, side);
    if (dofs.empty())
        return lm;
    const QuadRule rule = quad_.cell_rule(k, side);
    if (rule.empty())
        return lm;
    const int n = static_cast<int>(dofs.size());
    lm.dofs.assign(dofs.begin(), dofs.end());
    lm.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    lm.rhs.assign(n, 0.0);
    if (exact_)
        lm.exact_trial.assign(n, 0.0);
    const double alpha = problem_.alpha[side];
    const int dim = space_.mesh().dim();
    const auto& kt = kernels::active();
    BasisValues b;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.nodes[q];
        const double w = rule.weights[q];
        space_.eval_basis(k, side, x, b);
        for (int d = 0; d < dim; ++d)
            kt.outer_acc(lm.a.data(), n, n, n, b.grad[d].data(), b.grad[d].data(), w * alpha);
        kt.axpy(w * problem_.f(side, x), b.value.data(), lm.rhs.data(), n);
        if (exact_) {
            const Point gu = exact_->grad(side, x);
            for (int d = 0; d < dim; ++d)
                kt.axpy(w * alpha * gu[d], b.grad[d].data(), lm.exact_trial.data(), n);
        }
    }
    return lm;
}

LocalMatrix Assembler::local_face_matrix(int f, int side)
{
    LocalMatrix lm;
    const SimplexMesh& mesh = space_.mesh();
    const Face& face = mesh.face(f);
    const bool boundary = face.boundary();
    const int k1 = face.elements[0], k2 = face.elements[1];
    const auto d1 = space_.dofs(k1, side);
    const auto d2 = boundary ? std::span<const int>{} : space_.dofs(k2, side);
    if (d1.empty() || (!boundary && d2.empty()))
        return lm;
    const QuadRule rule = quad_.face_rule(f, side);
    if (rule.empty())
        return lm;
    append_dofs(lm.dofs, d1);
    append_dofs(lm.dofs, d2);
    const int n1 = static_cast<int>(d1.size());
    const int n = lm.size();
    lm.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    lm.rhs.assign(n, 0.0);
    if (exact_)
        lm.exact_trial.assign(n, 0.0);

    const double alpha = problem_.alpha[side];
    const double scale = problem_.scaling == PenaltyScaling::Alpha ? alpha : 1.0;
    const double pen = penalty_ * scale / mesh.face_diameter(f);
    const Point nrm = mesh.face_normal(f);
    const double avg = boundary ? 1.0 : 0.5;
    const auto& kt = kernels::active();
    TraceArrays t;
    t.resize(n);
    BasisValues b1, b2;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.nodes[q];
        const double w = rule.weights[q];
        space_.eval_basis(k1, side, x, b1);
        for (int a = 0; a < n1; ++a) {
            t.J[a] = b1.value[a];
            t.F[a] = avg * alpha * normal_derivative(b1, a, nrm);
        }
        if (!boundary) {
            space_.eval_basis(k2, side, x, b2);
            for (int a = 0; a < n - n1; ++a) {
                t.J[n1 + a] = -b2.value[a];
                t.F[n1 + a] = avg * alpha * normal_derivative(b2, a, nrm);
            }
        }
        kt.outer_acc(lm.a.data(), n, n, n, t.J.data(), t.F.data(), -w);
        kt.outer_acc(lm.a.data(), n, n, n, t.F.data(), t.J.data(), -sign_ * w);
        kt.outer_acc(lm.a.data(), n, n, n, t.J.data(), t.J.data(), w * pen);
        if (boundary) {
            const double g = problem_.g(x);
            for (int a = 0; a < n; ++a)
                lm.rhs[a] += w * (-sign_ * t.F[a] * g + pen * t.J[a] * g);
        }
        if (exact_) {
            const double fu = alpha * dot(exact_->grad(side, x), nrm);
            const double ju = boundary ? exact_->u(side, x) : 0.0;
            for (int a = 0; a < n; ++a)
                lm.exact_trial[a] += -w * (fu * t.J[a] + sign_ * t.F[a] * ju - pen * t.J[a] * ju);
        }
    }
    return lm;
}

LocalMatrix Assembler::local_interface_matrix(int k)
{
    LocalMatrix lm;
    const QuadRule& rule = quad_.interface_rule(k);
    if (rule.empty())
        return lm;
    const SimplexMesh& mesh = space_.mesh();
    const bool iface = space_.mode() == Mode::Interface;
    const auto d0 = space_.dofs(k, 0);
    const auto d1 = iface ? space_.dofs(k, 1) : std::span<const int>{};
    append_dofs(lm.dofs, d0);
    append_dofs(lm.dofs, d1);
    const int n0 = static_cast<int>(d0.size());
    const int n = lm.size();
    lm.a.assign(static_cast<std::size_t>(n) * n, 0.0);
    lm.rhs.assign(n, 0.0);
    if (exact_)
        lm.exact_trial.assign(n, 0.0);

    const auto& al = problem_.alpha;
    const bool weighted = problem_.average == InterfaceAverage::Weighted;
    // flux weights k[s] and value weights kv[s]
    std::array<double, 2> kf{1.0, 0.0}, kv{1.0, 0.0};
    double coef = al[0];
    if (iface && weighted) {
        kf = {al[1] / (al[0] + al[1]), al[0] / (al[0] + al[1])};
        kv = {kf[1], kf[0]};
        coef = 2.0 * al[0] * al[1] / (al[0] + al[1]);
    } else if (iface) {
        kf = kv = {0.5, 0.5};
        coef = std::max(al[0], al[1]);
    }
    const double scale = problem_.scaling == PenaltyScaling::Alpha ? coef : 1.0;
    const double pen = penalty_ * scale / mesh.diameter(k);
    const auto& kt = kernels::active();
    TraceArrays t;
    t.resize(n);
    BasisValues b0, b1;
    for (std::size_t q = 0; q < rule.size(); ++q) {
        const Point& x = rule.nodes[q];
        const Point& nrm = rule.normals[q];
        const double w = rule.weights[q];
        space_.eval_basis(k, 0, x, b0);
        for (int a = 0; a < n0; ++a) {
            t.J[a] = b0.value[a];
            t.F[a] = kf[0] * al[0] * normal_derivative(b0, a, nrm);
            t.V[a] = kv[0] * b0.value[a];
        }
        if (iface) {
            space_.eval_basis(k, 1, x, b1);
            for (int a = 0; a < n - n0; ++a) {
                t.J[n0 + a] = -b1.value[a];
                t.F[n0 + a] = kf[1] * al[1] * normal_derivative(b1, a, nrm);
                t.V[n0 + a] = kv[1] * b1.value[a];
            }
        }
        kt.outer_acc(lm.a.data(), n, n, n, t.J.data(), t.F.data(), -w);
        kt.outer_acc(lm.a.data(), n, n, n, t.F.data(), t.J.data(), -sign_ * w);
        kt.outer_acc(lm.a.data(), n, n, n, t.J.data(), t.J.data(), w * pen);
        // Dirichlet value on Gamma (boundary mode) or solution jump (interface mode)
        const double jump_data = iface ? problem_.a(x) : problem_.g(x);
        const double flux_data = iface ? problem_.b(x, nrm) : 0.0;
        for (int a = 0; a < n; ++a)
            lm.rhs[a] += w * (flux_data * t.V[a] - sign_ * t.F[a] * jump_data + pen * t.J[a] * jump_data);
        if (exact_) {
            double ju, fu;
            if (iface) {
                ju = exact_->u(0, x) - exact_->u(1, x);
                fu = kf[0] * al[0] * dot(exact_->grad(0, x), nrm) + kf[1] * al[1] * dot(exact_->grad(1, x), nrm);
            } else {
                ju = exact_->u(0, x);
                fu = al[0] * dot(exact_->grad(0, x), nrm);
            }
            for (int a = 0; a < n; ++a)
                lm.exact_trial[a] += -w * (fu * t.J[a] + sign_ * t.F[a] * ju - pen * t.J[a] * ju);
        }
    }
    return lm;
}

template <class Visit>
void Assembler::for_each_local(Visit&& visit)
{
    const SimplexMesh& mesh = space_.mesh();
    const int sides = space_.num_sides();
    for (int k = 0; k < mesh.num_elements(); ++k)
        for (int s = 0; s < sides; ++s)
            visit(local_cell_matrix(k, s));
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (int s = 0; s < sides; ++s)
            if (quad_.face_active(f, s, true))
                visit(local_face_matrix(f, s));
    for (int k = 0; k < mesh.num_elements(); ++k)
        visit(local_interface_matrix(k));
}

SparseSystem Assembler::assemble()
{
    const int n = space_.dof_count();
    TripletBuilder tb(n);
    SparseSystem sys;
    sys.rhs.assign(n, 0.0);
    for_each_local([&](const LocalMatrix& lm) {
        const int m = lm.size();
        for (int a = 0; a < m; ++a) {
            sys.rhs[lm.dofs[a]] += lm.rhs[a];
            for (int c = 0; c < m; ++c)
                tb.add(lm.dofs[a], lm.dofs[c], lm.a[static_cast<std::size_t>(a) * m + c]);
        }
    });
    sys.A = tb.build();
    if (problem_.symmetry == Symmetry::Sym) {
        CsrMatrix& A = sys.A;
        for (int i = 0; i < n; ++i)
            for (int p = A.row_ptr[i]; p < A.row_ptr[i + 1]; ++p) {
                const int j = A.col[p];
                if (j <= i)
                    continue;
                const auto b = A.col.begin() + A.row_ptr[j], e = A.col.begin() + A.row_ptr[j + 1];
                const auto it = std::lower_bound(b, e, i);
                const double mean = 0.5 * (A.val[p] + A.val[it - A.col.begin()]);
                A.val[p] = mean;
                A.val[it - A.col.begin()] = mean;
            }
    }
    return sys;
}

std::vector<double> Assembler::galerkin_residual()
{
    if (!exact_)
        throw InvalidArgument("the Galerkin residual needs an exact solution");
    std::vector<double> r(space_.dof_count(), 0.0);
    for_each_local([&](const LocalMatrix& lm) {
        for (int a = 0; a < lm.size(); ++a)
            r[lm.dofs[a]] += lm.exact_trial[a] - lm.rhs[a];
    });
    return r;
}

SparseSystem assemble_boundary(const ExtendedSpace& space, const LevelSet& ls, const ModelProblem& problem,
                               QuadSettings quad)
{
    if (space.mode() != Mode::Boundary)
        throw InvalidArgument("assemble_boundary needs a boundary-mode space");
    return Assembler(space, ls, problem, quad).assemble();
}

SparseSystem assemble_interface(const ExtendedSpace& space, const LevelSet& ls, const ModelProblem& problem,
                                QuadSettings quad)
{
    if (space.mode() != Mode::Interface)
        throw InvalidArgument("assemble_interface needs an interface-mode space");
    return Assembler(space, ls, problem, quad).assemble();
}

} // namespace ufe
