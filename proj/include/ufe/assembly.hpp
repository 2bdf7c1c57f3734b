#pragma once

#include "ufe/cutquad.hpp"
#include "ufe/sparse.hpp"
#include "ufe/xspace.hpp"

#include <array>
#include <functional>
#include <map>
#include <vector>

namespace ufe {

enum class Symmetry { Sym, Nonsym };

/// Plain uses penalty/h on every jump. Alpha multiplies the face penalty by
/// the side coefficient and the interface penalty by max(alpha0, alpha1).
enum class PenaltyScaling { Plain, Alpha };

/// Interface traces on Gamma. Arithmetic: {q} = (q0 + q1) / 2. Weighted:
/// {q} = k0 q0 + k1 q1 with k0 = alpha1 / (alpha0 + alpha1), k1 = alpha0 / (alpha0 + alpha1),
/// the b-data paired with the swapped weights, and the Alpha penalty scaled by the
/// harmonic mean of the coefficients. Both coincide for alpha0 = alpha1.
enum class InterfaceAverage { Arithmetic, Weighted };

struct ModelProblem {
    Mode variant = Mode::Boundary;
    std::array<double, 2> alpha{1.0, 1.0};
    std::function<double(int, const Point&)> f;               ///< source per side
    std::function<double(const Point&)> g;                    ///< Dirichlet data (Gamma or box boundary)
    std::function<double(const Point&)> a;                    ///< solution jump u0 - u1 on Gamma
    std::function<double(const Point&, const Point&)> b;      ///< flux jump (alpha0 du0 - alpha1 du1).n at (x, n)
    double penalty = 0.0;                                     ///< mu or eta; <= 0 selects 3m^2 + 10
    Symmetry symmetry = Symmetry::Sym;
    PenaltyScaling scaling = PenaltyScaling::Alpha;
    InterfaceAverage average = InterfaceAverage::Weighted;
};

/// Exact solution per side, for residuals and errors.
struct ExactSolution {
    std::function<double(int, const Point&)> u;
    std::function<Point(int, const Point&)> grad;
};

struct QuadSettings {
    int degree = 0; ///< 0 selects 2m + 2
    int depth = 5;
    GeometryModel model = GeometryModel::Projected;
};

inline double default_penalty(int m) { return 3.0 * m * m + 10.0; }

/// Dense local contribution on `dofs` (row = test, column = trial, row-major).
struct LocalMatrix {
    std::vector<int> dofs;
    std::vector<double> a;
    std::vector<double> rhs;
    std::vector<double> exact_trial; ///< a_h(u_exact, phi_i) when an exact solution is supplied
    int size() const { return static_cast<int>(dofs.size()); }
};

struct SparseSystem {
    CsrMatrix A;
    std::vector<double> rhs;
};

/// Quadrature for every integration site of the scheme, with cut rules cached.
class SiteQuadrature {
public:
    SiteQuadrature(const ExtendedSpace& space, const LevelSet& ls, QuadSettings quad);

    int degree() const { return opt_.degree; }
    const ExtendedSpace& space() const { return *space_; }
    const LevelSet& level_set() const { return *ls_; }

    /// Rule over K ∩ Omega_side (empty when K misses that side).
    QuadRule cell_rule(int k, int side);
    /// Rule over e ∩ Omega_side.
    QuadRule face_rule(int f, int side);
    /// Rule over Gamma_K with normals towards Omega_1 (empty for uncut K).
    const QuadRule& interface_rule(int k);

    /// Whether face f contributes on `side`: both neighbours evaluate that side
    /// (interior faces) or the box boundary is met (interface mode). With
    /// skip_zero_jump, faces whose two sides share one polynomial are dropped.
    bool face_active(int f, int side, bool skip_zero_jump) const;

private:
    const CutCellRules& cut_rules(int k);

    const ExtendedSpace* space_;
    const LevelSet* ls_;
    CutQuadOptions opt_;
    std::map<int, CutCellRules> cell_cache_;
    QuadRule empty_;
};

class Assembler {
public:
    Assembler(const ExtendedSpace& space, const LevelSet& ls, const ModelProblem& problem, QuadSettings quad,
              const ExactSolution* exact = nullptr);

    LocalMatrix local_cell_matrix(int k, int side);
    LocalMatrix local_face_matrix(int f, int side);
    LocalMatrix local_interface_matrix(int k);

    /// Deterministic serial assembly: cells, then faces, then Gamma, in index order.
    SparseSystem assemble();
    /// r_i = a_h(u_exact, phi_i) - l_h(phi_i); requires an exact solution.
    std::vector<double> galerkin_residual();

    double penalty() const { return penalty_; }
    SiteQuadrature& quadrature() { return quad_; }

private:
    template <class Visit>
    void for_each_local(Visit&& visit);

    const ExtendedSpace& space_;
    const LevelSet& ls_;
    const ModelProblem& problem_;
    const ExactSolution* exact_;
    SiteQuadrature quad_;
    double penalty_;
    double sign_; ///< +1 symmetric, -1 nonsymmetric
};

SparseSystem assemble_boundary(const ExtendedSpace& space, const LevelSet& ls, const ModelProblem& problem,
                               QuadSettings quad = {});
SparseSystem assemble_interface(const ExtendedSpace& space, const LevelSet& ls, const ModelProblem& problem,
                                QuadSettings quad = {});

} // namespace ufe
