#pragma once

#include "ufe/geometry.hpp"
#include "ufe/quadrature.hpp"

#include <span>
#include <utility>

namespace ufe {

/// How the zero level set is represented inside mixed leaves.
///
/// Projected: surface nodes are pulled onto {phi = 0} by Newton steps along
/// grad phi, normals are grad phi / |grad phi| there, and 2D faces are cut at
/// the bisected root of phi. This is the default.
///
/// Polygonal: everything uses the leaf-wise linear interpolant of phi, so
/// volume, face and surface rules describe one polygonal domain exactly and
/// the divergence theorem holds to rounding for polynomial integrands.
enum class GeometryModel { Projected, Polygonal };

struct CutQuadOptions {
    int degree = 4;
    int depth = 5;
    GeometryModel model = GeometryModel::Projected;
};

/// All rules of one cut simplex from a single subdivision pass.
struct CutCellRules {
    QuadRule neg;
    QuadRule pos;
    QuadRule surface; ///< normals point towards phi > 0
};

/// Standard rule mapped onto a full simplex (k+1 vertices, any k <= 3).
QuadRule full_simplex_rule(std::span<const Point> simplex, int degree);

/// Rules over K ∩ {phi<0}, K ∩ {phi>=0} and K ∩ {phi=0} for a full-dimensional
/// simplex K (3 or 4 vertices).
CutCellRules cut_cell_rules(std::span<const Point> simplex, const LevelSet& ls, const CutQuadOptions& opt);

QuadRule cut_volume_rule(std::span<const Point> simplex, const LevelSet& ls, Side side, int degree, int depth);

QuadRule cut_surface_rule(std::span<const Point> simplex, const LevelSet& ls, int degree, int depth,
                          GeometryModel model = GeometryModel::Projected);

/// Both sides of a face (2 vertices in 2D, 3 in 3D): {neg, pos}.
std::pair<QuadRule, QuadRule> cut_face_rules(std::span<const Point> face, const LevelSet& ls, const CutQuadOptions& opt);

QuadRule cut_face_rule(std::span<const Point> face, const LevelSet& ls, Side side, int degree, int depth,
                       GeometryModel model = GeometryModel::Projected);

/// Newton projection onto {phi = 0} along grad phi: at most 20 steps, step tolerance 1e-13.
Point project_to_zero_set(const LevelSet& ls, const Point& x0);

} // namespace ufe
