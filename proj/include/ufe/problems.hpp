#pragma once

#include "ufe/assembly.hpp"
#include "ufe/geometry.hpp"

#include <string>
#include <vector>

namespace ufe {

/// Geometry, exact solution and data of one benchmark.
struct BuiltinProblem {
    int id = 0;
    std::string name;
    Box box;
    LevelSet ls;
    ExactSolution exact;
    ModelProblem problem; ///< penalty left at 0 (3m^2 + 10)
    std::vector<int> default_grids;
};

/// Examples 1-6. `contrast` is the outer coefficient b of Example 4 (10 or 1000);
/// `shift` translates the circle centre of Examples 1 and 4 by (shift, shift).
BuiltinProblem builtin_problem(int id, double contrast = 10.0, double shift = 0.0);

/// Level set, exact solution and data with a global polynomial solution of
/// degree m (one polynomial per side in interface mode): the scheme
/// reproduces it up to rounding on the polygonal geometry model.
BuiltinProblem polynomial_problem(int geometry_id, int m);

} // namespace ufe
