#pragma once

#include "ufe/assembly.hpp"
#include "ufe/problems.hpp"
#include "ufe/solvers.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ufe {

/// Energy-norm contributions, each already square-rooted.
struct EnergyTerms {
    double volume = 0.0;     ///< broken gradient
    double face_avg = 0.0;   ///< h_e^{1/2} average gradient on faces
    double face_jump = 0.0;  ///< h_e^{-1/2} jump on faces
    double gamma_avg = 0.0;  ///< h_K^{1/2} average gradient on Gamma
    double gamma_jump = 0.0; ///< h_K^{-1/2} jump on Gamma
    double total = 0.0;
};

double l2_error(const ExtendedSpace& space, std::span<const double> coeffs, const ExactSolution& exact,
                const LevelSet& ls, QuadSettings quad);
EnergyTerms energy_error(const ExtendedSpace& space, std::span<const double> coeffs, const ExactSolution& exact,
                         const LevelSet& ls, QuadSettings quad);

struct ExperimentConfig {
    int example = 1;
    std::vector<int> degrees{1};
    std::vector<int> grid_sizes{10, 20, 40};
    double penalty = 0.0; ///< <= 0 selects 3m^2 + 10
    Symmetry symmetry = Symmetry::Sym;
    PenaltyScaling penalty_scaling = PenaltyScaling::Alpha;
    InterfaceAverage interface_average = InterfaceAverage::Weighted;
    Continuity continuity = Continuity::C0;
    HostRule host_rule = HostRule::Nearest;
    int host_rings = 2;   ///< 1 restricts hosts to the vertex patch
    int quad_degree = 0;  ///< 0 selects 2m + 2
    int quad_depth = 0;   ///< 0 selects default_quad_depth(dim, m)
    int error_depth = 0;  ///< 0 reuses the assembly depth
    GeometryModel geometry = GeometryModel::Projected;
    double contrast = 10.0; ///< Example 4 outer coefficient
    double shift = 0.0;     ///< circle centre translation (Examples 1 and 4)
    double solver_tol = 1e-12;
    int solver_maxit = 200000;
    bool report_condition = false;
    std::string output;     ///< CSV path; empty for none
};

/// Subdivision depth used when the config leaves it at 0.
int default_quad_depth(int dim, int m);

/// Validates grids (strictly increasing, >= 1) and degrees (1..3).
void validate(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& cfg);

struct ConvergenceRow {
    int m = 0;
    int n = 0;
    double h = 0.0;
    int dofs = 0;
    double e_l2 = 0.0;
    double e_energy = 0.0;
    std::optional<double> rate_l2;
    std::optional<double> rate_energy;
    std::optional<double> kappa;
    int cg_iterations = 0;
    double wall_ms = 0.0;
    std::string failure; ///< nonempty when the row aborted
    EnergyTerms energy_terms;
};

struct FittedOrder {
    int m = 0;
    std::optional<double> l2;
    std::optional<double> energy;
};

struct ConvergenceResult {
    std::vector<ConvergenceRow> rows;
    std::vector<FittedOrder> fitted;
};

/// One (problem, m, n) run: mesh, classification, hosts, space, assembly, solve, errors.
ConvergenceRow run_single(const BuiltinProblem& problem, const ExperimentConfig& cfg, int m, int n);
ConvergenceResult run_convergence(const ExperimentConfig& cfg);
/// Same, for a caller-supplied problem (custom level set and data).
ConvergenceResult run_convergence(const BuiltinProblem& problem, const ExperimentConfig& cfg);

/// Least-squares slope of log e against log h.
std::optional<double> fitted_order(std::span<const double> h, std::span<const double> e);
/// Per-step rates log(e_prev/e)/log(h_prev/h) for consecutive rows with equal m.
void fill_rates(std::vector<ConvergenceRow>& rows);

/// CSV columns: m,n,h,dofs,e_l2,e_energy,rate_l2,rate_energy,kappa,cg_iters,wall_ms
void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> read_csv(std::istream& in);
/// Aligned plain-text table with fitted orders per m.
void write_table(std::ostream& out, const std::vector<ConvergenceRow>& rows);

/// Everything needed to build and solve one discrete problem.
/// Held by pointer because the space refers to the mesh and classification.
struct Discretization {
    SimplexMesh mesh;
    DomainClassification cls;
    std::optional<ExtendedSpace> space;
    Discretization() = default;
    Discretization(const Discretization&) = delete;
    Discretization& operator=(const Discretization&) = delete;
};
std::unique_ptr<Discretization> discretize(const BuiltinProblem& problem, int n, int m, Continuity continuity,
                                           HostRule host_rule = HostRule::Nearest, int host_rings = 2);

struct MeasureRow {
    int depth = 0;
    double volume = 0.0;   ///< |Omega_0| from the cut volume rules
    double surface = 0.0;  ///< |Gamma|
    double divergence = 0.0; ///< sum w F.n with F = x/dim, equals |Omega_0|
};
/// Measure convergence of the cut rules for the example's level set on an n-grid.
std::vector<MeasureRow> measure_convergence(const BuiltinProblem& problem, int n, int depth_lo, int depth_hi,
                                            GeometryModel model = GeometryModel::Projected);
struct TraceRatios {
    double trace = 0.0;  ///< max ||v||_{d(K cap Omega_i)} / (h_K^{-1/2} ||v||_{host})
    double volume = 0.0; ///< max ||v||_{K cap Omega_i} / ||v||_{host}
};
/// Discrete trace and inverse ratios over all cut elements for random coefficient vectors.
TraceRatios trace_ratios(const ExtendedSpace& space, const LevelSet& ls, QuadSettings quad, int samples = 5,
                         unsigned seed = 1);

/// Exact |Omega_0| and |Gamma| when known in closed form.
std::optional<std::pair<double, double>> exact_measures(int example);

} // namespace ufe
