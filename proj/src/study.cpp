#include "ufe/study.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <random>
#include <ostream>
#include <sstream>

namespace ufe {
namespace {

double error_at(const ExtendedSpace& space, std::span<const double> c, const ExactSolution& exact, int k, int side,
                const Point& x, Point& grad_err)
{
    Point gh;
    const double uh = space.evaluate(c, k, side, x, &gh);
    grad_err = exact.grad(side, x) - gh;
    return exact.u(side, x) - uh;
}

QuadSettings error_quad(const ExperimentConfig& cfg, int dim, int m)
{
    const int depth = cfg.quad_depth > 0 ? cfg.quad_depth : default_quad_depth(dim, m);
    return {cfg.quad_degree, cfg.error_depth > 0 ? cfg.error_depth : depth, cfg.geometry};
}

std::string format_optional(const std::optional<double>& v, int precision, bool fixed)
{
    if (!v)
        return "";
    std::ostringstream s;
    if (fixed)
        s << std::fixed;
    s << std::setprecision(precision) << *v;
    return s.str();
}

std::optional<double> parse_optional(const std::string& s)
{
    if (s.empty())
        return std::nullopt;
    return std::stod(s);
}

} // namespace

double l2_error(const ExtendedSpace& space, std::span<const double> coeffs, const ExactSolution& exact,
                const LevelSet& ls, QuadSettings quad)
{
    SiteQuadrature sq(space, ls, quad);
    double sum = 0.0;
    for (int k = 0; k < space.mesh().num_elements(); ++k)
        for (int s = 0; s < space.num_sides(); ++s) {
            if (space.delegate(k, s) < 0)
                continue;
            const QuadRule r = sq.cell_rule(k, s);
            for (std::size_t q = 0; q < r.size(); ++q) {
                const double e = exact.u(s, r.nodes[q]) - space.evaluate(coeffs, k, s, r.nodes[q]);
                sum += r.weights[q] * e * e;
            }
        }
    return std::sqrt(sum);
}

EnergyTerms energy_error(const ExtendedSpace& space, std::span<const double> coeffs, const ExactSolution& exact,
                         const LevelSet& ls, QuadSettings quad)
{
    SiteQuadrature sq(space, ls, quad);
    const SimplexMesh& mesh = space.mesh();
    const bool iface = space.mode() == Mode::Interface;
    double vol = 0.0, favg = 0.0, fjump = 0.0, gavg = 0.0, gjump = 0.0;
    Point ge, ge2;
    for (int k = 0; k < mesh.num_elements(); ++k)
        for (int s = 0; s < space.num_sides(); ++s) {
            if (space.delegate(k, s) < 0)
                continue;
            const QuadRule r = sq.cell_rule(k, s);
            for (std::size_t q = 0; q < r.size(); ++q) {
                error_at(space, coeffs, exact, k, s, r.nodes[q], ge);
                vol += r.weights[q] * dot(ge, ge);
            }
        }
    for (int f = 0; f < mesh.num_faces(); ++f)
        for (int s = 0; s < space.num_sides(); ++s) {
            if (!sq.face_active(f, s, false))
                continue;
            const Face& face = mesh.face(f);
            const double he = mesh.face_diameter(f);
            const QuadRule r = sq.face_rule(f, s);
            for (std::size_t q = 0; q < r.size(); ++q) {
                const Point& x = r.nodes[q];
                const double e1 = error_at(space, coeffs, exact, face.elements[0], s, x, ge);
                double jump = e1;
                Point avg = ge;
                if (!face.boundary()) {
                    const double e2 = error_at(space, coeffs, exact, face.elements[1], s, x, ge2);
                    jump = e1 - e2;
                    avg = 0.5 * (ge + ge2);
                }
                favg += r.weights[q] * he * dot(avg, avg);
                fjump += r.weights[q] / he * jump * jump;
            }
        }
    for (int k = 0; k < mesh.num_elements(); ++k) {
        const QuadRule& r = sq.interface_rule(k);
        if (r.empty())
            continue;
        const double hk = mesh.diameter(k);
        for (std::size_t q = 0; q < r.size(); ++q) {
            const Point& x = r.nodes[q];
            const double e0 = error_at(space, coeffs, exact, k, 0, x, ge);
            double jump = e0;
            Point avg = ge;
            if (iface) {
                const double e1 = error_at(space, coeffs, exact, k, 1, x, ge2);
                jump = e0 - e1;
                avg = 0.5 * (ge + ge2);
            }
            gavg += r.weights[q] * hk * dot(avg, avg);
            gjump += r.weights[q] / hk * jump * jump;
        }
    }
    EnergyTerms t;
    t.volume = std::sqrt(vol);
    t.face_avg = std::sqrt(favg);
    t.face_jump = std::sqrt(fjump);
    t.gamma_avg = std::sqrt(gavg);
    t.gamma_jump = std::sqrt(gjump);
    t.total = std::sqrt(vol + favg + fjump + gavg + gjump);
    return t;
}

int default_quad_depth(int dim, int m)
{
    if (dim == 3)
        return m == 1 ? 2 : 3;
    return m == 1 ? 4 : (m == 2 ? 6 : 7);
}

void validate(const ExperimentConfig& cfg)
{
    if (cfg.example < 1 || cfg.example > 6)
        throw InvalidArgument("example must be in 1..6");
    if (cfg.degrees.empty() || cfg.grid_sizes.empty())
        throw InvalidArgument("degrees and grid_sizes must be nonempty");
    for (int m : cfg.degrees)
        if (m < 1 || m > 3)
            throw InvalidArgument("degrees must lie in {1, 2, 3}");
    for (std::size_t i = 0; i < cfg.grid_sizes.size(); ++i) {
        if (cfg.grid_sizes[i] < 1)
            throw InvalidArgument("grid sizes must be >= 1");
        if (i > 0 && cfg.grid_sizes[i] <= cfg.grid_sizes[i - 1])
            throw InvalidArgument("grid_sizes must be strictly increasing");
    }
    if (cfg.quad_depth < 0 || cfg.error_depth < 0)
        throw InvalidArgument("quadrature depths must be >= 0");
    if (cfg.host_rings < 1 || cfg.host_rings > 2)
        throw InvalidArgument("host_rings must be 1 or 2");
}

ExperimentConfig config_from_json(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    ExperimentConfig c;
    c.example = j.value("example", c.example);
    c.degrees = j.value("degrees", c.degrees);
    c.grid_sizes = j.value("grid_sizes", c.grid_sizes);
    c.penalty = j.value("penalty", c.penalty);
    const std::string sym = j.value("symmetry", std::string("SYM"));
    if (sym != "SYM" && sym != "NONSYM")
        throw InvalidArgument("symmetry must be SYM or NONSYM");
    c.symmetry = sym == "SYM" ? Symmetry::Sym : Symmetry::Nonsym;
    const std::string scaling = j.value("penalty_scaling", std::string("ALPHA"));
    if (scaling != "ALPHA" && scaling != "PLAIN")
        throw InvalidArgument("penalty_scaling must be ALPHA or PLAIN");
    c.penalty_scaling = scaling == "ALPHA" ? PenaltyScaling::Alpha : PenaltyScaling::Plain;
    const std::string average = j.value("interface_average", std::string("WEIGHTED"));
    if (average != "WEIGHTED" && average != "ARITHMETIC")
        throw InvalidArgument("interface_average must be WEIGHTED or ARITHMETIC");
    c.interface_average = average == "WEIGHTED" ? InterfaceAverage::Weighted : InterfaceAverage::Arithmetic;
    const std::string host = j.value("host_rule", std::string("NEAREST"));
    if (host != "NEAREST" && host != "MAXIMIN")
        throw InvalidArgument("host_rule must be NEAREST or MAXIMIN");
    c.host_rule = host == "NEAREST" ? HostRule::Nearest : HostRule::Maximin;
    c.host_rings = j.value("host_rings", c.host_rings);
    const std::string cont = j.value("continuity", std::string("C0"));
    if (cont != "C0" && cont != "DG")
        throw InvalidArgument("continuity must be C0 or DG");
    c.continuity = cont == "C0" ? Continuity::C0 : Continuity::DG;
    const std::string geom = j.value("geometry", std::string("PROJECTED"));
    if (geom != "PROJECTED" && geom != "POLYGONAL")
        throw InvalidArgument("geometry must be PROJECTED or POLYGONAL");
    c.geometry = geom == "PROJECTED" ? GeometryModel::Projected : GeometryModel::Polygonal;
    c.quad_degree = j.value("quad_degree", c.quad_degree);
    c.quad_depth = j.value("quad_depth", c.quad_depth);
    c.error_depth = j.value("error_depth", c.error_depth);
    c.contrast = j.value("contrast", c.contrast);
    c.shift = j.value("shift", c.shift);
    c.report_condition = j.value("report_condition", c.report_condition);
    c.output = j.value("output", c.output);
    if (j.contains("solver")) {
        c.solver_tol = j["solver"].value("tol", c.solver_tol);
        c.solver_maxit = j["solver"].value("maxit", c.solver_maxit);
    }
    validate(c);
    return c;
}

std::string config_to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["example"] = c.example;
    j["degrees"] = c.degrees;
    j["grid_sizes"] = c.grid_sizes;
    j["penalty"] = c.penalty;
    j["symmetry"] = c.symmetry == Symmetry::Sym ? "SYM" : "NONSYM";
    j["penalty_scaling"] = c.penalty_scaling == PenaltyScaling::Alpha ? "ALPHA" : "PLAIN";
    j["interface_average"] = c.interface_average == InterfaceAverage::Weighted ? "WEIGHTED" : "ARITHMETIC";
    j["host_rule"] = c.host_rule == HostRule::Nearest ? "NEAREST" : "MAXIMIN";
    j["host_rings"] = c.host_rings;
    j["continuity"] = c.continuity == Continuity::C0 ? "C0" : "DG";
    j["geometry"] = c.geometry == GeometryModel::Projected ? "PROJECTED" : "POLYGONAL";
    j["quad_degree"] = c.quad_degree;
    j["quad_depth"] = c.quad_depth;
    j["error_depth"] = c.error_depth;
    j["contrast"] = c.contrast;
    j["shift"] = c.shift;
    j["report_condition"] = c.report_condition;
    j["output"] = c.output;
    j["solver"] = {{"tol", c.solver_tol}, {"maxit", c.solver_maxit}};
    return j.dump(2);
}

std::unique_ptr<Discretization> discretize(const BuiltinProblem& problem, int n, int m, Continuity continuity,
                                           HostRule host_rule, int host_rings)
{
    auto d = std::make_unique<Discretization>();
    d->mesh = build_structured_mesh(problem.box, n);
    d->cls = classify(d->mesh, problem.ls, problem.problem.variant);
    assign_hosts(d->mesh, d->cls, host_rule, host_rings);
    d->space.emplace(d->mesh, d->cls, m, continuity);
    return d;
}

ConvergenceRow run_single(const BuiltinProblem& problem, const ExperimentConfig& cfg, int m, int n)
{
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceRow row;
    row.m = m;
    row.n = n;
    const auto disc = discretize(problem, n, m, cfg.continuity, cfg.host_rule, cfg.host_rings);
    const ExtendedSpace& space = *disc->space;
    row.h = disc->mesh.cell_width();
    row.dofs = space.dof_count();

    ModelProblem prob = problem.problem;
    prob.penalty = cfg.penalty;
    prob.symmetry = cfg.symmetry;
    prob.scaling = cfg.penalty_scaling;
    prob.average = cfg.interface_average;
    const int dim = problem.box.dim;
    const QuadSettings quad{cfg.quad_degree, cfg.quad_depth > 0 ? cfg.quad_depth : default_quad_depth(dim, m),
                            cfg.geometry};
    Assembler assembler(space, problem.ls, prob, quad);
    const SparseSystem sys = assembler.assemble();

    std::vector<double> x;
    if (cfg.symmetry == Symmetry::Sym) {
        SolveResult r = solve_cg(sys.A, sys.rhs, cfg.solver_tol, cfg.solver_maxit, Preconditioner::Jacobi);
        row.cg_iterations = r.iterations;
        x = std::move(r.x);
    } else if (sys.A.n <= 4000) {
        x = solve_direct_dense(sys.A, sys.rhs);
    } else {
        SolveResult r = solve_bicgstab(sys.A, sys.rhs, cfg.solver_tol, cfg.solver_maxit);
        row.cg_iterations = r.iterations;
        x = std::move(r.x);
    }
    const QuadSettings eq = error_quad(cfg, dim, m);
    row.e_l2 = l2_error(space, x, problem.exact, problem.ls, eq);
    row.energy_terms = energy_error(space, x, problem.exact, problem.ls, eq);
    row.e_energy = row.energy_terms.total;
    if (cfg.report_condition) {
        if (cfg.symmetry != Symmetry::Sym)
            throw InvalidArgument("condition numbers are estimated for the symmetric scheme only");
        row.kappa = estimate_cond(sys.A, 1e-6).kappa;
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::optional<double> fitted_order(std::span<const double> h, std::span<const double> e)
{
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < h.size() && i < e.size(); ++i)
        if (h[i] > 0.0 && e[i] > 0.0 && std::isfinite(e[i]))
            pts.push_back({std::log(h[i]), std::log(e[i])});
    if (pts.size() < 2)
        return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx == 0.0)
        return std::nullopt;
    return sxy / sxx;
}

void fill_rates(std::vector<ConvergenceRow>& rows)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].rate_l2.reset();
        rows[i].rate_energy.reset();
        if (i == 0 || rows[i - 1].m != rows[i].m || !rows[i].failure.empty() || !rows[i - 1].failure.empty())
            continue;
        const auto& p = rows[i - 1];
        auto& r = rows[i];
        const double lh = std::log(p.h / r.h);
        if (lh == 0.0)
            continue;
        if (p.e_l2 > 0.0 && r.e_l2 > 0.0)
            r.rate_l2 = std::log(p.e_l2 / r.e_l2) / lh;
        if (p.e_energy > 0.0 && r.e_energy > 0.0)
            r.rate_energy = std::log(p.e_energy / r.e_energy) / lh;
    }
}

namespace {

std::vector<FittedOrder> fit_all(const std::vector<ConvergenceRow>& rows)
{
    std::vector<FittedOrder> out;
    std::vector<int> ms;
    for (const auto& r : rows)
        if (std::find(ms.begin(), ms.end(), r.m) == ms.end())
            ms.push_back(r.m);
    for (int m : ms) {
        std::vector<double> h, l2, en;
        for (const auto& r : rows)
            if (r.m == m && r.failure.empty()) {
                h.push_back(r.h);
                l2.push_back(r.e_l2);
                en.push_back(r.e_energy);
            }
        out.push_back({m, fitted_order(h, l2), fitted_order(h, en)});
    }
    return out;
}

} // namespace

ConvergenceResult run_convergence(const BuiltinProblem& problem, const ExperimentConfig& cfg)
{
    validate(cfg);
    ConvergenceResult res;
    for (int m : cfg.degrees)
        for (int n : cfg.grid_sizes) {
            try {
                res.rows.push_back(run_single(problem, cfg, m, n));
            } catch (const std::exception& e) {
                ConvergenceRow r;
                r.m = m;
                r.n = n;
                r.h = (problem.box.hi[0] - problem.box.lo[0]) / n;
                r.failure = e.what();
                res.rows.push_back(r);
            }
        }
    fill_rates(res.rows);
    res.fitted = fit_all(res.rows);
    return res;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg)
{
    validate(cfg);
    return run_convergence(builtin_problem(cfg.example, cfg.contrast, cfg.shift), cfg);
}

void write_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows)
{
    out << "m,n,h,dofs,e_l2,e_energy,rate_l2,rate_energy,kappa,cg_iters,wall_ms\n";
    for (const auto& r : rows) {
        if (!r.failure.empty())
            continue;
        std::ostringstream s;
        s << std::setprecision(10);
        s << r.m << ',' << r.n << ',' << r.h << ',' << r.dofs << ',' << r.e_l2 << ',' << r.e_energy << ','
          << format_optional(r.rate_l2, 4, true) << ',' << format_optional(r.rate_energy, 4, true) << ','
          << format_optional(r.kappa, 6, false) << ',' << r.cg_iterations << ',' << std::fixed << std::setprecision(1)
          << r.wall_ms;
        out << s.str() << '\n';
    }
}

std::vector<ConvergenceRow> read_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("m,n,h,dofs,e_l2,e_energy", 0) != 0)
        throw InvalidArgument("not a convergence CSV (unexpected header)");
    std::vector<ConvergenceRow> rows;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            f.push_back(cell);
        while (f.size() < 11)
            f.push_back("");
        ConvergenceRow r;
        r.m = std::stoi(f[0]);
        r.n = std::stoi(f[1]);
        r.h = std::stod(f[2]);
        r.dofs = std::stoi(f[3]);
        r.e_l2 = std::stod(f[4]);
        r.e_energy = std::stod(f[5]);
        r.rate_l2 = parse_optional(f[6]);
        r.rate_energy = parse_optional(f[7]);
        r.kappa = parse_optional(f[8]);
        r.cg_iterations = f[9].empty() ? 0 : std::stoi(f[9]);
        r.wall_ms = f[10].empty() ? 0.0 : std::stod(f[10]);
        rows.push_back(r);
    }
    return rows;
}

void write_table(std::ostream& out, const std::vector<ConvergenceRow>& rows)
{
    auto sci = [](double v) {
        std::ostringstream s;
        s << std::scientific << std::setprecision(3) << v;
        return s.str();
    };
    out << std::setw(3) << "m" << std::setw(6) << "n" << std::setw(12) << "h" << std::setw(9) << "dofs"
        << std::setw(12) << "L2" << std::setw(8) << "rate" << std::setw(12) << "energy" << std::setw(8) << "rate"
        << std::setw(12) << "kappa" << std::setw(9) << "iters" << std::setw(11) << "ms" << '\n';
    for (const auto& r : rows) {
        out << std::setw(3) << r.m << std::setw(6) << r.n << std::setw(12) << sci(r.h);
        if (!r.failure.empty()) {
            out << "  failed: " << r.failure << '\n';
            continue;
        }
        out << std::setw(9) << r.dofs << std::setw(12) << sci(r.e_l2) << std::setw(8)
            << format_optional(r.rate_l2, 2, true) << std::setw(12) << sci(r.e_energy) << std::setw(8)
            << format_optional(r.rate_energy, 2, true) << std::setw(12) << (r.kappa ? sci(*r.kappa) : "")
            << std::setw(9) << r.cg_iterations << std::setw(11) << std::fixed << std::setprecision(1) << r.wall_ms
            << '\n';
        out.unsetf(std::ios::floatfield);
    }
    for (const auto& f : fit_all(rows))
        out << "fitted order m=" << f.m << ": L2 " << format_optional(f.l2, 2, true) << ", energy "
            << format_optional(f.energy, 2, true) << '\n';
}

std::vector<MeasureRow> measure_convergence(const BuiltinProblem& problem, int n, int depth_lo, int depth_hi,
                                            GeometryModel model)
{
    if (depth_lo < 0 || depth_hi < depth_lo)
        throw InvalidArgument("invalid depth range");
    const SimplexMesh mesh = build_structured_mesh(problem.box, n);
    const DomainClassification cls = classify(mesh, problem.ls, problem.problem.variant);
    const int dim = mesh.dim();
    double interior = 0.0;
    for (int k = 0; k < mesh.num_elements(); ++k)
        if (cls.element_tag[k] == Tag::Side0)
            interior += mesh.volume(k);
    std::vector<MeasureRow> out;
    for (int depth = depth_lo; depth <= depth_hi; ++depth) {
        MeasureRow row;
        row.depth = depth;
        row.volume = interior;
        const CutQuadOptions opt{4, depth, model};
        for (int k : cls.cut_elements()) {
            std::array<Point, 4> p{};
            const auto e = mesh.element(k);
            for (std::size_t i = 0; i < e.size(); ++i)
                p[i] = mesh.vertex(e[i]);
            const CutCellRules r = cut_cell_rules(std::span<const Point>(p.data(), dim + 1), problem.ls, opt);
            row.volume += r.neg.total_weight();
            for (std::size_t q = 0; q < r.surface.size(); ++q) {
                row.surface += r.surface.weights[q];
                row.divergence += r.surface.weights[q] * dot(r.surface.nodes[q], r.surface.normals[q]) / dim;
            }
        }
        out.push_back(row);
    }
    return out;
}

std::optional<std::pair<double, double>> exact_measures(int example)
{
    constexpr double pi = std::numbers::pi;
    switch (example) {
    case 1:
        return std::make_pair(pi * 0.49, 2 * pi * 0.7);
    case 3:
        return std::make_pair(4.0 / 3.0 * pi * std::pow(0.35, 3), 4 * pi * 0.35 * 0.35);
    case 4:
        return std::make_pair(pi * 0.25, pi);
    default:
        return std::nullopt;
    }
}

TraceRatios trace_ratios(const ExtendedSpace& space, const LevelSet& ls, QuadSettings quad, int samples,
                         unsigned seed)
{
    SiteQuadrature sq(space, ls, quad);
    const SimplexMesh& mesh = space.mesh();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<double> c(space.dof_count());
    auto norm2 = [&](const QuadRule& r, int k, int side) {
        double s = 0.0;
        for (std::size_t q = 0; q < r.size(); ++q) {
            const double v = space.evaluate(c, k, side, r.nodes[q]);
            s += r.weights[q] * v * v;
        }
        return s;
    };
    TraceRatios out;
    for (int sample = 0; sample < samples; ++sample) {
        for (double& v : c)
            v = coef(rng);
        for (int k : space.classification().cut_elements())
            for (int side = 0; side < space.num_sides(); ++side) {
                const int host = space.delegate(k, side);
                if (host < 0 || host == k)
                    continue;
                const double inner = norm2(sq.cell_rule(host, side), host, side);
                if (inner <= 0.0)
                    continue;
                double trace = norm2(sq.interface_rule(k), k, side);
                for (int f : mesh.element_faces(k))
                    trace += norm2(sq.face_rule(f, side), k, side);
                const double cell = norm2(sq.cell_rule(k, side), k, side);
                out.trace = std::max(out.trace, std::sqrt(mesh.diameter(k) * trace / inner));
                out.volume = std::max(out.volume, std::sqrt(cell / inner));
            }
    }
    return out;
}

} // namespace ufe
