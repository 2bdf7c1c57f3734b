// Command-line driver: convergence runs, quadrature checks, condition numbers.

#include "ufe/study.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

std::vector<int> parse_int_list(const std::string& s)
{
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto dots = item.find("..");
        if (dots != std::string::npos) {
            const int lo = std::stoi(item.substr(0, dots)), hi = std::stoi(item.substr(dots + 2));
            for (int i = lo; i <= hi; ++i)
                out.push_back(i);
        } else if (!item.empty()) {
            out.push_back(std::stoi(item));
        }
    }
    return out;
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ufe::InvalidArgument("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_command(ufe::ExperimentConfig cfg, const std::string& config_path, bool extended, bool degrees_set,
                bool grids_set)
{
    if (!config_path.empty()) {
        ufe::ExperimentConfig file_cfg = ufe::config_from_json(read_file(config_path));
        if (degrees_set)
            file_cfg.degrees = cfg.degrees;
        if (grids_set)
            file_cfg.grid_sizes = cfg.grid_sizes;
        cfg = file_cfg;
    }
    const ufe::BuiltinProblem problem = ufe::builtin_problem(cfg.example, cfg.contrast, cfg.shift);
    if (!grids_set && config_path.empty())
        cfg.grid_sizes = problem.default_grids;
    if (problem.box.dim == 3 && !extended)
        for (int n : cfg.grid_sizes)
            if (n > 16)
                throw ufe::InvalidArgument("3D grids above n=16 need --extended");
    ufe::validate(cfg);
    std::cerr << "example " << cfg.example << ": " << problem.name << '\n';
    const ufe::ConvergenceResult res = ufe::run_convergence(problem, cfg);
    ufe::write_table(std::cout, res.rows);
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output);
        if (!out)
            throw ufe::InvalidArgument("cannot write " + cfg.output);
        ufe::write_csv(out, res.rows);
    }
    for (const auto& r : res.rows)
        if (!r.failure.empty())
            return 1;
    return 0;
}

int verify_quadrature(int example, int n, const std::string& depths, bool polygonal)
{
    const ufe::BuiltinProblem problem = ufe::builtin_problem(example);
    const auto range = parse_int_list(depths);
    if (range.empty())
        throw ufe::InvalidArgument("empty depth range");
    const auto rows = ufe::measure_convergence(problem, n, range.front(), range.back(),
                                               polygonal ? ufe::GeometryModel::Polygonal
                                                         : ufe::GeometryModel::Projected);
    const auto exact = ufe::exact_measures(example);
    std::cout << "example " << example << " (" << problem.ls.descriptor << "), n=" << n << '\n';
    std::cout << std::setw(6) << "depth" << std::setw(22) << "volume" << std::setw(12) << "vol err" << std::setw(22)
              << "surface" << std::setw(12) << "surf err" << std::setw(12) << "div err" << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const double vref = exact ? exact->first : rows.back().volume;
        const double sref = exact ? exact->second : rows.back().surface;
        std::cout << std::setw(6) << r.depth << std::setw(22) << std::setprecision(15) << r.volume << std::setw(12)
                  << std::setprecision(3) << std::scientific << std::abs(r.volume - vref) / vref << std::defaultfloat
                  << std::setw(22) << std::setprecision(15) << r.surface << std::setw(12) << std::setprecision(3)
                  << std::scientific << std::abs(r.surface - sref) / sref << std::setw(12)
                  << std::abs(r.divergence - r.volume) / r.volume << std::defaultfloat << '\n';
    }
    if (!exact)
        std::cout << "(no closed form; errors relative to the deepest level)\n";
    return 0;
}

int cond_command(int example, int m, const std::vector<int>& grids, double contrast)
{
    const ufe::BuiltinProblem problem = ufe::builtin_problem(example, contrast);
    ufe::ExperimentConfig cfg;
    std::vector<double> hs, ks;
    std::cout << std::setw(6) << "n" << std::setw(12) << "h" << std::setw(9) << "dofs" << std::setw(14) << "lambda_min"
              << std::setw(14) << "lambda_max" << std::setw(14) << "kappa" << '\n';
    for (int n : grids) {
        const auto disc = ufe::discretize(problem, n, m, ufe::Continuity::C0);
        const ufe::QuadSettings quad{0, ufe::default_quad_depth(problem.box.dim, m), ufe::GeometryModel::Projected};
        ufe::Assembler assembler(*disc->space, problem.ls, problem.problem, quad);
        const ufe::SparseSystem sys = assembler.assemble();
        const ufe::CondEstimate c = ufe::estimate_cond(sys.A, 1e-8);
        hs.push_back(disc->mesh.cell_width());
        ks.push_back(c.kappa);
        std::cout << std::setw(6) << n << std::setw(12) << disc->mesh.cell_width() << std::setw(9) << sys.A.n
                  << std::setw(14) << std::setprecision(6) << c.lambda_min << std::setw(14) << c.lambda_max
                  << std::setw(14) << c.kappa << '\n';
    }
    if (const auto slope = ufe::fitted_order(hs, ks))
        std::cout << "log-log slope of kappa vs h: " << std::setprecision(3) << *slope << '\n';
    return 0;
}

int table_command(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ufe::InvalidArgument("cannot open " + path);
    ufe::write_table(std::cout, ufe::read_csv(in));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unfitted finite elements by direct extension"};
    app.require_subcommand(1);

    ufe::ExperimentConfig cfg;
    std::string degrees = "1", grids, config_path;
    bool nonsym = false, extended = false, dg = false, polygonal = false, plain = false, maximin = false,
         arithmetic = false;
    auto* run = app.add_subcommand("run", "convergence study for a built-in example");
    run->add_option("--example", cfg.example, "example id 1..6");
    run->add_option("--degrees", degrees, "comma-separated polynomial degrees");
    run->add_option("--grids", grids, "comma-separated cells per axis (default: the example's grids)");
    run->add_option("--penalty", cfg.penalty, "penalty parameter (default 3m^2+10)");
    run->add_flag("--nonsym", nonsym, "non-symmetric interior penalty variant");
    run->add_flag("--cond", cfg.report_condition, "estimate condition numbers");
    run->add_option("--quad-depth", cfg.quad_depth, "cut-cell subdivision depth (default by dimension and degree)");
    run->add_option("--error-depth", cfg.error_depth, "subdivision depth for error integrals");
    run->add_option("--contrast", cfg.contrast, "outer coefficient of example 4");
    run->add_option("--shift", cfg.shift, "translate the circle of examples 1 and 4");
    run->add_flag("--dg", dg, "discontinuous interior space");
    run->add_flag("--polygonal", polygonal, "polygonal geometry model");
    run->add_flag("--plain-penalty", plain, "do not scale the interface penalty by the coefficients");
    run->add_flag("--arithmetic-average", arithmetic, "unweighted averages on the interface");
    run->add_flag("--maximin-hosts", maximin, "pick the most interior host instead of the nearest");
    run->add_option("--host-rings", cfg.host_rings, "1: hosts from the vertex patch only; 2: fall back to the next ring");
    run->add_option("--out", cfg.output, "CSV output path");
    run->add_option("--config", config_path, "JSON experiment config");
    run->add_flag("--extended", extended, "allow large 3D grids");

    int vq_example = 1, vq_n = 40;
    std::string depths = "2..7";
    bool vq_polygonal = false;
    auto* vq = app.add_subcommand("verify-quadrature", "measure convergence of the cut quadrature");
    vq->add_option("--example", vq_example, "example id 1..6");
    vq->add_option("--n", vq_n, "cells per axis");
    vq->add_option("--depths", depths, "depth range lo..hi");
    vq->add_flag("--polygonal", vq_polygonal, "polygonal geometry model");

    int cond_example = 1, cond_m = 1;
    double cond_contrast = 10.0;
    std::string cond_grids = "10,20,40";
    auto* cond = app.add_subcommand("cond", "condition numbers of the symmetric system");
    cond->add_option("--example", cond_example, "example id 1..6");
    cond->add_option("--degree", cond_m, "polynomial degree");
    cond->add_option("--grids", cond_grids, "comma-separated cells per axis");
    cond->add_option("--contrast", cond_contrast, "outer coefficient of example 4");

    std::string csv;
    auto* table = app.add_subcommand("table", "render a results CSV as an aligned table");
    table->add_option("csv", csv, "results file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) {
            cfg.degrees = parse_int_list(degrees);
            if (!grids.empty())
                cfg.grid_sizes = parse_int_list(grids);
            cfg.symmetry = nonsym ? ufe::Symmetry::Nonsym : ufe::Symmetry::Sym;
            cfg.continuity = dg ? ufe::Continuity::DG : ufe::Continuity::C0;
            cfg.geometry = polygonal ? ufe::GeometryModel::Polygonal : ufe::GeometryModel::Projected;
            cfg.interface_average = arithmetic ? ufe::InterfaceAverage::Arithmetic : ufe::InterfaceAverage::Weighted;
            cfg.host_rule = maximin ? ufe::HostRule::Maximin : ufe::HostRule::Nearest;
            cfg.penalty_scaling = plain ? ufe::PenaltyScaling::Plain : ufe::PenaltyScaling::Alpha;
            return run_command(cfg, config_path, extended, run->count("--degrees") > 0, !grids.empty());
        }
        if (*vq)
            return verify_quadrature(vq_example, vq_n, depths, vq_polygonal);
        if (*cond)
            return cond_command(cond_example, cond_m, parse_int_list(cond_grids), cond_contrast);
        if (*table)
            return table_command(csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
