#include "ufe/solvers.hpp"
#include "ufe/sparse.hpp"
#include "ufe/study.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace ufe;

namespace {

std::vector<double> random_vector(int n, std::mt19937& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v)
        x = u(rng);
    return v;
}

// M^T M + I with M dense random.
CsrMatrix random_spd(int n, std::mt19937& rng)
{
    const auto m = random_vector(n * n, rng);
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = i == j ? 1.0 : 0.0;
            for (int k = 0; k < n; ++k)
                s += m[k * n + i] * m[k * n + j];
            a[i * n + j] = s;
        }
    return CsrMatrix::from_dense(n, a);
}

// 1D Laplacian with Dirichlet ends.
CsrMatrix laplacian(int n)
{
    TripletBuilder tb(n);
    for (int i = 0; i < n; ++i) {
        tb.add(i, i, 2.0);
        if (i > 0)
            tb.add(i, i - 1, -1.0);
        if (i + 1 < n)
            tb.add(i, i + 1, -1.0);
    }
    return tb.build();
}

double max_diff(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

} // namespace

TEST_CASE("triplet builder sums duplicates and sorts columns")
{
    TripletBuilder tb(3);
    tb.add(0, 2, 1.0);
    tb.add(0, 0, 2.0);
    tb.add(0, 2, 0.5);
    tb.add(2, 1, -1.0);
    const CsrMatrix a = tb.build();
    CHECK(a.nnz() == 3);
    CHECK(a.at(0, 2) == 1.5);
    CHECK(a.at(0, 0) == 2.0);
    CHECK(a.at(1, 1) == 0.0);
    CHECK(a.col[0] == 0);
    CHECK_FALSE(a.is_symmetric());
    CHECK_THROWS(tb.add(3, 0, 1.0));
}

TEST_CASE("matrix market round trip")
{
    std::mt19937 rng(1);
    const CsrMatrix a = random_spd(7, rng);
    std::stringstream ss;
    write_matrix_market(ss, a);
    const CsrMatrix b = read_matrix_market(ss);
    REQUIRE(b.n == a.n);
    CHECK(b.col == a.col);
    CHECK(max_diff(a.val, b.val) == 0.0);
}

TEST_CASE("identity systems")
{
    const CsrMatrix id = CsrMatrix::identity(5);
    const std::vector<double> b{1, 2, 3, 4, 5};
    const auto r = solve_cg(id, b, 1e-12, 10);
    CHECK(r.iterations <= 1);
    CHECK(max_diff(r.x, b) < 1e-15);
    CHECK(max_diff(solve_direct_dense(id, b), b) == 0.0);
    CHECK(max_diff(solve_bicgstab(id, b, 1e-12, 10).x, b) < 1e-15);
    CHECK(max_diff(SkylineCholesky(id).solve(b), b) < 1e-15);
    CHECK(estimate_cond(id).kappa == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("two by two hand check")
{
    const CsrMatrix a = CsrMatrix::from_dense(2, std::vector<double>{2, 1, 1, 2});
    const std::vector<double> b{3, 3};
    for (const auto& x : {solve_cg(a, b, 1e-14).x, solve_direct_dense(a, b), SkylineCholesky(a).solve(b)}) {
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("random SPD: iterative and direct solvers agree")
{
    std::mt19937 rng(2);
    const CsrMatrix a = random_spd(50, rng);
    const auto b = random_vector(50, rng);
    const auto direct = solve_direct_dense(a, b);
    CHECK(max_diff(solve_cg(a, b, 1e-14, 1000).x, direct) < 1e-8);
    CHECK(max_diff(solve_cg(a, b, 1e-14, 1000, Preconditioner::None).x, direct) < 1e-8);
    CHECK(max_diff(SkylineCholesky(a).solve(b), direct) < 1e-8);
    CHECK(is_positive_definite(a));
}

TEST_CASE("nonsymmetric systems")
{
    std::mt19937 rng(4);
    const int n = 100;
    auto dense = random_vector(n * n, rng);
    for (int i = 0; i < n; ++i)
        dense[i * n + i] += 2.0 * n;
    const CsrMatrix a = CsrMatrix::from_dense(n, dense);
    const auto b = random_vector(n, rng);
    const auto direct = solve_direct_dense(a, b);
    CHECK(max_diff(solve_bicgstab(a, b, 1e-14, 1000).x, direct) < 1e-8);
    // symmetrized system solved by CG and by elimination
    std::vector<double> sym(dense.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sym[i * n + j] = 0.5 * (dense[i * n + j] + dense[j * n + i]);
    const CsrMatrix s = CsrMatrix::from_dense(n, sym);
    CHECK(max_diff(solve_cg(s, b, 1e-14, 1000).x, solve_direct_dense(s, b)) < 1e-8);
}

TEST_CASE("singular and indefinite input")
{
    const CsrMatrix indef = CsrMatrix::from_dense(2, std::vector<double>{1, 2, 2, 1});
    CHECK_FALSE(is_positive_definite(indef));
    CHECK_THROWS_AS(SkylineCholesky{indef}, SingularMatrix);
    const CsrMatrix sing = CsrMatrix::from_dense(2, std::vector<double>{1, 1, 1, 1});
    CHECK_THROWS_AS(solve_direct_dense(sing, std::vector<double>{1, 2}), SingularMatrix);
    CHECK_THROWS_AS(solve_cg(laplacian(200), std::vector<double>(200, 1.0), 1e-14, 3), NonConvergence);
}

TEST_CASE("Cholesky tolerates explicitly stored zeros")
{
    std::mt19937 rng(6);
    const CsrMatrix lap = laplacian(30);
    TripletBuilder tb(30);
    for (int i = 0; i < 30; ++i)
        for (int p = lap.row_ptr[i]; p < lap.row_ptr[i + 1]; ++p)
            tb.add(i, lap.col[p], lap.val[p]);
    // zeros far outside the band, symmetric
    tb.add(0, 29, 0.0);
    tb.add(29, 0, 0.0);
    tb.add(3, 17, 0.0);
    tb.add(17, 3, 0.0);
    const CsrMatrix a = tb.build();
    const auto b = random_vector(30, rng);
    CHECK(max_diff(SkylineCholesky(a).solve(b), solve_direct_dense(lap, b)) < 1e-10);
}

TEST_CASE("reverse Cuthill-McKee is a permutation")
{
    std::mt19937 rng(8);
    const CsrMatrix a = random_spd(20, rng);
    auto p = reverse_cuthill_mckee(laplacian(40));
    std::sort(p.begin(), p.end());
    for (int i = 0; i < 40; ++i)
        CHECK(p[i] == i);
    CHECK(reverse_cuthill_mckee(a).size() == 20u);
}

TEST_CASE("condition estimates")
{
    std::vector<double> d(100, 0.0);
    for (int i = 0; i < 10; ++i)
        d[i * 10 + i] = i + 1.0;
    const CsrMatrix diag = CsrMatrix::from_dense(10, d);
    CHECK(estimate_cond(diag, 1e-10).kappa == doctest::Approx(10.0).epsilon(1e-6));

    // 1D Laplacian: eigenvalues 2 - 2 cos(k pi / (n + 1))
    const int n = 60;
    const double pi = std::acos(-1.0);
    const CondEstimate c = estimate_cond(laplacian(n), 1e-10);
    CHECK(c.lambda_max == doctest::Approx(2.0 - 2.0 * std::cos(n * pi / (n + 1))).epsilon(1e-6));
    CHECK(c.lambda_min == doctest::Approx(2.0 - 2.0 * std::cos(pi / (n + 1))).epsilon(1e-6));

    // scale invariance
    std::mt19937 rng(10);
    CsrMatrix a = random_spd(30, rng);
    const double k1 = estimate_cond(a, 1e-10).kappa;
    for (double& v : a.val)
        v *= 1e3;
    CHECK(estimate_cond(a, 1e-10).kappa == doctest::Approx(k1).epsilon(1e-6));
}

TEST_CASE("tridiagonal extreme eigenvalue")
{
    const std::vector<double> alpha{2, 2, 2}, beta{-1, -1};
    CHECK(tridiagonal_max_eigenvalue(alpha, beta) == doctest::Approx(2.0 + std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("CG residual history on an SPD system decreases overall")
{
    const auto r = solve_cg(laplacian(50), std::vector<double>(50, 1.0), 1e-12, 1000);
    REQUIRE(r.history.size() >= 2);
    CHECK(r.history.back() < 1e-12);
    CHECK(r.history.back() < r.history.front());
    CHECK(r.residual <= 1e-12);
}

TEST_CASE("condition numbers of the unfitted system scale like h^-2")
{
    const auto problem = builtin_problem(1);
    std::vector<double> k;
    std::vector<int> iters;
    for (int n : {20, 40}) {
        const auto disc = discretize(problem, n, 1, Continuity::C0);
        const auto sys = Assembler(*disc->space, problem.ls, problem.problem, {0, 3, GeometryModel::Projected}).assemble();
        k.push_back(estimate_cond(sys.A, 1e-8).kappa);
        iters.push_back(solve_cg(sys.A, sys.rhs, 1e-12, 100000).iterations);
    }
    CHECK(k[1] / k[0] >= 2.5);
    CHECK(k[1] / k[0] <= 6.5);
    CHECK(iters[1] <= 3 * iters[0]);
}
