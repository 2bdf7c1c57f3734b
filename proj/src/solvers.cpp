#include "ufe/solvers.hpp"

#include "ufe/kernels.hpp"
#include "ufe/types.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

namespace ufe {
namespace {

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

std::vector<double> inverse_diagonal(const CsrMatrix& a)
{
    std::vector<double> d = a.diagonal();
    for (double& v : d)
        v = v != 0.0 ? 1.0 / v : 1.0;
    return d;
}

std::vector<double> seeded_unit_vector(int n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (double& x : v)
        x = dist(rng);
    const double s = 1.0 / norm2(v);
    for (double& x : v)
        x *= s;
    return v;
}

// Number of eigenvalues of the tridiagonal matrix below x (Sturm count).
int sturm_count(std::span<const double> alpha, std::span<const double> beta, double x)
{
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double b2 = i > 0 ? beta[i - 1] * beta[i - 1] : 0.0;
        q = alpha[i] - x - (i > 0 ? b2 / q : 0.0);
        if (q == 0.0)
            q = std::numeric_limits<double>::epsilon() * (std::abs(x) + 1.0);
        if (q < 0.0)
            ++count;
    }
    return count;
}

} // namespace

SolveResult solve_cg(const CsrMatrix& a, std::span<const double> b, double tol, int maxit, Preconditioner precond)
{
    const int n = a.n;
    if (static_cast<int>(b.size()) != n)
        throw InvalidArgument("right-hand side length does not match the matrix");
    SolveResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0)
        return res;
    const std::vector<double> dinv = precond == Preconditioner::Jacobi ? inverse_diagonal(a) : std::vector<double>(n, 1.0);
    std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
    kernels::hadamard(dinv, r, z);
    p = z;
    double rz = kernels::dot(r, z);
    double rel = 1.0;
    for (int it = 1; it <= maxit; ++it) {
        a.multiply(p, q);
        const double pq = kernels::dot(p, q);
        if (!(pq > 0.0))
            throw NonConvergence("CG breakdown: matrix is not positive definite (p'Ap = " + std::to_string(pq) + ")",
                                 rel, it);
        const double alpha = rz / pq;
        kernels::axpy(alpha, p, res.x);
        kernels::axpy(-alpha, q, r);
        rel = norm2(r) / bnorm;
        res.history.push_back(rel);
        res.iterations = it;
        if (rel <= tol) {
            res.residual = rel;
            return res;
        }
        kernels::hadamard(dinv, r, z);
        const double rz_new = kernels::dot(r, z);
        kernels::xpby(z, rz_new / rz, p);
        rz = rz_new;
    }
    throw NonConvergence("CG did not reach tolerance " + std::to_string(tol) + " in " + std::to_string(maxit) +
                             " iterations (relative residual " + std::to_string(rel) + ")",
                         rel, maxit);
}

SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const double> b, double tol, int maxit)
{
    const int n = a.n;
    if (static_cast<int>(b.size()) != n)
        throw InvalidArgument("right-hand side length does not match the matrix");
    SolveResult res;
    res.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0)
        return res;
    const std::vector<double> dinv = inverse_diagonal(a);
    std::vector<double> r(b.begin(), b.end()), r0 = r, p(n, 0.0), v(n, 0.0), s(n), t(n), ph(n), sh(n);
    double rho = 1.0, alpha = 1.0, omega = 1.0, rel = 1.0;
    for (int it = 1; it <= maxit; ++it) {
        const double rho_new = kernels::dot(r0, r);
        if (rho_new == 0.0)
            throw NonConvergence("BiCGSTAB breakdown (rho = 0)", rel, it);
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (int i = 0; i < n; ++i)
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        kernels::hadamard(dinv, p, ph);
        a.multiply(ph, v);
        alpha = rho / kernels::dot(r0, v);
        for (int i = 0; i < n; ++i)
            s[i] = r[i] - alpha * v[i];
        kernels::axpy(alpha, ph, res.x);
        rel = norm2(s) / bnorm;
        if (rel <= tol) {
            res.iterations = it;
            res.residual = rel;
            res.history.push_back(rel);
            return res;
        }
        kernels::hadamard(dinv, s, sh);
        a.multiply(sh, t);
        const double tt = kernels::dot(t, t);
        omega = tt > 0.0 ? kernels::dot(t, s) / tt : 0.0;
        kernels::axpy(omega, sh, res.x);
        for (int i = 0; i < n; ++i)
            r[i] = s[i] - omega * t[i];
        rel = norm2(r) / bnorm;
        res.history.push_back(rel);
        res.iterations = it;
        if (rel <= tol) {
            res.residual = rel;
            return res;
        }
        if (omega == 0.0)
            throw NonConvergence("BiCGSTAB breakdown (omega = 0)", rel, it);
    }
    throw NonConvergence("BiCGSTAB did not reach tolerance " + std::to_string(tol), rel, maxit);
}

std::vector<double> solve_direct_dense(const CsrMatrix& a, std::span<const double> b)
{
    const int n = a.n;
    if (n > dense_solve_limit)
        throw InvalidArgument("dense solve limited to n <= " + std::to_string(dense_solve_limit));
    if (static_cast<int>(b.size()) != n)
        throw InvalidArgument("right-hand side length does not match the matrix");
    std::vector<double> m = a.to_dense();
    std::vector<double> x(b.begin(), b.end());
    double scale = 0.0;
    for (double v : m)
        scale = std::max(scale, std::abs(v));
    const double tiny = scale * n * std::numeric_limits<double>::epsilon();
    const std::size_t ld = n;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m[i * ld + k]) > std::abs(m[piv * ld + k]))
                piv = i;
        if (!(std::abs(m[piv * ld + k]) > tiny))
            throw SingularMatrix("matrix is singular to working precision at column " + std::to_string(k));
        if (piv != k) {
            std::swap_ranges(m.begin() + k * ld, m.begin() + (k + 1) * ld, m.begin() + piv * ld);
            std::swap(x[k], x[piv]);
        }
        const double inv = 1.0 / m[k * ld + k];
        for (int i = k + 1; i < n; ++i) {
            const double f = m[i * ld + k] * inv;
            if (f == 0.0)
                continue;
            kernels::active().axpy(-f, &m[k * ld + k + 1], &m[i * ld + k + 1], n - k - 1);
            x[i] -= f * x[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j)
            s -= m[i * ld + j] * x[j];
        x[i] = s / m[i * ld + i];
    }
    return x;
}

std::vector<int> reverse_cuthill_mckee(const CsrMatrix& a)
{
    const int n = a.n;
    std::vector<int> degree(n);
    for (int i = 0; i < n; ++i)
        degree[i] = a.row_ptr[i + 1] - a.row_ptr[i];
    std::vector<int> order;
    order.reserve(n);
    std::vector<char> seen(n, 0);
    auto bfs = [&](int start, std::vector<int>& out, std::vector<int>* level) {
        std::deque<int> queue{start};
        std::vector<char> mark(n, 0);
        mark[start] = 1;
        if (level)
            level->assign(n, -1), (*level)[start] = 0;
        std::vector<int> nb;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            out.push_back(v);
            nb.clear();
            for (int p = a.row_ptr[v]; p < a.row_ptr[v + 1]; ++p) {
                const int w = a.col[p];
                if (!mark[w] && !seen[w]) {
                    mark[w] = 1;
                    nb.push_back(w);
                }
            }
            std::stable_sort(nb.begin(), nb.end(), [&](int x, int y) { return degree[x] < degree[y]; });
            for (int w : nb) {
                if (level)
                    (*level)[w] = (*level)[v] + 1;
                queue.push_back(w);
            }
        }
    };
    for (int s = 0; s < n; ++s) {
        if (seen[s])
            continue;
        // pseudo-peripheral start: last vertex of a BFS from s
        std::vector<int> probe, level;
        bfs(s, probe, &level);
        int start = s;
        for (int v : probe)
            if (level[v] > level[start] || (level[v] == level[start] && degree[v] < degree[start]))
                start = v;
        std::vector<int> comp;
        bfs(start, comp, nullptr);
        for (int v : comp)
            seen[v] = 1;
        order.insert(order.end(), comp.begin(), comp.end());
    }
    std::reverse(order.begin(), order.end());
    return order;
}

SkylineCholesky::SkylineCholesky(const CsrMatrix& a) : n_(a.n)
{
    perm_ = reverse_cuthill_mckee(a);
    std::vector<int> inv(n_);
    for (int i = 0; i < n_; ++i)
        inv[perm_[i]] = i;
    first_.assign(n_, 0);
    for (int i = 0; i < n_; ++i) {
        int f = i;
        const int old = perm_[i];
        for (int p = a.row_ptr[old]; p < a.row_ptr[old + 1]; ++p)
            if (a.val[p] != 0.0)
                f = std::min(f, inv[a.col[p]]);
        first_[i] = f;
    }
    ptr_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i)
        ptr_[i + 1] = ptr_[i] + static_cast<std::size_t>(i - first_[i] + 1);
    l_.assign(ptr_[n_], 0.0);
    for (int i = 0; i < n_; ++i) {
        const int old = perm_[i];
        for (int p = a.row_ptr[old]; p < a.row_ptr[old + 1]; ++p) {
            const int j = inv[a.col[p]];
            if (j <= i && a.val[p] != 0.0)
                l_[ptr_[i] + (j - first_[i])] = a.val[p];
        }
    }
    const auto& k = kernels::active();
    for (int i = 0; i < n_; ++i) {
        double* li = &l_[ptr_[i]];
        const int fi = first_[i];
        for (int j = fi; j < i; ++j) {
            const double* lj = &l_[ptr_[j]];
            const int fj = first_[j];
            const int s = std::max(fi, fj);
            const double d = k.dot(li + (s - fi), lj + (s - fj), static_cast<std::size_t>(j - s));
            li[j - fi] = (li[j - fi] - d) / lj[j - fj];
        }
        const double d = li[i - fi] - k.dot(li, li, static_cast<std::size_t>(i - fi));
        if (!(d > 0.0))
            throw SingularMatrix("nonpositive pivot " + std::to_string(d) + " in Cholesky row " + std::to_string(i));
        li[i - fi] = std::sqrt(d);
    }
}

std::vector<double> SkylineCholesky::solve(std::span<const double> b) const
{
    std::vector<double> y(n_);
    for (int i = 0; i < n_; ++i)
        y[i] = b[perm_[i]];
    for (int i = 0; i < n_; ++i) {
        const double* li = &l_[ptr_[i]];
        const int fi = first_[i];
        double s = y[i];
        for (int j = fi; j < i; ++j)
            s -= li[j - fi] * y[j];
        y[i] = s / li[i - fi];
    }
    for (int i = n_ - 1; i >= 0; --i) {
        const double* li = &l_[ptr_[i]];
        const int fi = first_[i];
        y[i] /= li[i - fi];
        const double yi = y[i];
        for (int j = fi; j < i; ++j)
            y[j] -= li[j - fi] * yi;
    }
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i)
        x[perm_[i]] = y[i];
    return x;
}

bool is_positive_definite(const CsrMatrix& a)
{
    try {
        SkylineCholesky c(a);
        return true;
    } catch (const SingularMatrix&) {
        return false;
    }
}

double tridiagonal_max_eigenvalue(std::span<const double> alpha, std::span<const double> beta)
{
    const std::size_t m = alpha.size();
    if (m == 0)
        throw InvalidArgument("empty tridiagonal matrix");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = (i > 0 ? std::abs(beta[i - 1]) : 0.0) + (i + 1 < m ? std::abs(beta[i]) : 0.0);
        lo = std::min(lo, alpha[i] - r);
        hi = std::max(hi, alpha[i] + r);
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(std::abs(lo), std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sturm_count(alpha, beta, mid) == static_cast<int>(m))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

CondEstimate estimate_cond(const CsrMatrix& a, double tol)
{
    const int n = a.n;
    if (n == 0)
        throw InvalidArgument("empty matrix");
    CondEstimate est;

    // Lanczos without reorthogonalization; the extreme Ritz value is robust to ghost copies.
    std::vector<double> v = seeded_unit_vector(n, 12345u), v_prev(n, 0.0), w(n);
    std::vector<double> alpha, beta;
    double theta_prev = 0.0;
    const int max_steps = std::min(n, 2000);
    int stable = 0;
    for (int j = 0; j < max_steps; ++j) {
        a.multiply(v, w);
        const double aj = kernels::dot(w, v);
        alpha.push_back(aj);
        for (int i = 0; i < n; ++i)
            w[i] -= aj * v[i] + (j > 0 ? beta.back() * v_prev[i] : 0.0);
        const double bj = norm2(w);
        const double theta = tridiagonal_max_eigenvalue(alpha, beta);
        est.lanczos_steps = j + 1;
        if (j > 0 && std::abs(theta - theta_prev) <= tol * std::abs(theta))
            ++stable;
        else
            stable = 0;
        theta_prev = theta;
        if (stable >= 3 || bj <= 1e-14 * std::abs(theta))
            break;
        beta.push_back(bj);
        v_prev.swap(v);
        for (int i = 0; i < n; ++i)
            v[i] = w[i] / bj;
    }
    est.lambda_max = theta_prev;

    SkylineCholesky chol(a);
    std::vector<double> x = seeded_unit_vector(n, 54321u);
    double lambda = 0.0;
    const int max_inverse = 5000;
    for (int it = 1; it <= max_inverse; ++it) {
        std::vector<double> y = chol.solve(x);
        const double yy = kernels::dot(y, y);
        const double next = kernels::dot(y, x) / yy; // Rayleigh quotient of y
        const double s = 1.0 / std::sqrt(yy);
        for (int i = 0; i < n; ++i)
            x[i] = y[i] * s;
        est.inverse_steps = it;
        if (it > 1 && std::abs(next - lambda) <= tol * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
        if (it == max_inverse)
            throw NonConvergence("inverse iteration for the smallest eigenvalue did not converge", 0.0, it);
    }
    est.lambda_min = lambda;
    if (!(lambda > 0.0))
        throw SingularMatrix("smallest eigenvalue estimate is not positive");
    est.kappa = est.lambda_max / est.lambda_min;
    return est;
}

} // namespace ufe
