#pragma once

#include "ufe/sparse.hpp"

#include <span>
#include <vector>

namespace ufe {

enum class Preconditioner { None, Jacobi };

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;             ///< final ||b - A x|| / ||b||
    std::vector<double> history;       ///< relative residual per iteration (CG/BiCGSTAB)
};

/// Preconditioned conjugate gradients for SPD systems; throws NonConvergence
/// when the relative residual stays above tol after maxit iterations.
SolveResult solve_cg(const CsrMatrix& a, std::span<const double> b, double tol = 1e-10, int maxit = 10000,
                     Preconditioner precond = Preconditioner::Jacobi);

/// Jacobi-preconditioned BiCGSTAB for general nonsingular systems.
SolveResult solve_bicgstab(const CsrMatrix& a, std::span<const double> b, double tol = 1e-10, int maxit = 20000);

inline constexpr int dense_solve_limit = 20000;

/// Gaussian elimination with partial pivoting on a dense copy (n <= 20000).
std::vector<double> solve_direct_dense(const CsrMatrix& a, std::span<const double> b);

/// Envelope Cholesky factor of an SPD matrix under reverse Cuthill-McKee ordering.
class SkylineCholesky {
public:
    /// Throws SingularMatrix when a nonpositive pivot appears.
    explicit SkylineCholesky(const CsrMatrix& a);
    std::vector<double> solve(std::span<const double> b) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    std::vector<int> perm_;       ///< new -> old
    std::vector<int> first_;      ///< first column in the envelope of each (permuted) row
    std::vector<std::size_t> ptr_;
    std::vector<double> l_;       ///< row-wise envelope of L, diagonal last
};

/// Reverse Cuthill-McKee ordering (new -> old).
std::vector<int> reverse_cuthill_mckee(const CsrMatrix& a);

/// Attempted Cholesky factorization.
bool is_positive_definite(const CsrMatrix& a);

struct CondEstimate {
    double lambda_max = 0.0;
    double lambda_min = 0.0;
    double kappa = 0.0;
    int lanczos_steps = 0;
    int inverse_steps = 0;
};

/// lambda_max by Lanczos, lambda_min by inverse iteration with a Cholesky
/// solve; both to relative tolerance tol.
CondEstimate estimate_cond(const CsrMatrix& a, double tol = 1e-8);

/// Largest eigenvalue of the symmetric tridiagonal matrix (alpha, beta) by Sturm bisection.
double tridiagonal_max_eigenvalue(std::span<const double> alpha, std::span<const double> beta);

} // namespace ufe
