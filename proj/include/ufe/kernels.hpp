#pragma once

// Data-parallel inner loops used by the solvers and the local assembly.
//
// Every kernel has a scalar reference implementation; an AVX2/FMA variant is
// compiled separately and picked at startup when the CPU supports it. The two
// variants differ only in summation order, so results agree to rounding.
// Set UFE_KERNELS=scalar in the environment to force the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace ufe::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y = x + beta * y
    void (*xpby)(const double* x, double beta, double* y, std::size_t n);
    // z = d .* r
    void (*hadamard)(const double* d, const double* r, double* z, std::size_t n);
    // y = A x for a CSR matrix with n rows
    void (*spmv)(std::size_t n, const int* row_ptr, const int* col, const double* val, const double* x, double* y);
    // out[a * ld + b] += w * u[a] * v[b] for a < rows, b < cols
    void (*outer_acc)(double* out, std::size_t ld, std::size_t rows, std::size_t cols, const double* u,
                      const double* v, double w);
};

const KernelTable& table(Isa isa);
bool available(Isa isa);
Isa active_isa();
/// Switch the process-wide kernel set (tests use this to compare variants).
void set_active(Isa isa);
std::string_view name(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) { return active().dot(a.data(), b.data(), a.size()); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) { active().axpy(alpha, x.data(), y.data(), y.size()); }
inline void xpby(std::span<const double> x, double beta, std::span<double> y) { active().xpby(x.data(), beta, y.data(), y.size()); }
inline void hadamard(std::span<const double> d, std::span<const double> r, std::span<double> z)
{
    active().hadamard(d.data(), r.data(), z.data(), z.size());
}

namespace detail {
const KernelTable& scalar_table();
#ifdef UFE_HAVE_AVX2
const KernelTable& avx2_table();
#endif
} // namespace detail

} // namespace ufe::kernels
