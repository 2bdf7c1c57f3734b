// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.

#include "ufe/kernels.hpp"

#include <immintrin.h>

namespace ufe::kernels::detail {
namespace {

inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n)
{
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
        y[i] += alpha * x[i];
}

void xpby_avx2(const double* x, double beta, double* y, std::size_t n)
{
    const __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(vb, _mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        y[i] = x[i] + beta * y[i];
}

void hadamard_avx2(const double* d, const double* r, double* z, std::size_t n)
{
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i, _mm256_mul_pd(_mm256_loadu_pd(d + i), _mm256_loadu_pd(r + i)));
    for (; i < n; ++i)
        z[i] = d[i] * r[i];
}

void spmv_avx2(std::size_t n, const int* row_ptr, const int* col, const double* val, const double* x, double* y)
{
    for (std::size_t i = 0; i < n; ++i) {
        int k = row_ptr[i];
        const int end = row_ptr[i + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(col + k));
            const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(val + k), xv, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k)
            s += val[k] * x[col[k]];
        y[i] = s;
    }
}

void outer_acc_avx2(double* out, std::size_t ld, std::size_t rows, std::size_t cols, const double* u,
                    const double* v, double w)
{
    for (std::size_t a = 0; a < rows; ++a) {
        const double wa = w * u[a];
        const __m256d vwa = _mm256_set1_pd(wa);
        double* row = out + a * ld;
        std::size_t b = 0;
        for (; b + 4 <= cols; b += 4)
            _mm256_storeu_pd(row + b, _mm256_fmadd_pd(vwa, _mm256_loadu_pd(v + b), _mm256_loadu_pd(row + b)));
        for (; b < cols; ++b)
            row[b] += wa * v[b];
    }
}

} // namespace

const KernelTable& avx2_table()
{
    static const KernelTable t{dot_avx2, axpy_avx2, xpby_avx2, hadamard_avx2, spmv_avx2, outer_acc_avx2};
    return t;
}

} // namespace ufe::kernels::detail
