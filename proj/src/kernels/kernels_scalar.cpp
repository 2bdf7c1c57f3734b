#include "ufe/kernels.hpp"

namespace ufe::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

void xpby_scalar(const double* x, double beta, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] + beta * y[i];
}

void hadamard_scalar(const double* d, const double* r, double* z, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i)
        z[i] = d[i] * r[i];
}

void spmv_scalar(std::size_t n, const int* row_ptr, const int* col, const double* val, const double* x, double* y)
{
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
            s += val[k] * x[col[k]];
        y[i] = s;
    }
}

void outer_acc_scalar(double* out, std::size_t ld, std::size_t rows, std::size_t cols, const double* u,
                      const double* v, double w)
{
    for (std::size_t a = 0; a < rows; ++a) {
        const double wa = w * u[a];
        double* row = out + a * ld;
        for (std::size_t b = 0; b < cols; ++b)
            row[b] += wa * v[b];
    }
}

} // namespace

const KernelTable& scalar_table()
{
    static const KernelTable t{dot_scalar, axpy_scalar, xpby_scalar, hadamard_scalar, spmv_scalar, outer_acc_scalar};
    return t;
}

} // namespace ufe::kernels::detail
