#include "ufe/sparse.hpp"

#include "ufe/kernels.hpp"
#include "ufe/types.hpp"

#include <algorithm>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

namespace ufe {

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const
{
    kernels::active().spmv(static_cast<std::size_t>(n), row_ptr.data(), col.data(), val.data(), x.data(), y.data());
}

std::vector<double> CsrMatrix::multiply(std::span<const double> x) const
{
    std::vector<double> y(n);
    multiply(x, y);
    return y;
}

std::vector<double> CsrMatrix::diagonal() const
{
    std::vector<double> d(n, 0.0);
    for (int i = 0; i < n; ++i)
        d[i] = at(i, i);
    return d;
}

double CsrMatrix::at(int i, int j) const
{
    const auto b = col.begin() + row_ptr[i], e = col.begin() + row_ptr[i + 1];
    const auto it = std::lower_bound(b, e, j);
    if (it == e || *it != j)
        return 0.0;
    return val[it - col.begin()];
}

bool CsrMatrix::is_symmetric() const
{
    for (int i = 0; i < n; ++i)
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
            const int j = col[p];
            const auto b = col.begin() + row_ptr[j], e = col.begin() + row_ptr[j + 1];
            const auto it = std::lower_bound(b, e, i);
            if (it == e || *it != i || val[it - col.begin()] != val[p])
                return false;
        }
    return true;
}

std::vector<double> CsrMatrix::to_dense() const
{
    std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
            d[static_cast<std::size_t>(i) * n + col[p]] = val[p];
    return d;
}

CsrMatrix CsrMatrix::from_dense(int n, std::span<const double> dense, double drop)
{
    CsrMatrix a;
    a.n = n;
    a.row_ptr.assign(1, 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = dense[static_cast<std::size_t>(i) * n + j];
            if (std::abs(v) > drop || (i == j && v != 0.0)) {
                a.col.push_back(j);
                a.val.push_back(v);
            }
        }
        a.row_ptr.push_back(static_cast<int>(a.col.size()));
    }
    return a;
}

CsrMatrix CsrMatrix::identity(int n)
{
    CsrMatrix a;
    a.n = n;
    a.row_ptr.resize(n + 1);
    std::iota(a.row_ptr.begin(), a.row_ptr.end(), 0);
    a.col.resize(n);
    std::iota(a.col.begin(), a.col.end(), 0);
    a.val.assign(n, 1.0);
    return a;
}

void TripletBuilder::add(int i, int j, double v)
{
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw InvalidArgument("matrix entry (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    entries_.push_back({i, j, v});
}

void TripletBuilder::reserve(std::size_t n) { entries_.reserve(n); }

CsrMatrix TripletBuilder::build() const
{
    std::vector<int> order(entries_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& x = entries_[a];
        const auto& y = entries_[b];
        return x.i != y.i ? x.i < y.i : x.j < y.j;
    });
    CsrMatrix a;
    a.n = n_;
    a.row_ptr.assign(n_ + 1, 0);
    int last_i = -1, last_j = -1;
    for (int idx : order) {
        const auto& e = entries_[idx];
        if (e.i == last_i && e.j == last_j) {
            a.val.back() += e.v;
            continue;
        }
        a.col.push_back(e.j);
        a.val.push_back(e.v);
        ++a.row_ptr[e.i + 1];
        last_i = e.i;
        last_j = e.j;
    }
    for (int i = 0; i < n_; ++i)
        a.row_ptr[i + 1] += a.row_ptr[i];
    return a;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& a)
{
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n << ' ' << a.n << ' ' << a.nnz() << '\n';
    out << std::setprecision(17);
    for (int i = 0; i < a.n; ++i)
        for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
            out << i + 1 << ' ' << a.col[p] + 1 << ' ' << a.val[p] << '\n';
}

CsrMatrix read_matrix_market(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw InvalidArgument("missing Matrix Market header");
    std::istringstream h(line);
    std::string banner, object, format, field, symmetry;
    h >> banner >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || field != "real")
        throw InvalidArgument("only real coordinate matrices are supported");
    const bool sym = symmetry == "symmetric";
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '%')
            break;
    std::istringstream sz(line);
    int rows = 0, cols = 0, nnz = 0;
    if (!(sz >> rows >> cols >> nnz) || rows != cols)
        throw InvalidArgument("matrix must be square");
    TripletBuilder b(rows);
    for (int k = 0; k < nnz; ++k) {
        int i, j;
        double v;
        if (!(in >> i >> j >> v))
            throw InvalidArgument("truncated Matrix Market data");
        b.add(i - 1, j - 1, v);
        if (sym && i != j)
            b.add(j - 1, i - 1, v);
    }
    return b.build();
}

void write_vector_market(std::ostream& out, std::span<const double> v)
{
    out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n" << std::setprecision(17);
    for (double x : v)
        out << x << '\n';
}

} // namespace ufe
