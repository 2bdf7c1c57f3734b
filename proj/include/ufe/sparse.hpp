#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace ufe {

/// Square matrix in compressed sparse row form with sorted, unique columns per row.
struct CsrMatrix {
    int n = 0;
    std::vector<int> row_ptr{0};
    std::vector<int> col;
    std::vector<double> val;

    int nnz() const { return static_cast<int>(val.size()); }
    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    double at(int i, int j) const;
    /// Exact (bitwise) symmetry of pattern and values.
    bool is_symmetric() const;
    /// Row-major dense copy.
    std::vector<double> to_dense() const;
    static CsrMatrix from_dense(int n, std::span<const double> dense, double drop = 0.0);
    static CsrMatrix identity(int n);
};

/// Coordinate-format accumulator; duplicates are summed in insertion order.
class TripletBuilder {
public:
    explicit TripletBuilder(int n) : n_(n) {}
    void add(int i, int j, double v);
    void reserve(std::size_t n);
    CsrMatrix build() const;
    int size() const { return n_; }

private:
    struct Entry {
        int i, j;
        double v;
    };
    int n_;
    std::vector<Entry> entries_;
};

/// Matrix Market coordinate format, general real, 1-based indices.
void write_matrix_market(std::ostream& out, const CsrMatrix& a);
CsrMatrix read_matrix_market(std::istream& in);
/// Matrix Market array format for a dense vector.
void write_vector_market(std::ostream& out, std::span<const double> v);

} // namespace ufe
