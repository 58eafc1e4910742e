#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dpinv/block.hpp"
#include "dpinv/kernels.hpp"

namespace dpinv {

using NodeId = std::size_t;
using kernels::ColIndex;
using kernels::RowOffset;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Row-compressed real matrix. Immutable once built: within a row the column
/// indices are strictly increasing and no (row, col) pair appears twice.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Takes ownership of CSR arrays and validates them.
    SparseMatrix(std::size_t rows, std::size_t cols, std::vector<RowOffset> offsets,
                 std::vector<ColIndex> col_indices, std::vector<double> values);

    /// Duplicate (row, col) entries are merged by summing their values.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> entries);
    static SparseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const RowOffset> offsets() const noexcept { return offsets_; }
    std::span<const ColIndex> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<const ColIndex> row_cols(std::size_t i) const noexcept;
    std::span<const double> row_values(std::size_t i) const noexcept;

    /// Stored value at (i, j), zero when the entry is absent.
    double coeff(std::size_t i, std::size_t j) const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<RowOffset> offsets_{0};
    std::vector<ColIndex> col_indices_;
    std::vector<double> values_;
};

/// Caller-owned count of sparse matrix-vector products.
struct MvCounter {
    std::uint64_t count = 0;
};

void matvec(const SparseMatrix& m, std::span<const double> x, std::span<double> y,
            MvCounter* counter = nullptr);
Vector matvec(const SparseMatrix& m, std::span<const double> x, MvCounter* counter = nullptr);

void matvec_transpose(const SparseMatrix& m, std::span<const double> x, std::span<double> y,
                      MvCounter* counter = nullptr);
Vector matvec_transpose(const SparseMatrix& m, std::span<const double> x,
                        MvCounter* counter = nullptr);

/// result(i, j) = left[i] * m(i, j) * right[j]; the pattern is unchanged.
SparseMatrix scale_rows_cols(const SparseMatrix& m, std::span<const double> left,
                             std::span<const double> right);

Vector row_sums(const SparseMatrix& m);
Vector diagonal(const SparseMatrix& m);
SparseMatrix transpose(const SparseMatrix& m);

/// Diag(diag) - m, merging into any stored diagonal entries.
SparseMatrix diagonal_minus(std::span<const double> diag, const SparseMatrix& m);

/// True when the off-diagonal nonzero pattern of a square matrix is a strongly
/// connected digraph (i.e. the matrix is irreducible).
bool is_irreducible(const SparseMatrix& m);

struct Edge {
    NodeId src;
    NodeId dst;
    double weight = 1.0;
};

/// Weighted directed graph; a_ij is the weight of i -> j.
struct Digraph {
    std::size_t n = 0;
    std::vector<Edge> edges;
    /// Index of the appended evaporating node, when the graph came out of
    /// augment_evaporating.
    std::optional<NodeId> evaporating_node;

    /// Throws InputError on ids out of range or non-positive weights.
    void validate() const;
};

/// Adjacency matrix A with duplicate arcs summed.
SparseMatrix adjacency(const Digraph& g);

bool is_strongly_connected(const Digraph& g);

/// A pair (from, to) such that `to` is unreachable from `from`, or nullopt
/// when the graph is strongly connected.
std::optional<std::pair<NodeId, NodeId>> find_unreachable_pair(const Digraph& g);

struct Transition {
    SparseMatrix P;       ///< D^{-1} A
    Vector out_degree;    ///< d = A 1
};

/// Throws InputError when a node has no outgoing weight.
Transition build_transition(const Digraph& g);

}  // namespace dpinv
