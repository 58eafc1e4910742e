#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dpinv/block.hpp"
#include "dpinv/error.hpp"

namespace dpinv {

class SparseMatrix;

/// Small row-major dense matrix: projected l-by-l problems, Hessenberg
/// factors, and the oracle-scale n-by-n matrices used for verification.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), v_(rows * cols, 0.0) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return v_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return v_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {v_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {v_.data() + i * cols_, cols_}; }
    Vector col(std::size_t j) const;

    const std::vector<double>& values() const noexcept { return v_; }

    DenseMatrix transposed() const;
    double max_abs() const;
    double frobenius() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, const DenseMatrix& a);
Vector operator*(const DenseMatrix& a, std::span<const double> x);

DenseMatrix to_dense(const SparseMatrix& m);
DenseMatrix to_dense(const ColumnBlock& b);
ColumnBlock to_block(const DenseMatrix& m);

/// Thrown when a column collapses during orthogonalization.
class RankDeficiencyError : public NumericalError {
public:
    RankDeficiencyError(std::size_t column, const std::string& what)
        : NumericalError(what), column_(column) {}
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

using ColumnReseeder = std::function<void(std::size_t column, std::span<double> values)>;

/// Modified Gram-Schmidt with one reorthogonalization pass, in place.
///
/// A column whose norm falls below 1e-13 of its norm on entry is degenerate.
/// It is passed to `reseed`, which must overwrite it, and orthogonalized
/// again; with no reseeder a RankDeficiencyError is thrown.
void orthonormalize(ColumnBlock& v, const ColumnReseeder& reseed = {});

/// Orthonormal basis of the column span of `v` (rows >= cols).
DenseMatrix orthogonalize(const DenseMatrix& v);

struct SchurForm {
    DenseMatrix U;  ///< orthogonal
    DenseMatrix T;  ///< quasi upper triangular, 2x2 blocks for complex pairs
};

/// How ordered_schur_leading treats a complex pair that is nearer to the
/// target than every real eigenvalue.
enum class LeadingPolicy {
    strict,        ///< throw NumericalError
    nearest_real,  ///< lead with the nearest real eigenvalue anyway
};

/// Real Schur form B = U T U^T via Householder Hessenberg reduction and
/// Francis double-shift QR. Throws NumericalError after 30 n sweeps.
SchurForm real_schur(const DenseMatrix& b);

/// Real Schur form with the real eigenvalue closest to `target` in T(0, 0).
SchurForm ordered_schur_leading(const DenseMatrix& b, double target,
                                LeadingPolicy policy = LeadingPolicy::strict);

/// Eigenvalues read off the diagonal blocks of a quasi-triangular T.
std::vector<std::complex<double>> schur_eigenvalues(const DenseMatrix& t);

struct LeastSquaresSolution {
    Vector y;
    double residual = 0.0;
};

/// argmin_y || beta e1 - H y || for upper Hessenberg H ((k+1) x k, or k x k
/// after a happy breakdown), by Givens rotations.
LeastSquaresSolution hessenberg_lsq(const DenseMatrix& h, double beta);

/// LU with partial pivoting. Throws NumericalError when a pivot falls below
/// 1e-14 max|A|.
class LuFactorization {
public:
    explicit LuFactorization(DenseMatrix a);

    std::size_t size() const noexcept { return lu_.rows(); }
    Vector solve(std::span<const double> b) const;
    /// Solves A^T x = b.
    Vector solve_transpose(std::span<const double> b) const;
    DenseMatrix inverse() const;

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;
};

Vector lu_solve(const DenseMatrix& a, std::span<const double> b);

}  // namespace dpinv
