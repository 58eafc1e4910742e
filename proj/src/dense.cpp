#include "dpinv/dense.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dpinv/kernels.hpp"
#include "dpinv/sparse.hpp"

namespace dpinv {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), v_(std::move(row_major)) {
    require_dims(v_.size() == rows_ * cols_, "dense matrix value count");
}

DenseMatrix::DenseMatrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    v_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require_dims(r.size() == cols_, "ragged dense matrix literal");
        v_.insert(v_.end(), r.begin(), r.end());
    }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector DenseMatrix::col(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double DenseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : v_) m = std::max(m, std::abs(v));
    return m;
}

double DenseMatrix::frobenius() const {
    double s = 0.0;
    for (double v : v_) s += v * v;
    return std::sqrt(s);
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    require_dims(a.cols() == b.rows(), "dense product shapes");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    require_dims(a.rows() == b.rows() && a.cols() == b.cols(), "dense sum shapes");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) { return a + (-1.0) * b; }

DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (double& v : c.row(i)) v *= s;
    return c;
}

Vector operator*(const DenseMatrix& a, std::span<const double> x) {
    require_dims(a.cols() == x.size(), "dense matrix-vector shapes");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

DenseMatrix to_dense(const SparseMatrix& m) {
    DenseMatrix d(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto cols = m.row_cols(i);
        const auto vals = m.row_values(i);
        for (std::size_t k = 0; k < cols.size(); ++k) d(i, static_cast<std::size_t>(cols[k])) = vals[k];
    }
    return d;
}

DenseMatrix to_dense(const ColumnBlock& b) {
    DenseMatrix d(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j)
        for (std::size_t i = 0; i < b.rows(); ++i) d(i, j) = b(i, j);
    return d;
}

ColumnBlock to_block(const DenseMatrix& m) {
    ColumnBlock b(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) b(i, j) = m(i, j);
    return b;
}

void orthonormalize(ColumnBlock& v, const ColumnReseeder& reseed) {
    constexpr double kCollapse = 1e-13;
    constexpr int kMaxReseeds = 8;
    const auto& k = kernels::active();
    const std::size_t n = v.rows();
    require_dims(n >= v.cols(), "orthogonalize needs rows >= cols");
    for (std::size_t j = 0; j < v.cols(); ++j) {
        double* vj = v.col(j).data();
        for (int attempt = 0;; ++attempt) {
            const double before = std::sqrt(k.dot(vj, vj, n));
            for (int pass = 0; pass < 2; ++pass)
                for (std::size_t i = 0; i < j; ++i) {
                    const double* qi = v.col(i).data();
                    k.axpy(-k.dot(qi, vj, n), qi, vj, n);
                }
            const double after = std::sqrt(k.dot(vj, vj, n));
            if (after > kCollapse * before && after > 0.0 && std::isfinite(after)) {
                k.scal(1.0 / after, vj, n);
                break;
            }
            if (!reseed || attempt >= kMaxReseeds)
                throw RankDeficiencyError(j, "orthogonalize: column " + std::to_string(j) +
                                                 " is numerically dependent on earlier columns");
            reseed(j, v.col(j));
        }
    }
}

DenseMatrix orthogonalize(const DenseMatrix& v) {
    ColumnBlock b = to_block(v);
    orthonormalize(b);
    return to_dense(b);
}

LeastSquaresSolution hessenberg_lsq(const DenseMatrix& h, double beta) {
    const std::size_t k = h.cols();
    require_dims(h.rows() == k + 1 || h.rows() == k, "hessenberg_lsq expects (k+1) x k or k x k");
    DenseMatrix r = h;
    Vector g(h.rows(), 0.0);
    if (!g.empty()) g[0] = beta;
    for (std::size_t j = 0; j < k; ++j) {
        if (j + 1 >= r.rows()) break;
        const double a = r(j, j);
        const double b = r(j + 1, j);
        if (b == 0.0) continue;
        const double rho = std::hypot(a, b);
        const double c = a / rho;
        const double s = b / rho;
        for (std::size_t col = j; col < k; ++col) {
            const double top = r(j, col);
            const double bot = r(j + 1, col);
            r(j, col) = c * top + s * bot;
            r(j + 1, col) = -s * top + c * bot;
        }
        const double gt = g[j];
        g[j] = c * gt + s * g[j + 1];
        g[j + 1] = -s * gt + c * g[j + 1];
    }
    LeastSquaresSolution out;
    out.y.assign(k, 0.0);
    for (std::size_t jj = k; jj-- > 0;) {
        double s = g[jj];
        for (std::size_t col = jj + 1; col < k; ++col) s -= r(jj, col) * out.y[col];
        out.y[jj] = r(jj, jj) != 0.0 ? s / r(jj, jj) : 0.0;
    }
    // Whatever part of g the triangle could not absorb is the residual.
    double res2 = 0.0;
    for (std::size_t i = k; i < g.size(); ++i) res2 += g[i] * g[i];
    for (std::size_t jj = 0; jj < k && jj < g.size(); ++jj)
        if (r(jj, jj) == 0.0) res2 += g[jj] * g[jj];
    out.residual = std::sqrt(res2);
    return out;
}

LuFactorization::LuFactorization(DenseMatrix a) : lu_(std::move(a)) {
    require_dims(lu_.rows() == lu_.cols(), "LU needs a square matrix");
    const std::size_t n = lu_.rows();
    const double floor = 1e-14 * lu_.max_abs();
    perm_.resize(n);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(lu_(r, c)) > std::abs(lu_(piv, c))) piv = r;
        if (!(std::abs(lu_(piv, c)) > floor))
            throw NumericalError("LU: matrix is singular to working precision (column " +
                                 std::to_string(c) + ")");
        if (piv != c) {
            std::swap_ranges(lu_.row(c).begin(), lu_.row(c).end(), lu_.row(piv).begin());
            std::swap(perm_[c], perm_[piv]);
        }
        const double d = lu_(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = lu_(r, c) / d;
            lu_(r, c) = f;
            if (f == 0.0) continue;
            for (std::size_t j = c + 1; j < n; ++j) lu_(r, j) -= f * lu_(c, j);
        }
    }
}

Vector LuFactorization::solve(std::span<const double> b) const {
    const std::size_t n = size();
    require_dims(b.size() == n, "LU solve right-hand side");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
        x[i] /= lu_(i, i);
    }
    return x;
}

Vector LuFactorization::solve_transpose(std::span<const double> b) const {
    // A = P^T L U  =>  A^T x = b  <=>  U^T L^T (P x) = b
    const std::size_t n = size();
    require_dims(b.size() == n, "LU transpose solve right-hand side");
    Vector z(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) z[i] -= lu_(j, i) * z[j];
        z[i] /= lu_(i, i);
    }
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t j = i + 1; j < n; ++j) z[i] -= lu_(j, i) * z[j];
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[perm_[i]] = z[i];
    return x;
}

DenseMatrix LuFactorization::inverse() const {
    const std::size_t n = size();
    DenseMatrix inv(n, n);
    Vector e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const Vector c = solve(e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = c[i];
        e[j] = 0.0;
    }
    return inv;
}

Vector lu_solve(const DenseMatrix& a, std::span<const double> b) {
    return LuFactorization(a).solve(b);
}

}  // namespace dpinv
