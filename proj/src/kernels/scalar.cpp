#include "dpinv/kernels.hpp"

namespace dpinv::kernels {
namespace {

double dot(const double* x, const double* y, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void csr_matvec(std::size_t rows, const RowOffset* offsets, const ColIndex* cols,
                const double* vals, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (RowOffset p = offsets[i]; p < offsets[i + 1]; ++p) s += vals[p] * x[cols[p]];
        y[i] = s;
    }
}

void csr_matvec_transpose(std::size_t rows, std::size_t cols, const RowOffset* offsets,
                          const ColIndex* col_idx, const double* vals, const double* x,
                          double* y) {
    for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        const double xi = x[i];
        for (RowOffset p = offsets[i]; p < offsets[i + 1]; ++p) y[col_idx[p]] += vals[p] * xi;
    }
}

void gemv_t(const double* q, std::size_t ld, std::size_t n, std::size_t k, const double* x,
            double* out) {
    for (std::size_t c = 0; c < k; ++c) out[c] = dot(q + c * ld, x, n);
}

void gemv_n(const double* q, std::size_t ld, std::size_t n, std::size_t k, const double* coeff,
            double* y) {
    for (std::size_t c = 0; c < k; ++c) axpy(coeff[c], q + c * ld, y, n);
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar", dot, axpy, scal, csr_matvec, csr_matvec_transpose, gemv_t, gemv_n,
    };
    return table;
}

}  // namespace dpinv::kernels
