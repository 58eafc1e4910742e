// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "dpinv/kernels.hpp"

namespace dpinv::kernels {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d a0 = _mm256_setzero_pd();
    __m256d a1 = _mm256_setzero_pd();
    __m256d a2 = _mm256_setzero_pd();
    __m256d a3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
        a1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), a1);
        a2 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 8), _mm256_loadu_pd(y + i + 8), a2);
        a3 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 12), _mm256_loadu_pd(y + i + 12), a3);
    }
    for (; i + 4 <= n; i += 4)
        a0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), a0);
    double s = hsum(_mm256_add_pd(_mm256_add_pd(a0, a1), _mm256_add_pd(a2, a3)));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void scal(double a, double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) x[i] *= a;
}

void csr_matvec(std::size_t rows, const RowOffset* offsets, const ColIndex* cols,
                const double* vals, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        RowOffset p = offsets[i];
        const RowOffset end = offsets[i + 1];
        double s = 0.0;
        if (end - p >= 4) {
            __m256d acc = _mm256_setzero_pd();
            for (; p + 4 <= end; p += 4) {
                const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + p));
                const __m256d xv = _mm256_i32gather_pd(x, idx, 8);
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + p), xv, acc);
            }
            s = hsum(acc);
        }
        for (; p < end; ++p) s += vals[p] * x[cols[p]];
        y[i] = s;
    }
}

// No scatter in AVX2; the scalar loop is already memory bound.
void csr_matvec_transpose(std::size_t rows, std::size_t cols, const RowOffset* offsets,
                          const ColIndex* col_idx, const double* vals, const double* x,
                          double* y) {
    scalar_table().csr_matvec_transpose(rows, cols, offsets, col_idx, vals, x, y);
}

void gemv_t(const double* q, std::size_t ld, std::size_t n, std::size_t k, const double* x,
            double* out) {
    std::size_t c = 0;
    for (; c + 4 <= k; c += 4) {
        const double* q0 = q + c * ld;
        const double* q1 = q0 + ld;
        const double* q2 = q1 + ld;
        const double* q3 = q2 + ld;
        __m256d a0 = _mm256_setzero_pd();
        __m256d a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd();
        __m256d a3 = _mm256_setzero_pd();
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            const __m256d xv = _mm256_loadu_pd(x + i);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(q0 + i), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(q1 + i), xv, a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(q2 + i), xv, a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(q3 + i), xv, a3);
        }
        double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
        for (; i < n; ++i) {
            s0 += q0[i] * x[i];
            s1 += q1[i] * x[i];
            s2 += q2[i] * x[i];
            s3 += q3[i] * x[i];
        }
        out[c] = s0;
        out[c + 1] = s1;
        out[c + 2] = s2;
        out[c + 3] = s3;
    }
    for (; c < k; ++c) out[c] = dot(q + c * ld, x, n);
}

void gemv_n(const double* q, std::size_t ld, std::size_t n, std::size_t k, const double* coeff,
            double* y) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        for (std::size_t c = 0; c < k; ++c) {
            const __m256d a = _mm256_broadcast_sd(coeff + c);
            const double* qc = q + c * ld + i;
            y0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(qc), y0);
            y1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(qc + 4), y1);
        }
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i < n; ++i) {
        double s = y[i];
        for (std::size_t c = 0; c < k; ++c) s += coeff[c] * q[c * ld + i];
        y[i] = s;
    }
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{
        "avx2", dot, axpy, scal, csr_matvec, csr_matvec_transpose, gemv_t, gemv_n,
    };
    return &table;
}

}  // namespace dpinv::kernels
