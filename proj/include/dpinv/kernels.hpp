#pragma once

// Data-parallel inner loops shared by every solver. Each kernel has a scalar
// reference implementation and, where the ISA helps, an AVX2/FMA variant. The
// variant is chosen once per process from CPUID (override with the
// DPINV_SIMD environment variable: "scalar" or "avx2").

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace dpinv::kernels {

using ColIndex = std::int32_t;
using RowOffset = std::int64_t;

struct KernelTable {
    std::string_view name;

    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // x *= a
    void (*scal)(double a, double* x, std::size_t n);
    // y = M x for a CSR matrix with `rows` rows.
    void (*csr_matvec)(std::size_t rows, const RowOffset* offsets, const ColIndex* cols,
                       const double* vals, const double* x, double* y);
    // y = M^T x, scattered writes; y has `cols` entries and is overwritten.
    void (*csr_matvec_transpose)(std::size_t rows, std::size_t cols, const RowOffset* offsets,
                                 const ColIndex* col_idx, const double* vals, const double* x,
                                 double* y);
    // out[c] = dot(Q[:, c], x) for c < k; Q column-major with leading dimension ld.
    void (*gemv_t)(const double* q, std::size_t ld, std::size_t n, std::size_t k,
                   const double* x, double* out);
    // y += sum_c coeff[c] * Q[:, c]
    void (*gemv_n)(const double* q, std::size_t ld, std::size_t n, std::size_t k,
                   const double* coeff, double* y);
};

const KernelTable& scalar_table();
/// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();
bool cpu_has_avx2();

/// The table every library routine uses.
const KernelTable& active();

/// Force a table (tests and benchmarks). Not thread-safe with concurrent solves.
void set_active(const KernelTable& table);

}  // namespace dpinv::kernels
