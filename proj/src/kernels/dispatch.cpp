#include <atomic>
#include <cstdlib>
#include <string_view>

#include "dpinv/kernels.hpp"

namespace dpinv::kernels {

#ifndef DPINV_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable* select_table() {
    const char* env = std::getenv("DPINV_SIMD");
    const std::string_view wanted = env ? env : "";
    if (wanted == "scalar") return &scalar_table();
    if (avx2_table() != nullptr && cpu_has_avx2()) return avx2_table();
    return &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
    static std::atomic<const KernelTable*> table{select_table()};
    return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(const KernelTable& table) { slot().store(&table, std::memory_order_release); }

}  // namespace dpinv::kernels
