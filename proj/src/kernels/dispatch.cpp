#include "urlab/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace urlab::kernels {

bool cpu_has_avx2_fma() noexcept {
#if (defined(__GNUC__) || defined(__clang__)) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

const KernelTable& select() noexcept {
    if (const char* forced = std::getenv("URLAB_KERNEL"); forced && std::strcmp(forced, "scalar") == 0) {
        return scalar_table();
    }
    if (const KernelTable* t = avx2_table(); t != nullptr && cpu_has_avx2_fma()) {
        return *t;
    }
    return scalar_table();
}

}  // namespace

const KernelTable& active() noexcept {
    static const KernelTable& table = select();
    return table;
}

}  // namespace urlab::kernels
