#include "possfuse/kernels/kernels.hpp"

#include <vector>

namespace possfuse::kernels {

#if defined(POSSFUSE_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(POSSFUSE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

}  // namespace

const KernelTable* avx2_table() {
#if defined(POSSFUSE_HAVE_AVX2)
    static const KernelTable* t = cpu_has_avx2() ? &avx2_table_impl() : nullptr;
    return t;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& t = avx2_table() ? *avx2_table() : scalar_table();
    return t;
}

std::span<const KernelTable* const> available() {
    static const std::vector<const KernelTable*> tables = [] {
        std::vector<const KernelTable*> v{&scalar_table()};
        if (avx2_table()) v.push_back(avx2_table());
        return v;
    }();
    return tables;
}

}  // namespace possfuse::kernels
