// Copyright 2026 The voxgauss Authors
// SPDX-License-Identifier: Apache-2.0

#include "kernels_impl.hpp"

#include <cstdlib>
#include <cstring>

namespace voxgauss::kernels {

const KernelTable* avx2_table() {
#if defined(VOXGAUSS_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &detail::avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* force = std::getenv("VOXGAUSS_KERNELS");
        if (force && std::strcmp(force, "scalar") == 0) return scalar_table();
        if (const KernelTable* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return table;
}

} // namespace voxgauss::kernels
