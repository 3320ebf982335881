// Copyright (c) icnet contributors.
// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "icnet/simd/kernels.hpp"

namespace icnet::simd {
namespace {

bool cpu_supports(Isa isa) {
    switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(ICNET_HAVE_AVX2)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    case Isa::neon:
#if defined(ICNET_HAVE_NEON)
        return true; // mandatory on AArch64
#else
        return false;
#endif
    }
    return false;
}

const KernelTable* table_of(Isa isa) {
    switch (isa) {
    case Isa::scalar: return &detail::scalar_table;
    case Isa::avx2:
#if defined(ICNET_HAVE_AVX2)
        return &detail::avx2_table;
#else
        return nullptr;
#endif
    case Isa::neon:
#if defined(ICNET_HAVE_NEON)
        return &detail::neon_table;
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable* initial_table() {
    if (const char* env = std::getenv("ICNET_SIMD")) {
        const std::string want{env};
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (want == isa_name(isa) && cpu_supports(isa)) {
                return table_of(isa);
            }
        }
    }
    const auto isas = available_isas();
    return table_of(isas.back());
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

std::vector<Isa> available_isas() {
    std::vector<Isa> out;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
        if (cpu_supports(isa) && table_of(isa) != nullptr) {
            out.push_back(isa);
        }
    }
    return out;
}

const KernelTable* kernels_for(Isa isa) { return cpu_supports(isa) ? table_of(isa) : nullptr; }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
    const KernelTable* t = kernels_for(isa);
    if (t == nullptr) {
        throw std::invalid_argument("kernel variant " + std::string(isa_name(isa)) + " is not available");
    }
    current().store(t, std::memory_order_release);
}

} // namespace icnet::simd
