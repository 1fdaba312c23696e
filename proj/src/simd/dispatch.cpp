#include <atomic>
#include <cstdlib>
#include <string>

#include "auditlab/errors.hpp"
#include "auditlab/simd/kernels.hpp"

namespace auditlab::simd {

#ifdef AUDITLAB_HAVE_AVX2
const KernelTable* avx2_table_unchecked();
#endif
#ifdef AUDITLAB_HAVE_NEON
const KernelTable* neon_table_unchecked();
#endif

namespace {

std::atomic<const KernelTable*> g_override{nullptr};

const KernelTable& best_available() {
    if (const KernelTable* t = avx2_kernels()) return *t;
    if (const KernelTable* t = neon_kernels()) return *t;
    return scalar_kernels();
}

const KernelTable& default_table() {
    static const KernelTable& table = [] () -> const KernelTable& {
        const char* force = std::getenv("AUDITLAB_FORCE_SCALAR");
        if (force != nullptr && std::string(force) != "" && std::string(force) != "0")
            return scalar_kernels();
        return best_available();
    }();
    return table;
}

}  // namespace

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

const KernelTable* avx2_kernels() {
#ifdef AUDITLAB_HAVE_AVX2
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#ifdef AUDITLAB_HAVE_NEON
    return neon_table_unchecked();
#else
    return nullptr;
#endif
}

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::scalar: return true;
        case Isa::avx2: return avx2_kernels() != nullptr;
        case Isa::neon: return neon_kernels() != nullptr;
    }
    return false;
}

const KernelTable& active() {
    if (const KernelTable* t = g_override.load(std::memory_order_acquire)) return *t;
    return default_table();
}

void set_active_isa(Isa isa) {
    const KernelTable* t = nullptr;
    switch (isa) {
        case Isa::scalar: t = &scalar_kernels(); break;
        case Isa::avx2: t = avx2_kernels(); break;
        case Isa::neon: t = neon_kernels(); break;
    }
    if (t == nullptr) throw DomainError(std::string("kernel set not available: ") + isa_name(isa));
    g_override.store(t, std::memory_order_release);
}

void reset_active_isa() { g_override.store(nullptr, std::memory_order_release); }

}  // namespace auditlab::simd
