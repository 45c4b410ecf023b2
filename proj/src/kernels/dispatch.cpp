#include "nschb/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

namespace nschb::kern {

namespace {

const KernelOps* g_active = nullptr;

const KernelOps* resolve(const std::string& want) {
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2") {
        const KernelOps* v = avx2_kernels();
        if (!v) throw std::invalid_argument("NSCHB_SIMD=avx2 requested but AVX2 is unavailable");
        return v;
    }
    if (want == "auto" || want.empty()) {
        if (const KernelOps* v = avx2_kernels()) return v;
        return &scalar_kernels();
    }
    throw std::invalid_argument("unknown SIMD selection '" + want + "'");
}

}  // namespace

const KernelOps& kernels() {
    if (!g_active) {
        const char* env = std::getenv("NSCHB_SIMD");
        g_active = resolve(env ? std::string(env) : std::string("auto"));
    }
    return *g_active;
}

void force_isa(const std::string& name) { g_active = resolve(name); }

const char* active_isa() { return kernels().name; }

}  // namespace nschb::kern
