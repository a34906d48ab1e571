#include "ssa/kernels.hpp"

#include <cstdlib>
#include <string>

#include "ssa/error.hpp"

namespace ssa::kernels {
namespace detail {
const KernelSet* avx2_table();
}

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelSet& select() {
    const KernelSet* vec = avx2();
    if (const char* env = std::getenv("SSA_KERNELS")) {
        const std::string want{env};
        if (want == "scalar") return scalar();
        if (want == "avx2") {
            if (vec == nullptr) throw ConfigError("SSA_KERNELS=avx2 requested but AVX2 is unavailable");
            return *vec;
        }
        if (!want.empty() && want != "auto") throw ConfigError("SSA_KERNELS must be scalar, avx2 or auto, got '" + want + "'");
    }
    return vec != nullptr ? *vec : scalar();
}

}  // namespace

const KernelSet* avx2() {
    static const KernelSet* set = cpu_has_avx2() ? detail::avx2_table() : nullptr;
    return set;
}

const KernelSet& active() {
    static const KernelSet& set = select();
    return set;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
    return active().l1_distance(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> x) { return active().sum_squares(x.data(), x.size()); }

double max_abs(std::span<const double> x) { return active().max_abs(x.data(), x.size()); }

}  // namespace ssa::kernels
