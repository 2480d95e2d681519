#include "blowuplab/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace blowuplab::kernels {

namespace {

const Kernels& pick() {
    const char* force = std::getenv("BLOWUPLAB_KERNELS");
    if (force && *force) {
        if (std::strcmp(force, "scalar") == 0) return scalar();
#if defined(__x86_64__) || defined(_M_X64)
        if (std::strcmp(force, "avx2") == 0) {
            if (!cpu_has_avx2())
                throw std::runtime_error("BLOWUPLAB_KERNELS=avx2 but CPU lacks AVX2");
            return avx2();
        }
#endif
        throw std::runtime_error(std::string("unknown BLOWUPLAB_KERNELS value: ") + force);
    }
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return avx2();
#endif
    return scalar();
}

} // namespace

const Kernels& active() {
    static const Kernels& chosen = pick();
    return chosen;
}

} // namespace blowuplab::kernels
