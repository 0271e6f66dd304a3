#include <cstdlib>
#include <string_view>

#include "pavsig/kernels.hpp"

namespace pavsig::kernels {
namespace {

const KernelTable& select() {
    const char* env = std::getenv("PAVSIG_KERNELS");
    if (env != nullptr) {
        const std::string_view want{env};
        if (want == "avx2" && avx2() != nullptr) return *avx2();
        if (want == "neon" && neon() != nullptr) return *neon();
        return scalar();
    }
    if (const KernelTable* k = avx2()) return *k;
    if (const KernelTable* k = neon()) return *k;
    return scalar();
}

}  // namespace

const KernelTable& active() {
    static const KernelTable& chosen = select();
    return chosen;
}

}  // namespace pavsig::kernels
