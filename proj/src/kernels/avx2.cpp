#include "pavsig/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define PAVSIG_HAVE_AVX2_VARIANT 1
#include <immintrin.h>
#endif

#include <algorithm>
#include <cstddef>

namespace pavsig::kernels {

#if defined(PAVSIG_HAVE_AVX2_VARIANT)
namespace {

#define PAVSIG_AVX2 __attribute__((target("avx2")))

PAVSIG_AVX2 void scale_clip(std::span<double> v, double factor) {
    const std::size_t n = v.size();
    const std::size_t blocked = n - n % 4;
    double* p = v.data();
    const __m256d f = _mm256_set1_pd(factor);
    const __m256d one = _mm256_set1_pd(1.0);
    for (std::size_t i = 0; i < blocked; i += 4) {
        __m256d x = _mm256_loadu_pd(p + i);
        // min(one, f*x) with the scalar std::min(1.0, ·) operand order
        __m256d scaled = _mm256_mul_pd(f, x);
        _mm256_storeu_pd(p + i, _mm256_min_pd(scaled, one));
    }
    for (std::size_t i = blocked; i < n; ++i) p[i] = std::min(1.0, factor * p[i]);
}

PAVSIG_AVX2 void axpy(std::span<double> y, double a, std::span<const double> x) {
    const std::size_t n = y.size();
    const std::size_t blocked = n - n % 4;
    double* py = y.data();
    const double* px = x.data();
    const __m256d va = _mm256_set1_pd(a);
    for (std::size_t i = 0; i < blocked; i += 4) {
        __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(px + i));
        _mm256_storeu_pd(py + i, _mm256_add_pd(_mm256_loadu_pd(py + i), prod));
    }
    for (std::size_t i = blocked; i < n; ++i) py[i] = py[i] + a * px[i];
}

PAVSIG_AVX2 double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t blocked = n - n % 4;
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t i = 0; i < blocked; i += 4) {
        __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc = _mm256_add_pd(acc, prod);
    }
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = blocked; i < n; ++i) sum = sum + pa[i] * pb[i];
    return sum;
}

#undef PAVSIG_AVX2

constexpr KernelTable kAvx2{"avx2", &scale_clip, &axpy, &dot};

}  // namespace

const KernelTable* avx2() {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2() { return nullptr; }

#endif

}  // namespace pavsig::kernels
