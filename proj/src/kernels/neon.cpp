#include "pavsig/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

#include <algorithm>
#include <cstddef>

namespace pavsig::kernels {

#if defined(__aarch64__)
namespace {

void scale_clip(std::span<double> v, double factor) {
    const std::size_t n = v.size();
    const std::size_t blocked = n - n % 2;
    double* p = v.data();
    const float64x2_t f = vdupq_n_f64(factor);
    const float64x2_t one = vdupq_n_f64(1.0);
    for (std::size_t i = 0; i < blocked; i += 2) {
        float64x2_t scaled = vmulq_f64(f, vld1q_f64(p + i));
        // select scaled where scaled < 1, matching std::min(1.0, scaled)
        uint64x2_t lt = vcltq_f64(scaled, one);
        vst1q_f64(p + i, vbslq_f64(lt, scaled, one));
    }
    for (std::size_t i = blocked; i < n; ++i) p[i] = std::min(1.0, factor * p[i]);
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
    const std::size_t n = y.size();
    const std::size_t blocked = n - n % 2;
    double* py = y.data();
    const double* px = x.data();
    const float64x2_t va = vdupq_n_f64(a);
    for (std::size_t i = 0; i < blocked; i += 2) {
        float64x2_t prod = vmulq_f64(va, vld1q_f64(px + i));
        vst1q_f64(py + i, vaddq_f64(vld1q_f64(py + i), prod));
    }
    for (std::size_t i = blocked; i < n; ++i) py[i] = py[i] + a * px[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t blocked = n - n % 4;
    const double* pa = a.data();
    const double* pb = b.data();
    float64x2_t lo = vdupq_n_f64(0.0);  // lanes 0, 1
    float64x2_t hi = vdupq_n_f64(0.0);  // lanes 2, 3
    for (std::size_t i = 0; i < blocked; i += 4) {
        lo = vaddq_f64(lo, vmulq_f64(vld1q_f64(pa + i), vld1q_f64(pb + i)));
        hi = vaddq_f64(hi, vmulq_f64(vld1q_f64(pa + i + 2), vld1q_f64(pb + i + 2)));
    }
    double sum = (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
                 (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
    for (std::size_t i = blocked; i < n; ++i) sum = sum + pa[i] * pb[i];
    return sum;
}

constexpr KernelTable kNeon{"neon", &scale_clip, &axpy, &dot};

}  // namespace

const KernelTable* neon() { return &kNeon; }

#else

const KernelTable* neon() { return nullptr; }

#endif

}  // namespace pavsig::kernels
