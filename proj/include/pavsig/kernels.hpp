#pragma once

// Dense vector kernels behind the learners' trace and weight updates.
//
// Every variant computes bit-identical results to the scalar reference:
// element-wise ops use a separate multiply and add (no fused multiply-add),
// and dot products accumulate into four interleaved lanes that are reduced
// as (l0 + l1) + (l2 + l3) before the scalar tail is added in order.

#include <span>
#include <string_view>

namespace pavsig::kernels {

struct KernelTable {
    std::string_view name;

    // v[i] = min(1, factor * v[i])
    void (*scale_clip)(std::span<double> v, double factor);

    // y[i] = y[i] + a * x[i]
    void (*axpy)(std::span<double> y, double a, std::span<const double> x);

    // sum_i a[i] * b[i], lane-ordered
    double (*dot)(std::span<const double> a, std::span<const double> b);
};

const KernelTable& scalar();

// nullptr when the variant is not compiled in or the CPU lacks support.
const KernelTable* avx2();
const KernelTable* neon();

// Best supported variant. PAVSIG_KERNELS=scalar|avx2|neon in the
// environment overrides the choice (an unsupported request falls back to
// scalar).
const KernelTable& active();

}  // namespace pavsig::kernels
