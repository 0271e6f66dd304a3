#include "pavsig/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace pavsig::kernels {
namespace {

void scale_clip(std::span<double> v, double factor) {
    for (double& x : v) x = std::min(1.0, factor * x);
}

void axpy(std::span<double> y, double a, std::span<const double> x) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

double dot(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    const std::size_t blocked = n - n % 4;
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < blocked; i += 4) {
        for (std::size_t j = 0; j < 4; ++j) lane[j] = lane[j] + a[i + j] * b[i + j];
    }
    double sum = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (std::size_t i = blocked; i < n; ++i) sum = sum + a[i] * b[i];
    return sum;
}

constexpr KernelTable kScalar{"scalar", &scale_clip, &axpy, &dot};

}  // namespace

const KernelTable& scalar() { return kScalar; }

}  // namespace pavsig::kernels
