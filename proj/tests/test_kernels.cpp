#include <bit>
#include <cstdint>
#include <random>
#include <vector>

#include <stdexcept>

#include "doctest.h"
#include "pavsig/kernels.hpp"

using namespace pavsig;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = d(rng);
    return v;
}

bool bit_equal(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::bit_cast<std::uint64_t>(a[i]) != std::bit_cast<std::uint64_t>(b[i])) return false;
    }
    return true;
}

std::vector<const kernels::KernelTable*> variants() {
    std::vector<const kernels::KernelTable*> out;
    if (auto* k = kernels::avx2()) out.push_back(k);
    if (auto* k = kernels::neon()) out.push_back(k);
    return out;
}

const std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 31, 64, 1023, 2048, 2051};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference matches naive loops") {
    std::mt19937_64 rng(7);
    for (std::size_t n : kSizes) {
        auto v = random_vector(rng, n, -0.5, 1.5);
        auto expect = v;
        for (double& x : expect) x = (0.81 * x < 1.0) ? 0.81 * x : 1.0;
        kernels::scalar().scale_clip(v, 0.81);
        CHECK(bit_equal(v, expect));

        auto y = random_vector(rng, n, -10, 10);
        const auto x = random_vector(rng, n, -10, 10);
        auto y_expect = y;
        for (std::size_t i = 0; i < n; ++i) y_expect[i] = y_expect[i] + 0.37 * x[i];
        kernels::scalar().axpy(y, 0.37, x);
        CHECK(bit_equal(y, y_expect));
    }
}

TEST_CASE("dot uses four lanes then an in-order tail") {
    std::mt19937_64 rng(11);
    for (std::size_t n : kSizes) {
        const auto a = random_vector(rng, n, -3, 3);
        const auto b = random_vector(rng, n, -3, 3);
        double l[4] = {0, 0, 0, 0};
        std::size_t i = 0;
        for (; i + 4 <= n; i += 4) {
            for (int j = 0; j < 4; ++j) l[j] += a[i + j] * b[i + j];
        }
        double expect = (l[0] + l[1]) + (l[2] + l[3]);
        for (; i < n; ++i) expect += a[i] * b[i];
        CHECK(std::bit_cast<std::uint64_t>(kernels::scalar().dot(a, b)) ==
              std::bit_cast<std::uint64_t>(expect));
    }
}

TEST_CASE("dot on sparse one-hot operands is exact") {
    std::vector<double> w(2048, 0.0), x(2048, 0.0);
    w[532] = 300.0;
    w[1024] = 150.0;
    x[532] = 1.0;
    x[1024] = 1.0;
    CHECK(kernels::scalar().dot(w, x) == 450.0);
}

TEST_CASE("vector variants are bit-identical to scalar") {
    const auto vs = variants();
    if (vs.empty()) {
        MESSAGE("no SIMD variant supported on this CPU; only scalar checked");
        return;
    }
    std::mt19937_64 rng(13);
    for (const auto* k : vs) {
        CAPTURE(k->name);
        for (int rep = 0; rep < 50; ++rep) {
            for (std::size_t n : kSizes) {
                CAPTURE(n);
                // Mix values below, at and above the clip point.
                auto v1 = random_vector(rng, n, -0.2, 1.6);
                if (n > 2) v1[1] = 1.0 / 0.9;
                auto v2 = v1;
                const double f = rep % 2 ? 0.81 : 0.9;
                kernels::scalar().scale_clip(v1, f);
                k->scale_clip(v2, f);
                CHECK(bit_equal(v1, v2));

                auto y1 = random_vector(rng, n, -1e3, 1e3);
                auto y2 = y1;
                const auto x = random_vector(rng, n, -1e3, 1e3);
                kernels::scalar().axpy(y1, 0.1 * (rep + 1), x);
                k->axpy(y2, 0.1 * (rep + 1), x);
                CHECK(bit_equal(y1, y2));

                const double d1 = kernels::scalar().dot(y1, x);
                const double d2 = k->dot(y1, x);
                CHECK(std::bit_cast<std::uint64_t>(d1) == std::bit_cast<std::uint64_t>(d2));
            }
        }
    }
}

TEST_CASE("active table is one of the known variants") {
    const auto& a = kernels::active();
    const bool known = &a == &kernels::scalar() || &a == kernels::avx2() || &a == kernels::neon();
    CHECK(known);
}

}
