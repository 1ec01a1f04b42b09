#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "ctxengage/kernels.hpp"

using namespace ctxengage;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
    return v;
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference") {
    std::mt19937_64 rng(42);
    for (std::size_t n : {std::size_t(0), std::size_t(1), std::size_t(3), std::size_t(4), std::size_t(7),
                          std::size_t(8), std::size_t(63), std::size_t(1000), std::size_t(4097)}) {
        auto a = random_vec(rng, n);
        auto b = random_vec(rng, n);

        double ref = kernels::scalar::dot(a.data(), b.data(), n);
        double got = kernels::dot(a, b);
        CHECK(std::abs(got - ref) <= 1e-12 * (1.0 + std::abs(ref)) + 1e-13 * static_cast<double>(n));

        double sum_ref = kernels::scalar::sum(a.data(), n);
        CHECK(std::abs(kernels::sum(a) - sum_ref) <=
              1e-12 * (1.0 + std::abs(sum_ref)) + 1e-13 * static_cast<double>(n));

        auto y1 = b, y2 = b;
        kernels::axpy(0.37, a, y1);
        kernels::scalar::axpy(0.37, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

        auto s1 = a, s2 = a;
        kernels::scale(-1.75, s1);
        kernels::scalar::scale(-1.75, s2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(s1[i] == s2[i]);
    }
}

#if defined(__x86_64__)
TEST_CASE("avx2 variants match scalar when the CPU supports them") {
    if (std::string(kernels::active_implementation()) != "avx2") return;
    std::mt19937_64 rng(7);
    auto a = random_vec(rng, 1537);
    auto b = random_vec(rng, 1537);
    double ref = kernels::scalar::dot(a.data(), b.data(), a.size());
    double simd = kernels::avx2::dot(a.data(), b.data(), a.size());
    CHECK(std::abs(simd - ref) <= 1e-11 * (1.0 + std::abs(ref)));

    auto y1 = b, y2 = b;
    kernels::avx2::axpy(2.5, a.data(), y1.data(), a.size());
    kernels::scalar::axpy(2.5, a.data(), y2.data(), a.size());
    // FMA contraction rounds once, the reference twice.
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));
}
#endif

TEST_CASE("axpy accumulates exactly like a hand loop") {
    std::vector<double> x = {1.0, 2.0, 3.0};
    std::vector<double> y = {10.0, 20.0, 30.0};
    kernels::axpy(2.0, x, y);
    CHECK(y[0] == 12.0);
    CHECK(y[1] == 24.0);
    CHECK(y[2] == 36.0);
}
