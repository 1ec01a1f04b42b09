#include "ctxengage/kernels.hpp"

namespace ctxengage::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

void scale(double alpha, double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= alpha;
}

}  // namespace scalar

namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

}  // namespace

#if defined(CTXENGAGE_AVX2_BUILT)
DotFn dot_ptr = cpu_has_avx2_fma() ? avx2::dot : scalar::dot;
AxpyFn axpy_ptr = cpu_has_avx2_fma() ? avx2::axpy : scalar::axpy;
SumFn sum_ptr = cpu_has_avx2_fma() ? avx2::sum : scalar::sum;
ScaleFn scale_ptr = cpu_has_avx2_fma() ? avx2::scale : scalar::scale;

const char* active_implementation() { return cpu_has_avx2_fma() ? "avx2" : "scalar"; }
#else
DotFn dot_ptr = scalar::dot;
AxpyFn axpy_ptr = scalar::axpy;
SumFn sum_ptr = scalar::sum;
ScaleFn scale_ptr = scalar::scale;

const char* active_implementation() { return "scalar"; }
#endif

}  // namespace ctxengage::kernels
