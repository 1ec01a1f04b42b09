#pragma once

#include <cstddef>
#include <span>

// Dense inner loops used by the trainers (dot products, saxpy-style updates,
// reductions). Scalar reference implementations are the semantic ground
// truth; AVX2/FMA variants are selected at runtime when the CPU supports
// them and are equivalence-tested against the reference.
namespace ctxengage::kernels {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);
using SumFn = double (*)(const double*, std::size_t);
using ScaleFn = void (*)(double, double*, std::size_t);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
void scale(double alpha, double* a, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum(const double* a, std::size_t n);
void scale(double alpha, double* a, std::size_t n);
}  // namespace avx2
#endif

extern DotFn dot_ptr;
extern AxpyFn axpy_ptr;
extern SumFn sum_ptr;
extern ScaleFn scale_ptr;

// Name of the active implementation: "avx2" or "scalar".
const char* active_implementation();

inline double dot(std::span<const double> a, std::span<const double> b) {
    return dot_ptr(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    axpy_ptr(alpha, x.data(), y.data(), x.size());
}
inline double sum(std::span<const double> a) { return sum_ptr(a.data(), a.size()); }
inline void scale(double alpha, std::span<double> a) { scale_ptr(alpha, a.data(), a.size()); }

}  // namespace ctxengage::kernels
