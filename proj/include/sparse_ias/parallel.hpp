#pragma once

#include <cstddef>
#include <functional>

namespace sias {

// Upper bound on worker threads for operator applications. Read once from
// SPARSE_IAS_THREADS; falls back to the OpenMP default when unset or invalid.
int thread_limit();

// Overrides the limit for the rest of the process (tests, benchmarks, CLI).
// A value <= 0 restores the environment/default behaviour.
void set_thread_limit(int threads);

namespace kernels {

using IndexFn = std::function<void(std::size_t)>;

// Reference implementations. Every kernel here has an omp:: twin with the
// same signature whose output is bitwise identical: each output element is
// produced by exactly one thread with the same summation order.
namespace serial {

// y = A x for a row-major rows x cols matrix.
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

// Calls fn(i) for i in [0, count).
void for_each_index(std::size_t count, const IndexFn& fn);

// out[i] = scale[i] * in[i]
void scale_elementwise(const double* scale, const double* in, double* out, std::size_t n);

} // namespace serial

namespace omp {

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);
void for_each_index(std::size_t count, const IndexFn& fn);
void scale_elementwise(const double* scale, const double* in, double* out, std::size_t n);

} // namespace omp

} // namespace kernels
} // namespace sias
