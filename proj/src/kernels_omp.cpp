#include "sparse_ias/parallel.hpp"

#include <omp.h>

#include <atomic>
#include <cstdlib>
#include <string>

namespace sias {

namespace {

std::atomic<int> g_override{0};

int env_threads() {
    static const int value = [] {
        const char* raw = std::getenv("SPARSE_IAS_THREADS");
        if (raw == nullptr) {
            return 0;
        }
        try {
            const int parsed = std::stoi(raw);
            return parsed > 0 ? parsed : 0;
        } catch (const std::exception&) {
            return 0;
        }
    }();
    return value;
}

// Small loops are not worth a parallel region.
constexpr std::size_t kMinParallelWork = 4096;

} // namespace

int thread_limit() {
    if (const int o = g_override.load(); o > 0) {
        return o;
    }
    if (const int e = env_threads(); e > 0) {
        return e;
    }
    return omp_get_max_threads();
}

void set_thread_limit(int threads) { g_override.store(threads > 0 ? threads : 0); }

namespace kernels::omp {

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    const int threads = (rows * cols >= kMinParallelWork && !omp_in_parallel()) ? thread_limit() : 1;
    const auto n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double* row = a + static_cast<std::size_t>(i) * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += row[j] * x[j];
        }
        y[i] = acc;
    }
}

void for_each_index(std::size_t count, const IndexFn& fn) {
    const int threads = (count > 1 && !omp_in_parallel()) ? thread_limit() : 1;
    const auto n = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        fn(static_cast<std::size_t>(i));
    }
}

void scale_elementwise(const double* scale, const double* in, double* out, std::size_t n) {
    const int threads = (n >= kMinParallelWork && !omp_in_parallel()) ? thread_limit() : 1;
    const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        out[i] = scale[i] * in[i];
    }
}

} // namespace kernels::omp
} // namespace sias
