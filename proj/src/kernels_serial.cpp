#include "sparse_ias/parallel.hpp"

namespace sias::kernels::serial {

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* row = a + i * cols;
        double acc = 0.0;
        for (std::size_t j = 0; j < cols; ++j) {
            acc += row[j] * x[j];
        }
        y[i] = acc;
    }
}

void for_each_index(std::size_t count, const IndexFn& fn) {
    for (std::size_t i = 0; i < count; ++i) {
        fn(i);
    }
}

void scale_elementwise(const double* scale, const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = scale[i] * in[i];
    }
}

} // namespace sias::kernels::serial
