// Serial reference kernels against their OpenMP twins, plus whole-operator
// timings at 1 thread and at the default thread count.
//
//   bench_kernels [repeats]

#include "sparse_ias/experiments.hpp"
#include "sparse_ias/linops.hpp"
#include "sparse_ias/parallel.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

using sias::Vector;

namespace {

double best_ms(int repeats, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        best = std::min(best, ms);
    }
    return best;
}

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (double& x : v) {
        x = u(rng);
    }
    return v;
}

void row(const std::string& name, double serial, double parallel, bool same) {
    std::printf("%-34s %10.3f %10.3f %8.2fx  %s\n", name.c_str(), serial, parallel, serial / parallel,
                same ? "bitwise-equal" : "MISMATCH");
}

} // namespace

int main(int argc, char** argv) {
    const int repeats = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
    std::mt19937_64 rng(42);
    std::printf("threads: %d\n", sias::thread_limit());
    std::printf("%-34s %10s %10s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    {
        const std::size_t rows = 3000, cols = 3000;
        const Vector a = random_vector(rows * cols, rng);
        const Vector x = random_vector(cols, rng);
        Vector ys(rows), yp(rows);
        const double s = best_ms(repeats, [&] { sias::kernels::serial::matvec(a.data(), rows, cols, x.data(), ys.data()); });
        const double p = best_ms(repeats, [&] { sias::kernels::omp::matvec(a.data(), rows, cols, x.data(), yp.data()); });
        row("matvec 3000x3000", s, p, ys == yp);
    }
    {
        const std::size_t n = 1 << 22;
        const Vector d = random_vector(n, rng), x = random_vector(n, rng);
        Vector ys(n), yp(n);
        const double s = best_ms(repeats, [&] { sias::kernels::serial::scale_elementwise(d.data(), x.data(), ys.data(), n); });
        const double p = best_ms(repeats, [&] { sias::kernels::omp::scale_elementwise(d.data(), x.data(), yp.data(), n); });
        row("scale_elementwise 4M", s, p, ys == yp);
    }

    // Operators dispatch to the OpenMP kernels; the thread cap gives the serial baseline.
    const auto op_row = [&](const std::string& name, const sias::LinearMap& map) {
        const Vector x = random_vector(map.cols(), rng);
        const Vector y = random_vector(map.rows(), rng);
        Vector fs, fp, as, ap;
        sias::set_thread_limit(1);
        const double s = best_ms(repeats, [&] { fs = map.apply(x); as = map.apply_adjoint(y); });
        sias::set_thread_limit(0);
        const double p = best_ms(repeats, [&] { fp = map.apply(x); ap = map.apply_adjoint(y); });
        row(name, s, p, fs == fp && as == ap);
    };
    {
        auto spec = sias::ExperimentSpec::defaults(sias::ExperimentKind::restore2d);
        spec.n = 128;
        const auto ex = sias::make_restore2d(spec);
        op_row("restore2d A W apply+adjoint n=128", ex.problem.forward_dict);
    }
    {
        const auto dict = sias::increments_dictionary(512);
        op_row("increments dict apply+adj n=512", dict.as_map());
    }
    {
        const auto map = sias::dct_synthesis(2048);
        op_row("dct_synthesis 2048 apply+adjoint", map);
    }
    {
        auto spec = sias::ExperimentSpec::defaults(sias::ExperimentKind::deconv1d);
        const auto ex = sias::make_deconv1d(spec);
        Vector cs, cp;
        sias::set_thread_limit(1);
        const double s = best_ms(repeats, [&] { cs = ex.problem.forward_dict.column_norms_squared(); });
        sias::set_thread_limit(0);
        const double p = best_ms(repeats, [&] { cp = ex.problem.forward_dict.column_norms_squared(); });
        row("deconv1d column norms", s, p, cs == cp);
    }
    return 0;
}
