// Throughput comparison of the serial reference kernels against the OpenMP
// variants, over the layer shapes the trainer actually uses.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "samplan/kernels.hpp"
#include "samplan/rng.hpp"

namespace {

using samplan::Rng;
using samplan::kernels::Dims;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<double> random_vector(std::size_t n, Rng& rng) {
    std::vector<double> values(n);
    for (double& v : values)
        v = rng.normal();
    return values;
}

template <typename Forward, typename BackwardInput, typename BackwardParams>
double time_pass(Forward forward, BackwardInput backward_input, BackwardParams backward_params,
                 Dims dims, int repetitions, const std::vector<double>& w,
                 const std::vector<double>& bias, const std::vector<double>& x,
                 std::vector<double>& z, std::vector<double>& dx, std::vector<double>& dw,
                 std::vector<double>& dbias) {
    const double start = now_seconds();
    for (int r = 0; r < repetitions; ++r) {
        forward(w.data(), bias.data(), x.data(), dims, z.data());
        backward_input(w.data(), z.data(), dims, dx.data());
        backward_params(x.data(), z.data(), dims, dw.data(), dbias.data());
    }
    return now_seconds() - start;
}

void bench_shape(std::size_t batch, std::size_t in, std::size_t out, int repetitions) {
    namespace k = samplan::kernels;
    Rng rng(7);
    const std::vector<double> w = random_vector(out * in, rng);
    const std::vector<double> bias = random_vector(out, rng);
    const std::vector<double> x = random_vector(batch * in, rng);
    std::vector<double> z(batch * out);
    std::vector<double> dx(batch * in);
    std::vector<double> dw(out * in);
    std::vector<double> dbias(out);

    const double serial = time_pass(k::serial::dense_forward, k::serial::dense_backward_input,
                                    k::serial::dense_backward_params, Dims{batch, in, out},
                                    repetitions, w, bias, x, z, dx, dw, dbias);
    const double parallel = time_pass(k::parallel::dense_forward,
                                      k::parallel::dense_backward_input,
                                      k::parallel::dense_backward_params, Dims{batch, in, out},
                                      repetitions, w, bias, x, z, dx, dw, dbias);
    const double mflop = 6.0 * static_cast<double>(batch) * static_cast<double>(in) *
                         static_cast<double>(out) * repetitions / 1e6;
    std::printf("%4zu x %4zu -> %4zu  serial %8.1f ms (%7.0f MFLOP/s)  parallel %8.1f ms "
                "(%7.0f MFLOP/s)  speedup %.2fx\n",
                batch, in, out, serial * 1e3, mflop / serial, parallel * 1e3, mflop / parallel,
                serial / parallel);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; parallel kernels run serially\n");
#endif
    bench_shape(64, 81, 250, 400);
    bench_shape(64, 250, 250, 400);
    bench_shape(512, 250, 250, 60);
    bench_shape(1024, 250, 250, 30);
    return 0;
}
