#pragma once

// Dense-layer kernels used by the trainer and by batch heuristic evaluation.
// Two implementations share one contract: kernels::serial is the reference,
// kernels::parallel adds OpenMP worksharing. Every output element is written
// by exactly one thread and accumulated in a fixed serial order, so the
// parallel results are bitwise identical to the serial ones for any thread
// count. benchmarks/bench_kernels compares their throughput.
//
// Layouts: X is batch-major [batch][in], W row-major [out][in], Z [batch][out].

#include <cstddef>

namespace samplan::kernels {

struct Dims {
    std::size_t batch;
    std::size_t in;
    std::size_t out;
};

namespace serial {

// z[b][o] = sum_i x[b][i] * w[o][i] + bias[o]
void dense_forward(const double* w, const double* bias, const double* x, Dims dims, double* z);
// a[i] = max(0, z[i])
void relu_forward(const double* z, std::size_t n, double* a);
// dx[b][i] = sum_o dz[b][o] * w[o][i]
void dense_backward_input(const double* w, const double* dz, Dims dims, double* dx);
// dw[o][i] = sum_b dz[b][o] * x[b][i];  dbias[o] = sum_b dz[b][o]
void dense_backward_params(const double* x, const double* dz, Dims dims, double* dw,
                           double* dbias);
// dz[i] = z[i] > 0 ? da[i] : 0
void relu_backward(const double* z, const double* da, std::size_t n, double* dz);

}  // namespace serial

namespace parallel {

void dense_forward(const double* w, const double* bias, const double* x, Dims dims, double* z);
void relu_forward(const double* z, std::size_t n, double* a);
void dense_backward_input(const double* w, const double* dz, Dims dims, double* dx);
void dense_backward_params(const double* x, const double* dz, Dims dims, double* dw,
                           double* dbias);
void relu_backward(const double* z, const double* da, std::size_t n, double* dz);

}  // namespace parallel

}  // namespace samplan::kernels
