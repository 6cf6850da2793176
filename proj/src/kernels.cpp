#include "samplan/kernels.hpp"

namespace samplan::kernels {

namespace serial {

void dense_forward(const double* w, const double* bias, const double* x, Dims dims, double* z) {
    for (std::size_t b = 0; b < dims.batch; ++b) {
        const double* row_x = x + b * dims.in;
        double* row_z = z + b * dims.out;
        for (std::size_t o = 0; o < dims.out; ++o) {
            const double* row_w = w + o * dims.in;
            double acc = bias[o];
            for (std::size_t i = 0; i < dims.in; ++i)
                acc += row_x[i] * row_w[i];
            row_z[o] = acc;
        }
    }
}

void relu_forward(const double* z, std::size_t n, double* a) {
    for (std::size_t i = 0; i < n; ++i)
        a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void dense_backward_input(const double* w, const double* dz, Dims dims, double* dx) {
    for (std::size_t b = 0; b < dims.batch; ++b) {
        const double* row_dz = dz + b * dims.out;
        double* row_dx = dx + b * dims.in;
        for (std::size_t i = 0; i < dims.in; ++i) {
            double acc = 0.0;
            for (std::size_t o = 0; o < dims.out; ++o)
                acc += row_dz[o] * w[o * dims.in + i];
            row_dx[i] = acc;
        }
    }
}

void dense_backward_params(const double* x, const double* dz, Dims dims, double* dw,
                           double* dbias) {
    for (std::size_t o = 0; o < dims.out; ++o) {
        double* row_dw = dw + o * dims.in;
        for (std::size_t i = 0; i < dims.in; ++i)
            row_dw[i] = 0.0;
        double acc_bias = 0.0;
        for (std::size_t b = 0; b < dims.batch; ++b) {
            const double g = dz[b * dims.out + o];
            acc_bias += g;
            const double* row_x = x + b * dims.in;
            for (std::size_t i = 0; i < dims.in; ++i)
                row_dw[i] += g * row_x[i];
        }
        dbias[o] = acc_bias;
    }
}

void relu_backward(const double* z, const double* da, std::size_t n, double* dz) {
    for (std::size_t i = 0; i < n; ++i)
        dz[i] = z[i] > 0.0 ? da[i] : 0.0;
}

}  // namespace serial

namespace parallel {

void dense_forward(const double* w, const double* bias, const double* x, Dims dims, double* z) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < dims.batch; ++b) {
        const double* row_x = x + b * dims.in;
        double* row_z = z + b * dims.out;
        for (std::size_t o = 0; o < dims.out; ++o) {
            const double* row_w = w + o * dims.in;
            double acc = bias[o];
            for (std::size_t i = 0; i < dims.in; ++i)
                acc += row_x[i] * row_w[i];
            row_z[o] = acc;
        }
    }
}

void relu_forward(const double* z, std::size_t n, double* a) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void dense_backward_input(const double* w, const double* dz, Dims dims, double* dx) {
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < dims.batch; ++b) {
        const double* row_dz = dz + b * dims.out;
        double* row_dx = dx + b * dims.in;
        for (std::size_t i = 0; i < dims.in; ++i) {
            double acc = 0.0;
            for (std::size_t o = 0; o < dims.out; ++o)
                acc += row_dz[o] * w[o * dims.in + i];
            row_dx[i] = acc;
        }
    }
}

void dense_backward_params(const double* x, const double* dz, Dims dims, double* dw,
                           double* dbias) {
    // One thread owns output row o; the batch accumulation stays in serial
    // order inside it, keeping the sums bitwise equal to the reference.
#pragma omp parallel for schedule(static)
    for (std::size_t o = 0; o < dims.out; ++o) {
        double* row_dw = dw + o * dims.in;
        for (std::size_t i = 0; i < dims.in; ++i)
            row_dw[i] = 0.0;
        double acc_bias = 0.0;
        for (std::size_t b = 0; b < dims.batch; ++b) {
            const double g = dz[b * dims.out + o];
            acc_bias += g;
            const double* row_x = x + b * dims.in;
            for (std::size_t i = 0; i < dims.in; ++i)
                row_dw[i] += g * row_x[i];
        }
        dbias[o] = acc_bias;
    }
}

void relu_backward(const double* z, const double* da, std::size_t n, double* dz) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i)
        dz[i] = z[i] > 0.0 ? da[i] : 0.0;
}

}  // namespace parallel

}  // namespace samplan::kernels
