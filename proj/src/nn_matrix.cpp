#include "swardcast/nn/matrix.hpp"

namespace swardcast::nn {

void matvec(const Matrix& m, std::span<const double> v, std::span<double> out) {
    const double* w = m.data.data();
    for (std::size_t r = 0; r < m.rows; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) {
            acc += w[r * m.cols + c] * v[c];
        }
        out[r] = acc;
    }
}

void matvec_transpose_add(const Matrix& m, std::span<const double> v, std::span<double> out) {
    const double* w = m.data.data();
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double vr = v[r];
        for (std::size_t c = 0; c < m.cols; ++c) {
            out[c] += w[r * m.cols + c] * vr;
        }
    }
}

void add_outer(Matrix& acc, std::span<const double> a, std::span<const double> b) {
    double* w = acc.data.data();
    for (std::size_t r = 0; r < acc.rows; ++r) {
        const double ar = a[r];
        for (std::size_t c = 0; c < acc.cols; ++c) {
            w[r * acc.cols + c] += ar * b[c];
        }
    }
}

}  // namespace swardcast::nn
