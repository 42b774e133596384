#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swardcast::nn {

/// Dense row-major matrix. Also used as a (channels x length) sequence buffer.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::size_t size() const { return data.size(); }
};

/// out = m * v
void matvec(const Matrix& m, std::span<const double> v, std::span<double> out);

/// out += m^T * v
void matvec_transpose_add(const Matrix& m, std::span<const double> v, std::span<double> out);

/// acc += a * b^T
void add_outer(Matrix& acc, std::span<const double> a, std::span<const double> b);

}  // namespace swardcast::nn
