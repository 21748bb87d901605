#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace waferbench {

using Vector = std::vector<double>;

// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

    std::size_t size() const { return data.size(); }

    bool operator==(const Matrix&) const = default;
};

// y = M x (no bias). Throws ShapeError on mismatch.
Vector matvec(const Matrix& m, std::span<const double> x);

// y += M^T d
void add_matvec_transposed(const Matrix& m, std::span<const double> d, std::span<double> y);

// M += a b^T
void add_outer(Matrix& m, std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);

bool all_finite(std::span<const double> v);

}  // namespace waferbench
