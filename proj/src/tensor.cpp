#include "waferbench/tensor.hpp"

#include <cmath>
#include <string>

#include "waferbench/errors.hpp"

namespace waferbench {

Vector matvec(const Matrix& m, std::span<const double> x) {
    if (x.size() != m.cols) {
        throw ShapeError("matvec: input length " + std::to_string(x.size()) + " != columns " +
                         std::to_string(m.cols));
    }
    Vector y(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        y[r] = dot(m.row(r), x);
    }
    return y;
}

void add_matvec_transposed(const Matrix& m, std::span<const double> d, std::span<double> y) {
    if (d.size() != m.rows || y.size() != m.cols) {
        throw ShapeError("add_matvec_transposed: shape mismatch");
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double dr = d[r];
        if (dr == 0.0) continue;
        const auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols; ++c) y[c] += row[c] * dr;
    }
}

void add_outer(Matrix& m, std::span<const double> a, std::span<const double> b) {
    if (a.size() != m.rows || b.size() != m.cols) {
        throw ShapeError("add_outer: shape mismatch");
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double ar = a[r];
        if (ar == 0.0) continue;
        auto row = m.row(r);
        for (std::size_t c = 0; c < m.cols; ++c) row[c] += ar * b[c];
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace waferbench
