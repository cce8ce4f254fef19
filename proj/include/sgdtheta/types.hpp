#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sgdtheta/errors.hpp"

namespace sgdtheta {

/// Primal coordinates x in X (and data y in Y_i) on a discretized grid.
using Vector = std::vector<double>;

/// Dual coordinates xi in X*; pairing with Vector is the coordinate dot product.
using DualVector = std::vector<double>;

struct GridShape {
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return rows * cols; }
    bool operator==(const GridShape&) const = default;
};

bool all_finite(std::span<const double> v);

/// Throws NumericalError naming `what` if any entry is NaN/Inf.
void ensure_finite(std::span<const double> v, const char* what);

/// Sequential left-to-right dot product (reference accumulation order).
double dot(std::span<const double> a, std::span<const double> b);

double norm2(std::span<const double> v);

/// y += a * x, sequential.
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace sgdtheta
