#include "sgdtheta/types.hpp"

#include <cmath>
#include <string>

namespace sgdtheta {

bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

void ensure_finite(std::span<const double> v, const char* what) {
    if (!all_finite(v)) {
        throw NumericalError(std::string("non-finite entries in ") + what);
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
    for (std::size_t k = 0; k < x.size(); ++k) y[k] += a * x[k];
}

}  // namespace sgdtheta
