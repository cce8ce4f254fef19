#pragma once

#include <cstddef>
#include <span>

#include "sgdtheta/types.hpp"

namespace sgdtheta {

/// Data space Y_i = (R^dim, ||.||_r) with 1 < r < infinity.
struct DataSpaceSpec {
    double r;
    std::size_t dim;

    DataSpaceSpec(double r_, std::size_t dim_);
};

/// Conjugate exponent p* = p/(p-1) for p > 1.
double conj_exponent(double p);

/// (sum_k |y_k|^r)^(1/r), r >= 1. Sequential accumulation.
double lr_norm(std::span<const double> y, double r);

/// Weighted variant (sum_k w_k |y_k|^r)^(1/r); empty weights mean all ones.
double lr_norm_weighted(std::span<const double> y, std::span<const double> w, double r);

/// Duality mapping J_r(y)_k = sign(y_k) |y_k|^(r-1), r > 1.
///
/// Gradient of y -> ||y||_r^r / r; satisfies <J_r(y), y> = ||y||_r^r and
/// ||J_r(y)||_{r*} = ||y||_r^(r-1) with r* = conj_exponent(r).
DualVector duality_map(std::span<const double> y, double r);

/// Weighted duality map J(y)_k = w_k sign(y_k) |y_k|^(r-1), the gradient of
/// y -> (sum w_k |y_k|^r)/r. Writes into `out` (same length as y).
void duality_map_weighted(std::span<const double> y, std::span<const double> w,
                          double r, std::span<double> out);

/// |v|^e with an exact-zero branch; e == 1 and e == 2 short-circuit so that
/// low-order exponents stay bit-exact.
double abs_pow(double v, double e);

}  // namespace sgdtheta
