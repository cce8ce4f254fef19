#pragma once

#include <cstdint>
#include <vector>

#include "sgdtheta/types.hpp"

namespace sgdtheta {

/// Compressed-sparse-row matrix block; rows are the per-ray equations.
struct SparseRowBlock {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint64_t> offsets;  ///< rows + 1, nondecreasing
    std::vector<std::uint64_t> indices;  ///< column indices in [0, cols)
    std::vector<double> values;

    std::size_t nnz() const { return values.size(); }

    double row_dot(std::size_t row, std::span<const double> x) const;

    /// acc += a * row  (scatter of one row into domain space).
    void row_axpy(std::size_t row, double a, std::span<double> acc) const;

    void apply(std::span<const double> x, std::span<double> out) const;
    void apply_transpose(std::span<const double> y, std::span<double> out) const;

    double row_norm2(std::size_t row) const;

    /// Structural validity check (offsets monotone, indices in range, finite values).
    void validate() const;
};

/// Parallel-beam projector in the AIR Tools line model: image n x n with unit
/// pixels centered at the origin, n_lines detector offsets per angle evenly
/// spaced at unit distance (t = -(n_lines-1)/2 ... +(n_lines-1)/2), entry
/// (ray, pixel) = Euclidean length of the ray-pixel intersection. Rays that
/// miss the image give all-zero rows. Angles in degrees; the ray for angle
/// phi and offset t is { t*(cos phi, sin phi) + s*(-sin phi, cos phi) }.
SparseRowBlock build_parallel_tomo(std::size_t n, const std::vector<double>& angles_deg,
                                   std::size_t n_lines);

/// Rows [row_begin, row_end) of F x, deterministic accumulation order.
Vector radon_row_apply(const SparseRowBlock& block, std::size_t row_begin,
                       std::size_t row_end, std::span<const double> x);

struct PoissonSolveConfig {
    double cg_tol = 1e-10;        ///< relative residual tolerance
    std::size_t cg_max_iters = 0; ///< 0 = 10 * grid size
};

/// Solves (I - Lap_h) u = w on an n x n grid over [-1,1]^2 by conjugate
/// gradients; Lap_h is the 5-point Laplacian with spacing h = 2/(n-1) and
/// homogeneous Dirichlet data (values beyond the grid are zero). The operator
/// is applied at every node, so it is symmetric positive definite on the full
/// grid vector. Throws ConvergenceError if CG fails to reach cg_tol.
Vector poisson_solve(std::span<const double> w, GridShape grid,
                     const PoissonSolveConfig& cfg = {});

/// (I - Lap_h) u, the operator inverted by poisson_solve.
Vector poisson_apply(std::span<const double> u, GridShape grid);

/// Schlieren forward map for one recording direction: f |-> (R f)^2 where R is
/// the Radon transform along sigma = (cos phi, sin phi), discretized on an
/// n x n grid over D = [-1,1]^2 with detector offsets spanning [-sqrt2, sqrt2].
///
/// R is assembled as a sparse matrix (composite midpoint quadrature at
/// grid-spacing resolution, bilinear interpolation, f = 0 outside D); the
/// back-projection R* is its exact transpose. The derivative adjoint maps
/// through (I - Lap)^{-1} into H^1_0.
class SchlierenOperator {
public:
    /// detectors == 0 chooses ceil(1.5 * n).
    SchlierenOperator(std::size_t grid_n, double angle_rad, std::size_t detectors = 0);

    std::size_t grid_n() const { return n_; }
    GridShape grid() const { return {n_, n_}; }
    std::size_t out_dim() const { return radon_.rows; }
    double angle() const { return angle_; }

    /// Discrete R f.
    Vector radon(std::span<const double> f) const;

    /// F(f) = (R f)^2 componentwise.
    Vector apply(std::span<const double> f) const;

    /// F'(f) h = 2 (R f) (R h) componentwise.
    Vector derivative_apply(std::span<const double> f, std::span<const double> h) const;

    /// F'(f)* g = (I - Lap)^{-1} ( 2 R^T (g . R f) ).
    DualVector derivative_adjoint(std::span<const double> f, std::span<const double> g,
                                  const PoissonSolveConfig& cfg = {}) const;

    /// Trapezoid quadrature weights on the detector axis (for L^2 norms of data).
    const Vector& detector_weights() const { return weights_; }

    const SparseRowBlock& matrix() const { return radon_; }

    /// phi_i = 2 pi i / count, i = 0..count-1.
    static std::vector<double> uniform_angles(std::size_t count);

private:
    std::size_t n_;
    double angle_;
    SparseRowBlock radon_;
    Vector weights_;
};

}  // namespace sgdtheta
