#pragma once

#include <cstddef>

#include "sgdtheta/types.hpp"

namespace sgdtheta {

enum class PenaltyVariant { Quadratic, QuadraticNonneg, QuadraticTV };

/// Convex penalty theta. All implemented variants are 2-convex:
///   Quadratic        theta(x) = 1/2 ||x||^2                      sigma = 1/2
///   QuadraticNonneg  theta(x) = 1/2 ||x||^2 + indicator{x >= 0}  sigma = 1/2
///   QuadraticTV      theta(x) = 1/(2 beta) ||x||^2 + |x|_TV      sigma = 1/(2 beta)
struct PenaltySpec {
    PenaltyVariant variant = PenaltyVariant::Quadratic;
    double p = 2.0;
    double sigma = 0.5;
    double beta = 0.0;
    GridShape grid;  ///< TV variant only

    static PenaltySpec quadratic();
    static PenaltySpec quadratic_nonneg();
    static PenaltySpec quadratic_tv(double beta, GridShape grid);
};

/// PDHG parameters for the TV subproblem. Convergence needs
/// tau_primal * sigma_dual * L^2 <= 1 with L^2 = 8 for the unit-spaced
/// forward-difference gradient.
struct PdhgConfig {
    std::size_t max_iters = 200;
    double gap_tol = 1e-3;
    double tau_primal = 0.35355339059327373;   // 1/sqrt(8)
    double sigma_dual = 0.35355339059327373;

    void validate() const;
};

/// Warm-start carrier for PDHG across outer iterations. Owned by the caller;
/// an empty state starts cold.
struct PdhgState {
    Vector z;
    Vector p;  ///< dual field, 2 components per pixel (horizontal, vertical)
};

/// Primal-dual pair (x, xi) with xi in the subdifferential of theta at x.
struct BregmanPair {
    Vector x;
    DualVector xi;
};

/// Isotropic discrete TV: forward differences, unit spacing, replicate
/// (Neumann) boundary.
double tv_isotropic(std::span<const double> x, GridShape grid);

/// theta(x); +infinity is returned as std::numeric_limits<double>::infinity().
double penalty_value(const PenaltySpec& spec, std::span<const double> x);

/// D_xi theta(target, pair.x) = theta(target) - theta(pair.x) - <xi, target - pair.x>.
/// Throws InfeasibleTargetError when theta(target) is infinite.
double bregman_distance(const PenaltySpec& spec, std::span<const double> target,
                        const BregmanPair& pair);

/// x = argmin_z { theta(z) - <xi, z> }. Closed form for Quadratic (x = xi)
/// and QuadraticNonneg (x = max(xi, 0)); PDHG on the TV denoising problem for
/// QuadraticTV. `warm` (optional) carries PDHG state between calls.
BregmanPair mirror_step(const PenaltySpec& spec, const DualVector& xi,
                        const PdhgConfig& pdhg = {}, PdhgState* warm = nullptr);

/// Approximately minimizes 1/(2 beta) ||z - g||^2 + |z|_TV by vanilla PDHG,
/// stopping when the relative duality gap (primal - dual)/max(1,|primal|)
/// drops below cfg.gap_tol or cfg.max_iters is reached. Returns the best
/// primal iterate seen, so the objective never exceeds the objective at g.
Vector tv_denoise_pdhg(std::span<const double> g, GridShape grid, double beta,
                       const PdhgConfig& cfg = {}, PdhgState* warm = nullptr);

}  // namespace sgdtheta
