#pragma once

#include <string>
#include <vector>

#include "sgdtheta/operators.hpp"
#include "sgdtheta/penalty.hpp"
#include "sgdtheta/types.hpp"

namespace sgdtheta {

/// One verification battery result: the worst measured deviation against the
/// tolerance it must stay under.
struct CheckResult {
    std::string name;
    double tolerance = 0.0;
    double measured = 0.0;
    bool pass = false;
    std::string note;
};

/// Exact 1D TV prox: minimizes 1/(2 beta) ||z - g||^2 + sum_k |z_{k+1} - z_k|
/// by cyclic coordinate descent on the dual box-constrained QP (independent
/// of the PDHG path; intended for short signals).
Vector tv_prox_1d_oracle(std::span<const double> g, double beta,
                         std::size_t max_sweeps = 200000, double tol = 1e-14);

/// <Fx, y> vs <x, F^T y> on random pairs.
CheckResult check_sparse_adjoint(const SparseRowBlock& F, std::size_t trials,
                                 std::uint64_t seed, double tol = 1e-12);

/// H^1 adjoint identity <F'(f)h, g> = <(I - Lap_h) F'(f)* g, h> on random draws.
CheckResult check_schlieren_adjoint(const SchlierenOperator& op, std::size_t trials,
                                    std::uint64_t seed, double tol = 1e-8);

/// Central finite differences of F against 2 (R f)(R h).
CheckResult check_schlieren_derivative(const SchlierenOperator& op, std::size_t trials,
                                       std::uint64_t seed, double tol = 1e-5);

/// <J_r(y), y> = ||y||^r and ||J_r(y)||_{r*} = ||y||^{r-1} over random vectors
/// and r in {1.1, 1.5, 2, 3}.
CheckResult check_duality_identities(std::size_t trials, std::size_t dim, std::uint64_t seed,
                                     double tol = 1e-10);

/// PDHG TV prox against the 1D oracle on short random signals.
CheckResult check_tv_prox_oracle(std::size_t trials, std::uint64_t seed, double tol = 1e-3);

/// Per-path Bregman monotonicity of SGD-theta on a small noisy CT instance.
CheckResult check_bregman_monotonicity(std::uint64_t seed, std::size_t iters = 600,
                                       double tol = 1e-12);

/// The default battery backing `sgdtheta check`.
std::vector<CheckResult> run_all_checks(std::uint64_t seed);

}  // namespace sgdtheta
