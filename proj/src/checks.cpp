#include "sgdtheta/checks.hpp"

#include <algorithm>
#include <cmath>

#include "sgdtheta/rng.hpp"
#include "sgdtheta/sampling.hpp"
#include "sgdtheta/solver.hpp"
#include "sgdtheta/spaces.hpp"

namespace sgdtheta {

Vector tv_prox_1d_oracle(std::span<const double> g, double beta, std::size_t max_sweeps,
                         double tol) {
    if (!(beta > 0.0)) throw ConfigError("tv_prox_1d_oracle: beta must be > 0");
    const std::size_t m = g.size();
    if (m == 0) throw DimensionError("tv_prox_1d_oracle: empty signal");
    if (m == 1) return Vector(g.begin(), g.end());

    // Dual: minimize 1/2 ||D^T q||^2 - <Dg, q> over |q_k| <= beta, then
    // z = g - D^T q, with (D z)_k = z_{k+1} - z_k and (D^T q)_j = q_{j-1} - q_j.
    std::vector<double> q(m - 1, 0.0);
    auto dtq = [&q, m](std::size_t j) {
        double v = 0.0;
        if (j > 0) v += q[j - 1];
        if (j < m - 1) v -= q[j];
        return v;
    };
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            // Exact minimization over q_k (diagonal Hessian entry = 2).
            const double grad = (dtq(k + 1) - dtq(k)) - (g[k + 1] - g[k]);
            const double next = std::clamp(q[k] - 0.5 * grad, -beta, beta);
            max_change = std::max(max_change, std::fabs(next - q[k]));
            q[k] = next;
        }
        if (max_change < tol * (1.0 + beta)) break;
    }
    Vector z(m);
    for (std::size_t j = 0; j < m; ++j) z[j] = g[j] - dtq(j);
    return z;
}

CheckResult check_sparse_adjoint(const SparseRowBlock& F, std::size_t trials, std::uint64_t seed,
                                 double tol) {
    CheckResult res{"sparse adjoint <Fx,y> = <x,F^T y>", tol, 0.0, false, ""};
    CounterRng rng(seed);
    Vector x(F.cols), y(F.rows), fx(F.rows), fty(F.cols);
    for (std::size_t t = 0; t < trials; ++t) {
        for (double& v : x) v = rng.next_symmetric();
        for (double& v : y) v = rng.next_symmetric();
        F.apply(x, fx);
        F.apply_transpose(y, fty);
        const double a = dot(fx, y), b = dot(x, fty);
        // Relative to the Cauchy-Schwarz scale of the pairings.
        const double scale = std::max(1e-30, norm2(fx) * norm2(y));
        res.measured = std::max(res.measured, std::fabs(a - b) / scale);
    }
    res.pass = res.measured <= tol;
    return res;
}

CheckResult check_schlieren_adjoint(const SchlierenOperator& op, std::size_t trials,
                                    std::uint64_t seed, double tol) {
    CheckResult res{"schlieren H1 adjoint", tol, 0.0, false, ""};
    CounterRng rng(seed);
    const std::size_t npx = op.grid_n() * op.grid_n();
    PoissonSolveConfig cfg;
    Vector f(npx), h(npx), g(op.out_dim());
    for (std::size_t t = 0; t < trials; ++t) {
        for (double& v : f) v = rng.next_symmetric();
        for (double& v : h) v = rng.next_symmetric();
        for (double& v : g) v = rng.next_symmetric();
        const Vector lhs_vec = op.derivative_apply(f, h);
        const double lhs = dot(lhs_vec, g);
        const DualVector adj = op.derivative_adjoint(f, g, cfg);
        // <h, u>_{H1} with <u,v>_{H1} = <(I - Lap_h) u, v>.
        const Vector lap_adj = poisson_apply(adj, op.grid());
        const double rhs = dot(lap_adj, h);
        const double scale = std::max(1e-30, norm2(lhs_vec) * norm2(g));
        res.measured = std::max(res.measured, std::fabs(lhs - rhs) / scale);
    }
    res.pass = res.measured <= tol;
    return res;
}

CheckResult check_schlieren_derivative(const SchlierenOperator& op, std::size_t trials,
                                       std::uint64_t seed, double tol) {
    CheckResult res{"schlieren Frechet derivative vs central differences", tol, 0.0, false, ""};
    CounterRng rng(seed);
    const std::size_t npx = op.grid_n() * op.grid_n();
    const double eps = 1e-5;
    Vector f(npx), h(npx), fp(npx), fm(npx);
    for (std::size_t t = 0; t < trials; ++t) {
        for (double& v : f) v = rng.next_symmetric();
        for (double& v : h) v = rng.next_symmetric();
        for (std::size_t k = 0; k < npx; ++k) {
            fp[k] = f[k] + eps * h[k];
            fm[k] = f[k] - eps * h[k];
        }
        const Vector d = op.derivative_apply(f, h);
        const Vector up = op.apply(fp), um = op.apply(fm);
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const double fd = (up[k] - um[k]) / (2.0 * eps);
            num += (fd - d[k]) * (fd - d[k]);
            den += d[k] * d[k];
        }
        const double rel = std::sqrt(num) / std::max(1e-30, std::sqrt(den));
        res.measured = std::max(res.measured, rel);
    }
    res.pass = res.measured <= tol;
    return res;
}

CheckResult check_duality_identities(std::size_t trials, std::size_t dim, std::uint64_t seed,
                                     double tol) {
    CheckResult res{"duality map identities", tol, 0.0, false, ""};
    CounterRng rng(seed);
    const double exponents[] = {1.1, 1.5, 2.0, 3.0};
    Vector y(dim);
    for (std::size_t t = 0; t < trials; ++t) {
        for (double& v : y) v = 2.0 * rng.next_symmetric();
        for (double r : exponents) {
            const DualVector j = duality_map(y, r);
            const double yn = lr_norm(y, r);
            const double pairing = dot(j, y);
            const double rel1 = std::fabs(pairing - abs_pow(yn, r)) / (1.0 + abs_pow(yn, r));
            const double jn = lr_norm(j, conj_exponent(r));
            const double want = abs_pow(yn, r - 1.0);
            const double rel2 = std::fabs(jn - want) / std::max(1e-30, want);
            res.measured = std::max({res.measured, rel1, rel2});
        }
    }
    res.pass = res.measured <= tol;
    return res;
}

CheckResult check_tv_prox_oracle(std::size_t trials, std::uint64_t seed, double tol) {
    CheckResult res{"PDHG TV prox vs 1D oracle", tol, 0.0, false, ""};
    CounterRng rng(seed);
    PdhgConfig cfg;
    cfg.max_iters = 20000;
    cfg.gap_tol = 1e-11;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::size_t len = 2 + rng.next_below(4);  // 2..5
        const double beta = 0.2 + 2.0 * rng.next_unit();
        Vector g(len);
        for (double& v : g) v = 2.0 * rng.next_symmetric();
        const Vector want = tv_prox_1d_oracle(g, beta);
        const Vector got = tv_denoise_pdhg(g, GridShape{1, len}, beta, cfg);
        for (std::size_t k = 0; k < len; ++k)
            res.measured = std::max(res.measured, std::fabs(got[k] - want[k]));
    }
    res.pass = res.measured <= tol;
    return res;
}

CheckResult check_bregman_monotonicity(std::uint64_t seed, std::size_t iters, double tol) {
    CheckResult res{"per-path Bregman monotonicity (noisy CT)", tol, 0.0, false, ""};
    const std::size_t n = 24;
    const Vector phantom = shepp_logan(n);
    std::vector<double> angles;
    for (int a = 0; a < 24; ++a) angles.push_back(1.0 + a * 180.0 / 24.0);
    auto family = std::make_shared<CtRowFamily>(build_parallel_tomo(n, angles, n));
    NoiseSpec noise;
    noise.model = NoiseModel::Gaussian;
    noise.delta_rel = 0.05;
    noise.r = 2.0;
    noise.seed = seed;
    // Gate with realized noise levels: the per-path inequality assumes
    // ||y^d - y|| <= delta_i, which the a-priori Gaussian level does not give.
    EquationSystem sys =
        EquationSystem::from_noisy(family, forward_data(*family, phantom), noise, true);

    SolverConfig cfg;
    cfg.step_rule = StepRuleKind::AdaptiveDP;
    cfg.mu0 = 0.18;
    cfg.mu1 = 1e4;
    cfg.tau = 1.1;
    cfg.batch_size = 1;
    cfg.max_iters = iters;
    cfg.seed = seed;
    cfg.telemetry_stride = 1;
    SgdSolver solver(sys, cfg, PenaltySpec::quadratic_nonneg(), PdhgConfig{}, phantom);

    double prev = solver.bregman_to_truth().value();
    double worst = -1e300;
    for (std::size_t k = 0; k < iters; ++k) {
        solver.step();
        const double cur = solver.bregman_to_truth().value();
        worst = std::max(worst, cur - prev);
        prev = cur;
    }
    res.measured = worst;
    res.pass = worst <= tol;
    return res;
}

std::vector<CheckResult> run_all_checks(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(check_duality_identities(100, 50, seed + 1));

    const SparseRowBlock F = build_parallel_tomo(32, {1, 23, 45, 67, 89, 111, 133, 155}, 32);
    out.push_back(check_sparse_adjoint(F, 20, seed + 2));

    const SchlierenOperator op(32, 0.7);
    out.push_back(check_schlieren_adjoint(op, 20, seed + 3));
    out.push_back(check_schlieren_derivative(op, 10, seed + 4));
    out.push_back(check_tv_prox_oracle(50, seed + 5));
    out.push_back(check_bregman_monotonicity(seed + 6));
    return out;
}

}  // namespace sgdtheta
